#pragma once

#include "feq/fields.hpp"
#include "feq/hseries.hpp"
#include "feq/poly.hpp"
#include "feq/series.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace feq {

/// Formal state of a one-step map: one truncated h-series per component.
/// Coefficients are polynomials in whatever variables the start point was
/// expressed in (the plain symbolic start uses the state variables themselves;
/// a constant start uses 0-variable polynomials, i.e. plain rationals).
using FormalState = std::vector<HSeries<Poly>>;

/// Start point y0 given symbolically: component i is the variable y_{i+1}.
std::vector<Poly> symbolic_point(int dim);

/// Start point as 0-variable constant polynomials.
std::vector<Poly> constant_point(std::span<const Rational> point);

/// Coefficient of h^k across all components.
std::vector<Poly> state_order_coeffs(const FormalState &state, int k);

/// Collapses a 0-variable formal state to rational series.
std::vector<HSeries<Rational>> state_to_rational(const FormalState &state);

/// One formal step of a Runge-Kutta tableau from the given start point,
/// expanded exactly through h^order. Implicit stages are resolved by
/// fixed-point iteration in h-series arithmetic, which is exact after `order`
/// rounds (every round settles one more power of h).
FormalState rk_step_formal(const ButcherTableau &tab, const PolyVectorField &f,
                           std::span<const Poly> y0, int order);

/// Formal step of an integrator-flavor series map:
/// y0 + sum_j h^j [sum_{|tau|=j} c(tau) tau(f)](y0).
FormalState bseries_step_formal(const SeriesMap &integrator, const PolyVectorField &f,
                                std::span<const Poly> y0, int order);

/// Iterated Lie derivatives of the identity: element 0 is id, element m+1 is
/// the Jacobian of element m applied to g. Taylor coefficients of the exact
/// flow of g are element m divided by m!.
std::vector<PolyVectorField> lie_taylor_fields(const PolyVectorField &g, int count);

/// Exact flow, expanded through h^order, of the h-dependent field
/// fields[0] + h fields[1] + h^2 fields[2] + ..., flowed for time h.
FormalState flow_formal(std::span<const PolyVectorField> fields, std::span<const Poly> y0,
                        int order);
FormalState flow_formal(const PolyVectorField &f, std::span<const Poly> y0, int order);

/// Composition/splitting scheme: each stage flows one part exactly for c*h.
struct SplittingScheme {
    struct Stage {
        int part = 1; // 1-based part index
        Rational coeff;
        bool operator==(const Stage &other) const = default;
    };
    int parts = 0;
    std::vector<Stage> stages;

    SplittingScheme() = default;
    SplittingScheme(int parts, std::vector<Stage> stages);

    /// Stage coefficients of every part sum to 1.
    bool is_consistent() const;
    bool operator==(const SplittingScheme &other) const = default;
};

FormalState splitting_step_formal(const SplittingScheme &scheme,
                                  std::span<const PolyVectorField> parts,
                                  std::span<const Poly> y0, int order);

/// Partitioned Runge-Kutta: one tableau per partition block, equal stage
/// counts; component k is advanced with its block's coefficients.
struct PartitionedMethod {
    std::vector<ButcherTableau> tableaux;
    PartitionSpec partition;

    PartitionedMethod() = default;
    PartitionedMethod(std::vector<ButcherTableau> tableaux, PartitionSpec partition);
    bool operator==(const PartitionedMethod &other) const = default;
};

FormalState partitioned_step_formal(const PartitionedMethod &method, const PolyVectorField &f,
                                    std::span<const Poly> y0, int order);

/// The exact flow used as a pseudo-method (oracle).
struct ExactFlowTag {
    bool operator==(const ExactFlowTag &) const = default;
};

/// A one-step method acting on a single vector field. Extension-field
/// tableaux step formally through their (rational) B-series and numerically
/// through the double-precision tableau.
struct Method {
    std::string name;
    std::variant<ButcherTableau, ExtTableau, ExactFlowTag> impl;
};

FormalState method_step_formal(const Method &method, const PolyVectorField &f,
                               std::span<const Poly> y0, int order);

/// Any formal one-step map y0 -> expansion, used to define modified fields
/// generically (RK, B-series, splitting, partitioned, compositions).
using FormalStepFn = std::function<FormalState(std::span<const Poly>, int)>;

/// Modified vector field terms f_2, ..., f_order of a consistent one-step
/// map: the flow of f + h f_2 + ... + h^{order-1} f_order reproduces the
/// step's expansion exactly through h^order. Order-by-order: f_j is the
/// h^j coefficient of (step - flow of the already-known truncation), which is
/// an exact polynomial identity in the start point. Throws if the step is
/// not consistent (h^0 != id or h^1 != f).
std::vector<PolyVectorField> modified_field_polynomials(const FormalStepFn &step,
                                                        const PolyVectorField &f, int order);
std::vector<PolyVectorField> modified_field_polynomials(const Method &method,
                                                        const PolyVectorField &f, int order);

/// Modified field of a splitting scheme applied to the given parts (no BCH
/// table anywhere; this goes through the generic order matching).
std::vector<PolyVectorField> splitting_modified_field(const SplittingScheme &scheme,
                                                      std::span<const PolyVectorField> parts,
                                                      int order);

enum class Mode { numeric, formal };

/// Commutation defect of the observable diagram: z-components of
/// (id, F)(step of f)  minus  step of the augmented field from (y0, F(y0)).
struct DiagramResidual {
    Mode mode = Mode::formal;
    // formal mode
    std::vector<HSeries<Rational>> formal; // one series per z-component
    int first_nonzero_order = -1;          // -1: zero through the truncation
    // numeric mode
    std::vector<double> numeric; // one value per z-component
    double magnitude = 0.0;
    double tol = 0.0;

    bool is_zero() const;
};

/// Exact symbolic defect (one h-series of polynomials in y0 per z-component).
std::vector<HSeries<Poly>> fe_diagram_defect_symbolic(const Method &method,
                                                      const PolyVectorField &f, const PolyMap &F,
                                                      int order);

DiagramResidual fe_diagram_residual(const Method &method, const PolyVectorField &f,
                                    const PolyMap &F, const RationalPoint &y0, int order);

std::vector<HSeries<Poly>>
fe_diagram_defect_additive_symbolic(const SplittingScheme &scheme,
                                    std::span<const PolyVectorField> parts, const PolyMap &F,
                                    int order);

DiagramResidual fe_diagram_residual_additive(const SplittingScheme &scheme,
                                             std::span<const PolyVectorField> parts,
                                             const PolyMap &F, const RationalPoint &y0, int order);

/// phi(delta f) == delta(phi(f)) as exact polynomials, for the series
/// restricted to trees of order <= order.
struct ClosureReport {
    bool closed = true;
    PolyVectorField defect; // on Y x Y
};
ClosureReport check_closure_under_differentiation(const SeriesMap &phi, const PolyVectorField &f,
                                                  int order);

/// Hamiltonian vector field of H on Q^{2m} with y = (q, p):
/// f = (dH/dp, -dH/dq).
PolyVectorField hamiltonian_field(const Poly &H);

/// Canonical symplectic form on Q^{2m} as a bilinear map (Y x Y -> Q):
/// omega(xi, eta) = sum_i xi_{q_i} eta_{p_i} - xi_{p_i} eta_{q_i}.
PolyMap canonical_omega(int dim);

/// Per-order symplecticity of the modified field: for each j, the Lie
/// derivative polynomial omega(f_j' xi, eta) + omega(xi, f_j' eta) must vanish
/// identically. sample_points (in (y, xi, eta)-space) are only reported as
/// evidence alongside failing defects.
struct SymplecticOrderResult {
    int order_j = 1;
    bool pass = true;
    Poly defect; // polynomial in (y, xi, eta, z); identically zero iff pass
    std::vector<Rational> sample_values;
};
struct SymplecticReport {
    bool all_pass = true;
    std::vector<SymplecticOrderResult> orders;
};
SymplecticReport check_symplectic_modified(const Method &method, const Poly &hamiltonian,
                                           int order,
                                           std::span<const RationalPoint> sample_points = {});

/// Searches the modified field of a splitting for the first order at which an
/// affine invariant of the total field stops being preserved. Throws if A is
/// not affine or not an invariant of the summed field.
struct RigidityReport {
    bool exact_through = true; // A' f_j == 0 for all j <= order
    int first_violation_order = -1;
    std::vector<Poly> violating_derivative; // A' f_j at the first violation
};
RigidityReport check_exact_flow_rigidity(const SplittingScheme &scheme,
                                         std::span<const PolyVectorField> parts, const PolyMap &A,
                                         int order);

/// ---- numeric mode (demonstration / agreement tests only) ----

using NumericField = std::function<std::vector<double>(const std::vector<double> &)>;

struct NumericOptions {
    double tol = 1e-12;
    int max_fixed_point = 50;
    int max_newton = 25;
};

/// One numeric step. Implicit stages: fixed-point iteration, then a Newton
/// fallback (exact polynomial Jacobian). Throws ConvergenceFailure with the
/// iteration count if neither converges.
std::vector<double> step_numeric(const Method &method, const PolyVectorField &f,
                                 std::span<const double> y, double h,
                                 const NumericOptions &opts = {});

/// Callback variant (Jacobians by forward differences; exact-flow pseudo
/// method is not available for callbacks).
std::vector<double> step_numeric(const Method &method, const NumericField &f, int dim,
                                 std::span<const double> y, double h,
                                 const NumericOptions &opts = {});

/// Numeric splitting step: part flows by high-order Taylor summation, terms
/// added until below tol (polynomial parts only).
std::vector<double> splitting_step_numeric(const SplittingScheme &scheme,
                                           std::span<const PolyVectorField> parts,
                                           std::span<const double> y, double h,
                                           const NumericOptions &opts = {});

std::vector<double> partitioned_step_numeric(const PartitionedMethod &method,
                                             const PolyVectorField &f, std::span<const double> y,
                                             double h, const NumericOptions &opts = {});

DiagramResidual fe_diagram_residual_numeric(const Method &method, const PolyVectorField &f,
                                            const PolyMap &F, std::span<const double> y0, double h,
                                            const NumericOptions &opts = {});

} // namespace feq
