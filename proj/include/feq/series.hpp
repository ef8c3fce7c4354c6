#pragma once

#include "feq/rational.hpp"
#include "feq/tree.hpp"

#include <map>
#include <string>
#include <vector>

namespace feq {

enum class SeriesFlavor {
    integrator_map, // phi(f) = sum_tau c(tau) tau(f), no identity term
    integrator      // Phi_hf = id + sum_tau h^|tau| c(tau) tau(f)
};

/// Coefficient map over all canonical (colored) trees up to a truncation
/// order. Every tree of order <= truncation_order holds exactly one exact
/// rational coefficient.
///
/// Coefficients are stored as the weights of the elementary differentials
/// themselves, i.e. phi(f) = sum c(tau) tau(f). The sigma-normalized
/// coefficients familiar from the B-series literature are
/// b(tau) = sigma(tau) * c(tau); the condition checkers weight by sigma where
/// the conditions demand it, so both views agree on every check.
class SeriesMap {
public:
    SeriesMap(int colors, std::size_t truncation_order, SeriesFlavor flavor);

    int colors() const { return colors_; }
    std::size_t truncation_order() const { return truncation_order_; }
    SeriesFlavor flavor() const { return flavor_; }
    SeriesMap with_flavor(SeriesFlavor flavor) const;

    const std::map<Tree, Rational> &coefficients() const { return coeff_; }

    /// Stored weight c(tau). Throws if tau is outside the coefficient domain.
    const Rational &coefficient(const Tree &tau) const;

    /// sigma(tau) * c(tau), the condition-side coefficient b(tau).
    Rational sigma_weighted(const Tree &tau) const;

    void set_coefficient(const Tree &tau, const Rational &value);

    bool operator==(const SeriesMap &other) const = default;

private:
    int colors_;
    std::size_t truncation_order_;
    SeriesFlavor flavor_;
    std::map<Tree, Rational> coeff_;
};

SeriesMap series_add(const SeriesMap &a, const SeriesMap &b);
SeriesMap series_scale(const SeriesMap &a, const Rational &q);

/// Homogeneous slices: element j-1 carries exactly the order-j coefficients
/// (same colors and truncation); summing all slices recovers the input.
std::vector<SeriesMap> per_order_terms(const SeriesMap &b);

/// One unordered pair (u, v) with b(u o v) + b(v o u) != 0 and that sum.
struct PairViolation {
    Tree u, v;
    Rational sum;
};

struct PairConditionReport {
    bool holds = true;
    std::vector<PairViolation> violations;
};

/// Quadratic functional equivariance of a 1-color integrator map:
/// b(u o v) + b(v o u) = 0 for all pairs with |u| + |v| <= truncation.
/// Each unordered pair is reported once.
PairConditionReport check_quadratic_fe(const SeriesMap &phi);

/// Same pair condition over N-colored trees. With bilinear_only set, pairs
/// whose roots share a color are exempt (the observable's cross-partition
/// Hessian blocks are the only nonzero ones).
PairConditionReport check_partitioned_qfe(const SeriesMap &phi, bool bilinear_only);

struct RootColorViolation {
    Tree tau;      // original tree
    int color;     // recoloring that disagrees
    Rational got;  // b(recolored)
    Rational want; // b(tau)
};

struct RootColorReport {
    bool holds = true;
    std::vector<RootColorViolation> violations;
};

/// Affine invariant preservation of an N-colored additive map: coefficients
/// may not depend on the color of the root. Vacuous for 1 color.
RootColorReport check_affine_root_condition(const SeriesMap &phi);

/// Runge-Kutta coefficient scheme. The row-sum convention c_i = sum_j A_ij is
/// enforced at construction.
struct ButcherTableau {
    int stages = 0;
    std::vector<std::vector<Rational>> A;
    std::vector<Rational> b;
    std::vector<Rational> c;

    ButcherTableau() = default;

    /// Derives c from the row sums.
    static ButcherTableau from_Ab(std::vector<std::vector<Rational>> A, std::vector<Rational> b);

    /// Validates c against the row sums.
    static ButcherTableau from_Abc(std::vector<std::vector<Rational>> A, std::vector<Rational> b,
                                   std::vector<Rational> c);

    bool is_explicit() const;
    bool operator==(const ButcherTableau &other) const = default;
};

/// Elementary-weight recursion over any commutative ring S (exact rationals,
/// quadratic extensions, doubles): u_i(tau) = prod_k (A u(tau_k))_i with the
/// empty product 1, a(tau) = b . u(tau).
template <class S>
S elementary_weight_with(const std::vector<std::vector<S>> &A, const std::vector<S> &b,
                         const Tree &tau) {
    const int s = static_cast<int>(b.size());
    auto stage_weights = [&](auto &&self, const Tree &t) -> std::vector<S> {
        std::vector<S> u(s, S(1));
        for (const Tree &child : t.children()) {
            std::vector<S> uc = self(self, child);
            for (int i = 0; i < s; ++i) {
                S dot(0);
                for (int j = 0; j < s; ++j)
                    dot = dot + A[i][j] * uc[j];
                u[i] = u[i] * dot;
            }
        }
        return u;
    };
    std::vector<S> u = stage_weights(stage_weights, tau);
    S a(0);
    for (int i = 0; i < s; ++i)
        a = a + b[i] * u[i];
    return a;
}

/// Classical elementary weight a(tau) of the tableau (sigma-normalized
/// convention: Phi_hf = id + sum h^|tau| a(tau)/sigma(tau) tau(f)).
Rational elementary_weight(const ButcherTableau &tab, const Tree &tau);

/// Element of Q(sqrt(root)): rat + irr * sqrt(root). Supports the handful of
/// tableaux (Gauss points) whose entries are quadratic irrationals.
struct QuadExt {
    Rational rat;
    Rational irr;
    long root = 3;

    QuadExt(int v = 0) : rat(v), irr(0) {}
    QuadExt(Rational rational_part, Rational irrational_part, long root = 3)
        : rat(std::move(rational_part)), irr(std::move(irrational_part)), root(root) {}

    bool operator==(const QuadExt &other) const = default;
};

QuadExt operator+(const QuadExt &a, const QuadExt &b);
QuadExt operator*(const QuadExt &a, const QuadExt &b);

/// Tableau over Q(sqrt(root)). Its elementary weights may still all be
/// rational (they are for the symmetric Gauss methods); ext_integrator_series
/// exploits that and fails loudly if an irrational weight ever shows up.
struct ExtTableau {
    int stages = 0;
    std::vector<std::vector<QuadExt>> A;
    std::vector<QuadExt> b;

    static ExtTableau from_Ab(std::vector<std::vector<QuadExt>> A, std::vector<QuadExt> b);
    bool operator==(const ExtTableau &other) const = default;
};

QuadExt elementary_weight(const ExtTableau &tab, const Tree &tau);

/// Integrator series of an extension-field tableau; throws if any weight has
/// a nonzero irrational part.
SeriesMap ext_integrator_series(const ExtTableau &tab, std::size_t order);

/// The integrator-flavor series of the tableau through the given order;
/// stores a(tau)/sigma(tau) per the SeriesMap convention.
SeriesMap integrator_series(const ButcherTableau &tab, std::size_t order);

/// Integrator series of the exact flow: a(tau) = 1/gamma(tau), stored as
/// 1/(sigma(tau) gamma(tau)).
SeriesMap exact_flow_series(std::size_t order);

/// Coefficients of the modified vector field f-tilde of a consistent
/// integrator series: exp(h f-tilde) matches the integrator term-by-term
/// through the truncation order. Extraction is per order by evaluating the
/// order-n term of f-tilde on the witness field of each order-n tree at the
/// origin (the witness construction isolates exactly one elementary
/// differential there). Throws if c([]) != 1.
SeriesMap modified_field_series(const SeriesMap &integrator);

/// Contiguous partition of a state vector into N blocks.
struct PartitionSpec {
    std::vector<int> sizes;

    explicit PartitionSpec(std::vector<int> sizes);
    PartitionSpec() = default;

    int blocks() const { return static_cast<int>(sizes.size()); }
    int dim() const;
    int block_of(int index) const; // 0-based component -> 0-based block
    bool operator==(const PartitionSpec &other) const = default;
};

} // namespace feq
