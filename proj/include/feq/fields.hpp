#pragma once

#include "feq/poly.hpp"
#include "feq/series.hpp"
#include "feq/tree.hpp"

#include <functional>
#include <span>
#include <vector>

namespace feq {

/// sum over j1..jm of  d^m p / dy_{j1}..dy_{jm} * dir_1[j1] * ... * dir_m[jm].
/// Differentiation runs over the first nbase variables of p; the direction
/// entries are polynomials in p's full variable space. This is the m-th
/// derivative of p as an m-linear form, applied to the given directions
/// (directions are treated as constants: the derivatives never hit them).
Poly apply_derivative(const Poly &p, std::span<const std::vector<Poly>> directions, int nbase);

/// Point version: directions and base point are exact rational vectors.
Rational apply_derivative_at(const Poly &p, std::span<const RationalPoint> directions,
                             std::span<const Rational> point);

/// k-linear form evaluator for the k-th derivative of F. Symmetric in the
/// directions; k = 0 degenerates to evaluation of F.
class DerivativeForm {
public:
    DerivativeForm(PolyMap F, int k);

    /// Value of F^{(k)}(point)(directions...), one entry per output component.
    RationalPoint operator()(std::span<const Rational> point,
                             std::span<const RationalPoint> directions) const;

    int arity() const { return k_; }

private:
    PolyMap F_;
    int k_;
};

inline DerivativeForm differentiate(PolyMap F, int k) { return DerivativeForm(std::move(F), k); }

/// Elementary differential tau(f) evaluated at a point:
/// tau(f) = f^{(m)}(tau_1(f), ..., tau_m(f)) recursively, [](f) = f.
RationalPoint elementary_differential(const Tree &tau, const PolyVectorField &f,
                                      std::span<const Rational> point);

/// tau(f) as a polynomial vector field (symbolic form of the above).
PolyVectorField elementary_differential_field(const Tree &tau, const PolyVectorField &f);

/// N-colored elementary differential: each vertex of color nu differentiates
/// the part field parts[nu-1].
RationalPoint colored_elementary_differential(const Tree &tau,
                                              std::span<const PolyVectorField> parts,
                                              std::span<const Rational> point);

PolyVectorField colored_elementary_differential_field(const Tree &tau,
                                                      std::span<const PolyVectorField> parts);

/// phi(f)(y) = sum over trees of c(tau) tau(f)(y), truncated at the series
/// order. For N-colored series pass one part per color.
RationalPoint apply_series(const SeriesMap &phi, const PolyVectorField &f,
                           std::span<const Rational> point);
RationalPoint apply_series(const SeriesMap &phi, std::span<const PolyVectorField> parts,
                           std::span<const Rational> point);

/// Symbolic phi(f) as a polynomial vector field.
PolyVectorField series_as_field(const SeriesMap &phi, const PolyVectorField &f);

/// Homogeneous slice: sum over |tau| = order only.
PolyVectorField series_order_term_field(const SeriesMap &phi, std::size_t order,
                                        const PolyVectorField &f);

/// Augmented vector field g(y, z) = (f(y), F'(y) f(y)) on Y x Z.
PolyVectorField augment(const PolyVectorField &f, const PolyMap &F);

/// Tangent (complete) lift: delta f (y, eta) = (f(y), f'(y) eta) on Y x Y.
PolyVectorField tangent_lift(const PolyVectorField &f);

/// k variations: (f(y), f'(y) xi_1, ..., f'(y) xi_k) on Y^{k+1}; k = 1 is the
/// tangent lift.
PolyVectorField multi_variation_lift(const PolyVectorField &f, int k);

/// Lie-derivative observable for a constant bilinear omega: Y x Y -> Z.
/// Returns the field on Y x Y x Y x Z whose last block is
/// omega(f'(y) xi, eta) + omega(xi, f'(y) eta), i.e. (L_f omega)_y(xi, eta).
/// Throws if omega is not bilinear in its two Y-blocks.
PolyVectorField bilinear_observable_augment(const PolyVectorField &f, const PolyMap &omega);

/// Jacobi-Lie bracket with the convention [f, g] = g' f - f' g.
PolyVectorField lie_bracket(const PolyVectorField &f, const PolyVectorField &g);

/// Witness field of tau on Q^{|tau|}: vertices labeled in depth-first
/// postorder (children before parents, root last); component i is the product
/// of y_j over the children j of vertex i, empty product 1. Satisfies
/// theta(f)_{|tau|}(0) = sigma(tau) if theta = tau, else 0.
PolyVectorField witness_field(const Tree &tau);

/// Witness pair for (u, v) on Q^{|u|+|v|}: the two witness constructions side
/// by side (v's labels shifted by |u|) and the quadratic observable
/// F(y) = y_{|u|} * y_{|u|+|v|}, whose Hessian isolates the pair {u, v}.
struct WitnessPair {
    PolyVectorField field;
    PolyMap observable;
};
WitnessPair witness_pair(const Tree &u, const Tree &v);

/// chi'(y) f(y) == g(chi(y)) as polynomials.
bool is_chi_related(const PolyVectorField &f, const PolyVectorField &g, const PolyMap &chi);

} // namespace feq
