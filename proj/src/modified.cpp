#include "feq/fields.hpp"
#include "feq/integrate.hpp"
#include "feq/series.hpp"

#include <stdexcept>

namespace feq {

// Tree-indexed coefficients of the modified vector field, extracted per order
// through witness fields: the order-n term of f-tilde evaluated on the
// witness field of tau (component |tau|, at the origin) picks out exactly
// sigma(tau) times the stored weight of tau, because every other elementary
// differential of that order vanishes there.
SeriesMap modified_field_series(const SeriesMap &integrator) {
    if (integrator.flavor() != SeriesFlavor::integrator)
        throw std::invalid_argument("modified_field_series expects an integrator-flavor series");
    if (integrator.colors() != 1)
        throw std::invalid_argument("modified_field_series expects a 1-color series");
    const Tree leaf;
    if (integrator.coefficient(leaf) != 1)
        throw std::invalid_argument("inconsistent integrator series: the order-1 weight is not 1");

    const std::size_t trunc = integrator.truncation_order();
    SeriesMap out(1, trunc, SeriesFlavor::integrator_map);
    out.set_coefficient(leaf, Rational(1));

    for (const auto &[tau, _] : integrator.coefficients()) {
        const int n = static_cast<int>(tau.order());
        if (n < 2)
            continue;
        const PolyVectorField f = witness_field(tau);
        const std::vector<PolyVectorField> terms = modified_field_polynomials(
            [&](std::span<const Poly> y0, int order) {
                return bseries_step_formal(integrator, f, y0, order);
            },
            f, n);
        const RationalPoint origin(static_cast<std::size_t>(n), Rational(0));
        const Rational value = terms[n - 2].comps[n - 1].eval_rational(origin);
        out.set_coefficient(tau, value / Rational(symmetry(tau)));
    }
    return out;
}

} // namespace feq
