#pragma once

#include "feq/poly.hpp"
#include "feq/rational.hpp"

#include <cstdint>
#include <random>

namespace feq {

/// Deterministic random source for test and CLI instance generation. All
/// draws go through hand-rolled rejection sampling so streams are identical
/// across platforms and standard library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t below(std::uint64_t n); // uniform in [0, n)
    long int_in(long lo, long hi);        // uniform inclusive

    /// Nonzero rational with small numerator and denominator.
    Rational small_rational(long max_abs_num = 2, long max_den = 3);

private:
    std::mt19937_64 gen_;
};

/// Sparse random polynomial vector field: each component gets up to `terms`
/// monomials of total degree <= max_degree with small rational coefficients.
PolyVectorField random_field(Rng &rng, int dim, int max_degree, int terms);

PolyMap random_map(Rng &rng, int dim_in, int dim_out, int max_degree, int terms);

/// Random map of exact total degree bound with only degree-`degree` terms
/// (e.g. purely quadratic observables).
PolyMap random_homogeneous_map(Rng &rng, int dim_in, int dim_out, int degree, int terms);

RationalPoint random_point(Rng &rng, int dim, long max_abs_num = 2, long max_den = 3);

} // namespace feq
