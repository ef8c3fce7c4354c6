#include "feq/random.hpp"

namespace feq {

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0)
        return 0;
    const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % n;
    std::uint64_t x;
    do {
        x = gen_();
    } while (x >= limit);
    return x % n;
}

long Rng::int_in(long lo, long hi) {
    return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
}

Rational Rng::small_rational(long max_abs_num, long max_den) {
    long num = 0;
    while (num == 0)
        num = int_in(-max_abs_num, max_abs_num);
    long den = int_in(1, max_den);
    return rat(num, den);
}

namespace {

Exponents random_exponents(Rng &rng, int dim, int degree) {
    Exponents e(dim, 0);
    for (int i = 0; i < degree; ++i)
        e[rng.below(dim)] += 1;
    return e;
}

Poly random_poly(Rng &rng, int dim, int min_degree, int max_degree, int terms) {
    Poly p(dim);
    for (int t = 0; t < terms; ++t) {
        int degree = static_cast<int>(rng.int_in(min_degree, max_degree));
        p.add_term(random_exponents(rng, dim, degree), rng.small_rational());
    }
    return p;
}

} // namespace

PolyVectorField random_field(Rng &rng, int dim, int max_degree, int terms) {
    std::vector<Poly> comps;
    comps.reserve(dim);
    for (int i = 0; i < dim; ++i)
        comps.push_back(random_poly(rng, dim, 0, max_degree, terms));
    return PolyVectorField(dim, std::move(comps));
}

PolyMap random_map(Rng &rng, int dim_in, int dim_out, int max_degree, int terms) {
    std::vector<Poly> comps;
    comps.reserve(dim_out);
    for (int i = 0; i < dim_out; ++i)
        comps.push_back(random_poly(rng, dim_in, 0, max_degree, terms));
    return PolyMap(dim_in, dim_out, std::move(comps));
}

PolyMap random_homogeneous_map(Rng &rng, int dim_in, int dim_out, int degree, int terms) {
    std::vector<Poly> comps;
    comps.reserve(dim_out);
    for (int i = 0; i < dim_out; ++i)
        comps.push_back(random_poly(rng, dim_in, degree, degree, terms));
    return PolyMap(dim_in, dim_out, std::move(comps));
}

RationalPoint random_point(Rng &rng, int dim, long max_abs_num, long max_den) {
    RationalPoint p;
    p.reserve(dim);
    for (int i = 0; i < dim; ++i)
        p.push_back(rat(rng.int_in(-max_abs_num, max_abs_num), rng.int_in(1, max_den)));
    return p;
}

} // namespace feq
