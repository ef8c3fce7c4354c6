#include "feq/fields.hpp"

#include <stdexcept>

namespace feq {

Poly apply_derivative(const Poly &p, std::span<const std::vector<Poly>> directions, int nbase) {
    if (directions.empty())
        return p;
    if (static_cast<int>(directions.front().size()) != nbase)
        throw std::invalid_argument("direction length does not match the base dimension");
    Poly acc(p.nvars());
    for (int j = 0; j < nbase; ++j) {
        if (directions.front()[j].is_zero())
            continue;
        Poly dp = p.derivative(j);
        if (dp.is_zero())
            continue;
        acc += directions.front()[j] * apply_derivative(dp, directions.subspan(1), nbase);
    }
    return acc;
}

Rational apply_derivative_at(const Poly &p, std::span<const RationalPoint> directions,
                             std::span<const Rational> point) {
    if (directions.empty())
        return p.eval_rational(point);
    Rational acc(0);
    const RationalPoint &dir = directions.front();
    for (std::size_t j = 0; j < dir.size(); ++j) {
        if (dir[j] == 0)
            continue;
        Poly dp = p.derivative(static_cast<int>(j));
        if (dp.is_zero())
            continue;
        acc += dir[j] * apply_derivative_at(dp, directions.subspan(1), point);
    }
    return acc;
}

DerivativeForm::DerivativeForm(PolyMap F, int k) : F_(std::move(F)), k_(k) {
    if (k < 0)
        throw std::invalid_argument("derivative order must be >= 0");
}

RationalPoint DerivativeForm::operator()(std::span<const Rational> point,
                                         std::span<const RationalPoint> directions) const {
    if (static_cast<int>(point.size()) != F_.dim_in)
        throw std::invalid_argument("point dimension does not match the map");
    if (static_cast<int>(directions.size()) != k_)
        throw std::invalid_argument("expected " + std::to_string(k_) + " directions");
    for (const RationalPoint &d : directions)
        if (static_cast<int>(d.size()) != F_.dim_in)
            throw std::invalid_argument("direction dimension does not match the map");
    RationalPoint out;
    out.reserve(F_.comps.size());
    for (const Poly &comp : F_.comps)
        out.push_back(apply_derivative_at(comp, directions, point));
    return out;
}

namespace {

const PolyVectorField &part_for(const Tree &tau, std::span<const PolyVectorField> parts) {
    if (tau.color() < 1 || tau.color() > static_cast<int>(parts.size()))
        throw std::invalid_argument("tree color " + std::to_string(tau.color()) +
                                    " has no matching part field");
    return parts[tau.color() - 1];
}

RationalPoint colored_diff_at(const Tree &tau, std::span<const PolyVectorField> parts,
                              std::span<const Rational> point) {
    const PolyVectorField &f = part_for(tau, parts);
    std::vector<RationalPoint> dirs;
    dirs.reserve(tau.children().size());
    for (const Tree &child : tau.children())
        dirs.push_back(colored_diff_at(child, parts, point));
    RationalPoint out;
    out.reserve(f.comps.size());
    for (const Poly &comp : f.comps)
        out.push_back(apply_derivative_at(comp, dirs, point));
    return out;
}

PolyVectorField colored_diff_field(const Tree &tau, std::span<const PolyVectorField> parts) {
    const PolyVectorField &f = part_for(tau, parts);
    std::vector<std::vector<Poly>> dirs;
    dirs.reserve(tau.children().size());
    for (const Tree &child : tau.children())
        dirs.push_back(colored_diff_field(child, parts).comps);
    std::vector<Poly> comps;
    comps.reserve(f.comps.size());
    for (const Poly &comp : f.comps)
        comps.push_back(apply_derivative(comp, dirs, f.dim));
    return PolyVectorField(f.dim, std::move(comps));
}

void check_dims(std::span<const PolyVectorField> parts, std::span<const Rational> point) {
    if (parts.empty())
        throw std::invalid_argument("need at least one part field");
    for (const PolyVectorField &p : parts)
        if (p.dim != parts.front().dim)
            throw std::invalid_argument("part fields have mismatched dimensions");
    if (point.size() != static_cast<std::size_t>(parts.front().dim))
        throw std::invalid_argument("point dimension does not match the fields");
}

} // namespace

RationalPoint elementary_differential(const Tree &tau, const PolyVectorField &f,
                                      std::span<const Rational> point) {
    return colored_elementary_differential(tau, std::span(&f, 1), point);
}

PolyVectorField elementary_differential_field(const Tree &tau, const PolyVectorField &f) {
    return colored_diff_field(tau, std::span(&f, 1));
}

RationalPoint colored_elementary_differential(const Tree &tau,
                                              std::span<const PolyVectorField> parts,
                                              std::span<const Rational> point) {
    check_dims(parts, point);
    if (tau.max_color() > static_cast<int>(parts.size()))
        throw std::invalid_argument("tree uses more colors than there are parts");
    return colored_diff_at(tau, parts, point);
}

PolyVectorField colored_elementary_differential_field(const Tree &tau,
                                                      std::span<const PolyVectorField> parts) {
    if (parts.empty())
        throw std::invalid_argument("need at least one part field");
    if (tau.max_color() > static_cast<int>(parts.size()))
        throw std::invalid_argument("tree uses more colors than there are parts");
    return colored_diff_field(tau, parts);
}

RationalPoint apply_series(const SeriesMap &phi, const PolyVectorField &f,
                           std::span<const Rational> point) {
    return apply_series(phi, std::span(&f, 1), point);
}

RationalPoint apply_series(const SeriesMap &phi, std::span<const PolyVectorField> parts,
                           std::span<const Rational> point) {
    check_dims(parts, point);
    if (phi.colors() != static_cast<int>(parts.size()))
        throw std::invalid_argument("series color count does not match the part count");
    RationalPoint acc(parts.front().dim, Rational(0));
    for (const auto &[tau, c] : phi.coefficients()) {
        if (c == 0)
            continue;
        RationalPoint v = colored_diff_at(tau, parts, point);
        for (std::size_t i = 0; i < acc.size(); ++i)
            acc[i] += c * v[i];
    }
    return acc;
}

PolyVectorField series_as_field(const SeriesMap &phi, const PolyVectorField &f) {
    if (phi.colors() != 1)
        throw std::invalid_argument("series_as_field expects a 1-color series");
    PolyVectorField acc = PolyVectorField::zero(f.dim);
    for (const auto &[tau, c] : phi.coefficients()) {
        if (c == 0)
            continue;
        acc = acc + c * elementary_differential_field(tau, f);
    }
    return acc;
}

PolyVectorField series_order_term_field(const SeriesMap &phi, std::size_t order,
                                        const PolyVectorField &f) {
    if (phi.colors() != 1)
        throw std::invalid_argument("series_order_term_field expects a 1-color series");
    PolyVectorField acc = PolyVectorField::zero(f.dim);
    for (const auto &[tau, c] : phi.coefficients()) {
        if (tau.order() != order || c == 0)
            continue;
        acc = acc + c * elementary_differential_field(tau, f);
    }
    return acc;
}

PolyVectorField augment(const PolyVectorField &f, const PolyMap &F) {
    if (F.dim_in != f.dim)
        throw std::invalid_argument("observable input dimension does not match the field");
    const int d = f.dim, dz = F.dim_out, n = d + dz;
    std::vector<Poly> comps;
    comps.reserve(n);
    for (const Poly &p : f.comps)
        comps.push_back(p.embed(n, 0));
    // z-components: F'(y) f(y), a polynomial in y only
    std::vector<std::vector<Poly>> dir{f.comps};
    for (const Poly &Fi : F.comps)
        comps.push_back(apply_derivative(Fi, dir, d).embed(n, 0));
    return PolyVectorField(n, std::move(comps));
}

PolyVectorField tangent_lift(const PolyVectorField &f) { return multi_variation_lift(f, 1); }

PolyVectorField multi_variation_lift(const PolyVectorField &f, int k) {
    if (k < 1)
        throw std::invalid_argument("need at least one variation block");
    const int d = f.dim, n = (k + 1) * d;
    std::vector<Poly> comps;
    comps.reserve(n);
    for (const Poly &p : f.comps)
        comps.push_back(p.embed(n, 0));
    for (int block = 1; block <= k; ++block) {
        std::vector<Poly> eta;
        eta.reserve(d);
        for (int j = 0; j < d; ++j)
            eta.push_back(Poly::variable(n, block * d + j));
        std::vector<std::vector<Poly>> dir{std::move(eta)};
        for (const Poly &p : f.comps)
            comps.push_back(apply_derivative(p.embed(n, 0), dir, d));
    }
    return PolyVectorField(n, std::move(comps));
}

PolyVectorField bilinear_observable_augment(const PolyVectorField &f, const PolyMap &omega) {
    const int d = f.dim;
    if (omega.dim_in != 2 * d)
        throw std::invalid_argument("omega must be defined on Y x Y");
    for (const Poly &w : omega.comps)
        for (const auto &[exps, coeff] : w.terms()) {
            int left = 0, right = 0;
            for (int v = 0; v < d; ++v)
                left += exps[v];
            for (int v = d; v < 2 * d; ++v)
                right += exps[v];
            if (left != 1 || right != 1)
                throw std::invalid_argument("omega is not a constant bilinear form");
        }

    const int dz = omega.dim_out, n = 3 * d + dz;
    std::vector<Poly> comps;
    comps.reserve(n);
    for (const Poly &p : f.comps)
        comps.push_back(p.embed(n, 0));

    // f'(y) xi and f'(y) eta, as polynomials on the full space
    auto jac_times_block = [&](int block) {
        std::vector<Poly> dir_vec;
        dir_vec.reserve(d);
        for (int j = 0; j < d; ++j)
            dir_vec.push_back(Poly::variable(n, block * d + j));
        std::vector<std::vector<Poly>> dir{std::move(dir_vec)};
        std::vector<Poly> out;
        out.reserve(d);
        for (const Poly &p : f.comps)
            out.push_back(apply_derivative(p.embed(n, 0), dir, d));
        return out;
    };
    std::vector<Poly> fxi = jac_times_block(1);
    std::vector<Poly> feta = jac_times_block(2);
    for (const Poly &p : fxi)
        comps.push_back(p);
    for (const Poly &p : feta)
        comps.push_back(p);

    // z = omega(f' xi, eta) + omega(xi, f' eta)
    std::vector<Poly> args_a, args_b;
    for (int j = 0; j < d; ++j)
        args_a.push_back(fxi[j]);
    for (int j = 0; j < d; ++j)
        args_a.push_back(Poly::variable(n, 2 * d + j)); // eta
    for (int j = 0; j < d; ++j)
        args_b.push_back(Poly::variable(n, d + j)); // xi
    for (int j = 0; j < d; ++j)
        args_b.push_back(feta[j]);
    const Poly one = Poly::constant(n, Rational(1));
    for (const Poly &w : omega.comps)
        comps.push_back(w.eval<Poly>(args_a, one) + w.eval<Poly>(args_b, one));
    return PolyVectorField(n, std::move(comps));
}

PolyVectorField lie_bracket(const PolyVectorField &f, const PolyVectorField &g) {
    if (f.dim != g.dim)
        throw std::invalid_argument("bracket needs fields of equal dimension");
    std::vector<std::vector<Poly>> dir_f{f.comps}, dir_g{g.comps};
    std::vector<Poly> comps;
    comps.reserve(f.dim);
    for (int i = 0; i < f.dim; ++i)
        comps.push_back(apply_derivative(g.comps[i], dir_f, f.dim) -
                        apply_derivative(f.comps[i], dir_g, f.dim));
    return PolyVectorField(f.dim, std::move(comps));
}

namespace {

// children_of[i] = labels of vertex i's children; labels are depth-first
// postorder, root last
int witness_labels(const Tree &t, std::vector<std::vector<int>> &children_of, int &next) {
    std::vector<int> kids;
    kids.reserve(t.children().size());
    for (const Tree &child : t.children())
        kids.push_back(witness_labels(child, children_of, next));
    int label = next++;
    children_of[label] = std::move(kids);
    return label;
}

std::vector<Poly> witness_components(const Tree &tau, int total_dim, int offset) {
    const int n = static_cast<int>(tau.order());
    std::vector<std::vector<int>> children_of(n);
    int next = 0;
    witness_labels(tau, children_of, next);
    std::vector<Poly> comps;
    comps.reserve(n);
    for (int i = 0; i < n; ++i) {
        Poly p = Poly::constant(total_dim, Rational(1));
        for (int j : children_of[i])
            p *= Poly::variable(total_dim, offset + j);
        comps.push_back(std::move(p));
    }
    return comps;
}

} // namespace

PolyVectorField witness_field(const Tree &tau) {
    const int n = static_cast<int>(tau.order());
    return PolyVectorField(n, witness_components(tau, n, 0));
}

WitnessPair witness_pair(const Tree &u, const Tree &v) {
    const int nu = static_cast<int>(u.order());
    const int nv = static_cast<int>(v.order());
    const int n = nu + nv;
    std::vector<Poly> comps = witness_components(u, n, 0);
    for (Poly &p : witness_components(v, n, nu))
        comps.push_back(std::move(p));
    Poly F = Poly::variable(n, nu - 1) * Poly::variable(n, n - 1);
    return WitnessPair{PolyVectorField(n, std::move(comps)),
                       PolyMap(n, 1, {std::move(F)})};
}

bool is_chi_related(const PolyVectorField &f, const PolyVectorField &g, const PolyMap &chi) {
    if (chi.dim_in != f.dim || chi.dim_out != g.dim)
        throw std::invalid_argument("chi shape does not match the fields");
    std::vector<std::vector<Poly>> dir{f.comps};
    const Poly one = Poly::constant(f.dim, Rational(1));
    for (int i = 0; i < g.dim; ++i) {
        Poly lhs = apply_derivative(chi.comps[i], dir, f.dim);
        Poly rhs = g.comps[i].eval<Poly>(chi.comps, one);
        if (!(lhs == rhs))
            return false;
    }
    return true;
}

} // namespace feq
