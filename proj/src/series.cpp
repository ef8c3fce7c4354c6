#include "feq/series.hpp"

#include "feq/errors.hpp"

#include <stdexcept>

namespace feq {

SeriesMap::SeriesMap(int colors, std::size_t truncation_order, SeriesFlavor flavor)
    : colors_(colors), truncation_order_(truncation_order), flavor_(flavor) {
    for (const Tree &t : all_trees(truncation_order, colors))
        coeff_.emplace(t, Rational(0));
}

SeriesMap SeriesMap::with_flavor(SeriesFlavor flavor) const {
    SeriesMap out = *this;
    out.flavor_ = flavor;
    return out;
}

const Rational &SeriesMap::coefficient(const Tree &tau) const {
    auto it = coeff_.find(tau);
    if (it == coeff_.end())
        throw std::invalid_argument("tree " + format_tree(tau) + " outside the series domain");
    return it->second;
}

Rational SeriesMap::sigma_weighted(const Tree &tau) const {
    return Rational(symmetry(tau)) * coefficient(tau);
}

void SeriesMap::set_coefficient(const Tree &tau, const Rational &value) {
    auto it = coeff_.find(tau);
    if (it == coeff_.end())
        throw std::invalid_argument("tree " + format_tree(tau) + " outside the series domain");
    it->second = value;
}

SeriesMap series_add(const SeriesMap &a, const SeriesMap &b) {
    if (a.colors() != b.colors() || a.truncation_order() != b.truncation_order())
        throw std::invalid_argument("series shapes differ");
    SeriesMap out = a;
    for (const auto &[tau, c] : b.coefficients())
        out.set_coefficient(tau, out.coefficient(tau) + c);
    return out;
}

SeriesMap series_scale(const SeriesMap &a, const Rational &q) {
    SeriesMap out = a;
    for (const auto &[tau, c] : a.coefficients())
        out.set_coefficient(tau, c * q);
    return out;
}

std::vector<SeriesMap> per_order_terms(const SeriesMap &b) {
    std::vector<SeriesMap> terms(
        b.truncation_order(),
        SeriesMap(b.colors(), b.truncation_order(), SeriesFlavor::integrator_map));
    for (const auto &[tau, c] : b.coefficients())
        terms[tau.order() - 1].set_coefficient(tau, c);
    return terms;
}

namespace {

PairConditionReport check_pair_condition(const SeriesMap &phi, bool skip_same_root_color) {
    if (phi.flavor() != SeriesFlavor::integrator_map)
        throw std::invalid_argument("pair conditions apply to integrator maps");
    PairConditionReport report;
    if (phi.truncation_order() < 2)
        return report; // no pair fits below order 2
    const std::vector<Tree> trees = all_trees(phi.truncation_order() - 1, phi.colors());
    for (std::size_t i = 0; i < trees.size(); ++i) {
        for (std::size_t j = i; j < trees.size(); ++j) {
            const Tree &u = trees[i];
            const Tree &v = trees[j];
            if (u.order() + v.order() > phi.truncation_order())
                continue;
            if (skip_same_root_color && u.color() == v.color())
                continue;
            Rational sum =
                phi.sigma_weighted(butcher_product(u, v)) + phi.sigma_weighted(butcher_product(v, u));
            if (sum != 0) {
                report.holds = false;
                report.violations.push_back({u, v, sum});
            }
        }
    }
    return report;
}

} // namespace

PairConditionReport check_quadratic_fe(const SeriesMap &phi) {
    if (phi.colors() != 1)
        throw std::invalid_argument("check_quadratic_fe expects a 1-color series");
    return check_pair_condition(phi, false);
}

PairConditionReport check_partitioned_qfe(const SeriesMap &phi, bool bilinear_only) {
    return check_pair_condition(phi, bilinear_only);
}

RootColorReport check_affine_root_condition(const SeriesMap &phi) {
    RootColorReport report;
    for (const auto &[tau, c] : phi.coefficients()) {
        for (int color = 1; color <= phi.colors(); ++color) {
            if (color == tau.color())
                continue;
            Tree recolored = recolor_root(tau, color, phi.colors());
            if (recolored < tau)
                continue; // report each color class once, from its smallest member
            const Rational &other = phi.coefficient(recolored);
            if (other != c) {
                report.holds = false;
                report.violations.push_back({tau, color, other, c});
            }
        }
    }
    return report;
}

ButcherTableau ButcherTableau::from_Ab(std::vector<std::vector<Rational>> A,
                                       std::vector<Rational> b) {
    ButcherTableau tab;
    tab.stages = static_cast<int>(b.size());
    if (static_cast<int>(A.size()) != tab.stages)
        throw std::invalid_argument("tableau A row count does not match b");
    for (const auto &row : A)
        if (static_cast<int>(row.size()) != tab.stages)
            throw std::invalid_argument("tableau A is not square");
    tab.c.reserve(tab.stages);
    for (const auto &row : A) {
        Rational sum(0);
        for (const Rational &a : row)
            sum += a;
        tab.c.push_back(sum);
    }
    tab.A = std::move(A);
    tab.b = std::move(b);
    return tab;
}

ButcherTableau ButcherTableau::from_Abc(std::vector<std::vector<Rational>> A,
                                        std::vector<Rational> b, std::vector<Rational> c) {
    ButcherTableau tab = from_Ab(std::move(A), std::move(b));
    if (c != tab.c)
        throw std::invalid_argument("tableau c does not equal the row sums of A");
    return tab;
}

bool ButcherTableau::is_explicit() const {
    for (int i = 0; i < stages; ++i)
        for (int j = i; j < stages; ++j)
            if (A[i][j] != 0)
                return false;
    return true;
}

Rational elementary_weight(const ButcherTableau &tab, const Tree &tau) {
    if (tau.max_color() != 1)
        throw std::invalid_argument("elementary weights are defined for plain trees");
    return elementary_weight_with<Rational>(tab.A, tab.b, tau);
}

QuadExt operator+(const QuadExt &a, const QuadExt &b) {
    if (a.root != b.root)
        throw std::invalid_argument("mixed extension fields");
    return QuadExt(a.rat + b.rat, a.irr + b.irr, a.root);
}

QuadExt operator*(const QuadExt &a, const QuadExt &b) {
    if (a.root != b.root)
        throw std::invalid_argument("mixed extension fields");
    return QuadExt(a.rat * b.rat + Rational(a.root) * a.irr * b.irr,
                   a.rat * b.irr + a.irr * b.rat, a.root);
}

ExtTableau ExtTableau::from_Ab(std::vector<std::vector<QuadExt>> A, std::vector<QuadExt> b) {
    ExtTableau tab;
    tab.stages = static_cast<int>(b.size());
    if (static_cast<int>(A.size()) != tab.stages)
        throw std::invalid_argument("tableau A row count does not match b");
    for (const auto &row : A)
        if (static_cast<int>(row.size()) != tab.stages)
            throw std::invalid_argument("tableau A is not square");
    tab.A = std::move(A);
    tab.b = std::move(b);
    return tab;
}

QuadExt elementary_weight(const ExtTableau &tab, const Tree &tau) {
    if (tau.max_color() != 1)
        throw std::invalid_argument("elementary weights are defined for plain trees");
    return elementary_weight_with<QuadExt>(tab.A, tab.b, tau);
}

SeriesMap ext_integrator_series(const ExtTableau &tab, std::size_t order) {
    SeriesMap s(1, order, SeriesFlavor::integrator);
    for (const auto &[tau, _] : s.coefficients()) {
        QuadExt a = elementary_weight(tab, tau);
        if (a.irr != 0)
            throw std::invalid_argument("elementary weight of " + format_tree(tau) +
                                        " is irrational; no rational series exists");
        s.set_coefficient(tau, a.rat / Rational(symmetry(tau)));
    }
    return s;
}

SeriesMap integrator_series(const ButcherTableau &tab, std::size_t order) {
    SeriesMap s(1, order, SeriesFlavor::integrator);
    for (const auto &[tau, _] : s.coefficients())
        s.set_coefficient(tau, elementary_weight(tab, tau) / Rational(symmetry(tau)));
    return s;
}

SeriesMap exact_flow_series(std::size_t order) {
    SeriesMap s(1, order, SeriesFlavor::integrator);
    for (const auto &[tau, _] : s.coefficients())
        s.set_coefficient(tau, Rational(1) / Rational(symmetry(tau) * tree_factorial(tau)));
    return s;
}

PartitionSpec::PartitionSpec(std::vector<int> sizes) : sizes(std::move(sizes)) {
    if (this->sizes.empty())
        throw std::invalid_argument("partition needs at least one block");
    for (int s : this->sizes)
        if (s <= 0)
            throw std::invalid_argument("partition block sizes must be positive");
}

int PartitionSpec::dim() const {
    int d = 0;
    for (int s : sizes)
        d += s;
    return d;
}

int PartitionSpec::block_of(int index) const {
    int offset = 0;
    for (std::size_t nu = 0; nu < sizes.size(); ++nu) {
        offset += sizes[nu];
        if (index < offset)
            return static_cast<int>(nu);
    }
    throw std::invalid_argument("component index outside the partitioned space");
}

} // namespace feq
