#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "feq/catalog.hpp"
#include "feq/random.hpp"
#include "feq/series.hpp"
#include "feq/tree.hpp"

using namespace feq;

namespace {

Tree t(const std::string &s) { return parse_tree(s); }

SeriesMap qfe_pass_map() {
    // f'f'f - 1/2 f''(f,f): stored weights 1 and -1/2
    SeriesMap s(1, 3, SeriesFlavor::integrator_map);
    s.set_coefficient(t("[[[]]]"), rat(1));
    s.set_coefficient(t("[[][]]"), rat(-1, 2));
    return s;
}

} // namespace

TEST_CASE("series maps carry one coefficient per tree") {
    SeriesMap s(1, 3, SeriesFlavor::integrator_map);
    CHECK(s.coefficients().size() == 1 + 1 + 2);
    CHECK(s.coefficient(t("[[]]")) == 0);
    CHECK_THROWS_AS(s.coefficient(t("[[][][]]")), std::invalid_argument);
    CHECK_THROWS_AS(s.set_coefficient(t("[[][][]]"), rat(1)), std::invalid_argument);

    SeriesMap colored(2, 2, SeriesFlavor::integrator_map);
    CHECK(colored.coefficients().size() == 2 + 4);
}

TEST_CASE("series arithmetic") {
    SeriesMap s = qfe_pass_map();
    SeriesMap zero(1, 3, SeriesFlavor::integrator_map);
    CHECK(series_add(s, zero) == s);
    CHECK(series_scale(s, rat(1)) == s);

    // assemble from single-tree basis maps
    SeriesMap a(1, 3, SeriesFlavor::integrator_map);
    a.set_coefficient(t("[[[]]]"), rat(1));
    SeriesMap b(1, 3, SeriesFlavor::integrator_map);
    b.set_coefficient(t("[[][]]"), rat(1));
    CHECK(series_add(a, series_scale(b, rat(-1, 2))) == s);

    CHECK_THROWS_AS(series_add(s, SeriesMap(1, 2, SeriesFlavor::integrator_map)),
                    std::invalid_argument);
}

TEST_CASE("sigma weighting bridges stored weights and pair-condition coefficients") {
    SeriesMap s = qfe_pass_map();
    CHECK(s.sigma_weighted(t("[[[]]]")) == rat(1));
    CHECK(s.sigma_weighted(t("[[][]]")) == rat(-1)); // sigma = 2
}

TEST_CASE("quadratic pair condition: passing map") {
    PairConditionReport r = check_quadratic_fe(qfe_pass_map());
    CHECK(r.holds);
    CHECK(r.violations.empty());
}

TEST_CASE("quadratic pair condition: f'f map fails at the leaf pair") {
    SeriesMap s(1, 2, SeriesFlavor::integrator_map);
    s.set_coefficient(t("[[]]"), rat(1));
    PairConditionReport r = check_quadratic_fe(s);
    REQUIRE(!r.holds);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].u == t("[]"));
    CHECK(r.violations[0].v == t("[]"));
    CHECK(r.violations[0].sum == rat(2));
}

TEST_CASE("quadratic pair condition: single higher-order trees fail at {[], [[]]}") {
    for (const char *tree : {"[[[]]]", "[[][]]"}) {
        SeriesMap s(1, 3, SeriesFlavor::integrator_map);
        s.set_coefficient(t(tree), rat(1));
        PairConditionReport r = check_quadratic_fe(s);
        REQUIRE(!r.holds);
        REQUIRE(r.violations.size() == 1);
        CHECK(r.violations[0].u == t("[]"));
        CHECK(r.violations[0].v == t("[[]]"));
        CHECK(r.violations[0].sum == rat(1) * symmetry(t(tree)));
    }
}

TEST_CASE("quadratic pair condition: zero series and linearity") {
    SeriesMap zero(1, 4, SeriesFlavor::integrator_map);
    CHECK(check_quadratic_fe(zero).holds);

    // the sum of two passing maps passes
    SeriesMap a = qfe_pass_map();
    SeriesMap b = series_scale(qfe_pass_map(), rat(7, 3));
    CHECK(check_quadratic_fe(series_add(a, b)).holds);
}

TEST_CASE("pair condition rejects integrator-flavor input and colored misuse") {
    SeriesMap integ(1, 2, SeriesFlavor::integrator);
    CHECK_THROWS_AS(check_quadratic_fe(integ), std::invalid_argument);
    SeriesMap colored(2, 2, SeriesFlavor::integrator_map);
    CHECK_THROWS_AS(check_quadratic_fe(colored), std::invalid_argument);
}

TEST_CASE("per-order slices sum back to the series") {
    SeriesMap s = qfe_pass_map();
    s.set_coefficient(t("[]"), rat(1));
    std::vector<SeriesMap> terms = per_order_terms(s);
    REQUIRE(terms.size() == 3);
    CHECK(terms[0].coefficient(t("[]")) == rat(1));
    CHECK(terms[0].coefficient(t("[[]]")) == 0);
    CHECK(terms[2].coefficient(t("[[[]]]")) == rat(1));
    SeriesMap sum = terms[0];
    for (std::size_t i = 1; i < terms.size(); ++i)
        sum = series_add(sum, terms[i]);
    CHECK(sum == s.with_flavor(SeriesFlavor::integrator_map));
}

TEST_CASE("root-color condition") {
    // both leaf colors weighted 1: preserved
    SeriesMap ok(2, 2, SeriesFlavor::integrator_map);
    ok.set_coefficient(t("[]"), rat(1));
    ok.set_coefficient(t("[^2]"), rat(1));
    CHECK(check_affine_root_condition(ok).holds);

    // only the black leaf: violated at the order-1 pair
    SeriesMap bad = ok;
    bad.set_coefficient(t("[^2]"), rat(0));
    RootColorReport r = check_affine_root_condition(bad);
    REQUIRE(!r.holds);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].tau == t("[]"));
    CHECK(r.violations[0].color == 2);

    // vacuous for one color
    SeriesMap plain(1, 3, SeriesFlavor::integrator_map);
    plain.set_coefficient(t("[[]]"), rat(5));
    CHECK(check_affine_root_condition(plain).holds);
}

TEST_CASE("partitioned pair condition distinguishes bilinear-only") {
    // same-root-color pair violation only: nonzero weight on the black-black
    // order-2 tree
    SeriesMap s(2, 3, SeriesFlavor::integrator_map);
    s.set_coefficient(t("[[]]"), rat(1));
    CHECK(check_partitioned_qfe(s, true).holds);
    PairConditionReport full = check_partitioned_qfe(s, false);
    REQUIRE(!full.holds);
    REQUIRE(full.violations.size() == 1);
    CHECK(full.violations[0].u == t("[]"));
    CHECK(full.violations[0].v == t("[]"));

    // cross-color violation is caught either way
    SeriesMap cross(2, 3, SeriesFlavor::integrator_map);
    cross.set_coefficient(t("[[^2]]"), rat(1)); // white child under black root
    CHECK(!check_partitioned_qfe(cross, true).holds);
    CHECK(!check_partitioned_qfe(cross, false).holds);

    SeriesMap zero(2, 3, SeriesFlavor::integrator_map);
    CHECK(check_partitioned_qfe(zero, true).holds);
    CHECK(check_partitioned_qfe(zero, false).holds);
}

TEST_CASE("copying sigma-weighted coefficients onto all colorings preserves the conditions") {
    // b-copy: colored weight = sigma(shape) * weight(shape) / sigma(colored)
    SeriesMap plain = qfe_pass_map();
    REQUIRE(check_quadratic_fe(plain).holds);
    SeriesMap colored(2, 3, SeriesFlavor::integrator_map);
    for (const auto &[tau, _] : colored.coefficients()) {
        // strip colors to find the shape
        auto strip = [](auto &&self, const Tree &tree) -> Tree {
            std::vector<Tree> kids;
            for (const Tree &c : tree.children())
                kids.push_back(self(self, c));
            return Tree(1, std::move(kids));
        };
        Tree shape = strip(strip, tau);
        colored.set_coefficient(tau, plain.sigma_weighted(shape) / Rational(symmetry(tau)));
    }
    CHECK(check_affine_root_condition(colored).holds);
    CHECK(check_partitioned_qfe(colored, false).holds);
    CHECK(check_partitioned_qfe(colored, true).holds);
}

TEST_CASE("butcher tableau construction") {
    ButcherTableau mid = ButcherTableau::from_Ab({{rat(1, 2)}}, {rat(1)});
    CHECK(mid.c == std::vector<Rational>{rat(1, 2)});
    CHECK(!mid.is_explicit());

    CHECK_THROWS_AS(ButcherTableau::from_Abc({{rat(1, 2)}}, {rat(1)}, {rat(1)}),
                    std::invalid_argument);
    CHECK_THROWS_AS(ButcherTableau::from_Ab({{rat(0), rat(0)}}, {rat(1)}), std::invalid_argument);

    const Catalog &cat = builtin_catalog();
    CHECK(std::get<ButcherTableau>(find_method(cat, "euler").impl).is_explicit());
    CHECK(std::get<ButcherTableau>(find_method(cat, "rk4").impl).is_explicit());
}

TEST_CASE("elementary weights") {
    const Catalog &cat = builtin_catalog();
    const auto &mid = std::get<ButcherTableau>(find_method(cat, "implicit-midpoint").impl);
    CHECK(elementary_weight(mid, t("[]")) == rat(1));
    CHECK(elementary_weight(mid, t("[[]]")) == rat(1, 2));
    CHECK(elementary_weight(mid, t("[[[]]]")) == rat(1, 4));
    CHECK(elementary_weight(mid, t("[[][]]")) == rat(1, 4));

    const auto &euler = std::get<ButcherTableau>(find_method(cat, "euler").impl);
    CHECK(elementary_weight(euler, t("[]")) == rat(1));
    for (const Tree &tau : all_trees(4, 1))
        if (tau.order() >= 2)
            CHECK(elementary_weight(euler, tau) == 0);

    // fourth-order method: weights equal 1/gamma through order 4
    const auto &rk4 = std::get<ButcherTableau>(find_method(cat, "rk4").impl);
    for (const Tree &tau : all_trees(4, 1))
        CHECK(elementary_weight(rk4, tau) == Rational(1) / Rational(tree_factorial(tau)));
}

TEST_CASE("extension-field weights of the two-stage Gauss method are rational") {
    const Catalog &cat = builtin_catalog();
    const auto &gauss = std::get<ExtTableau>(find_method(cat, "gauss2").impl);
    for (const Tree &tau : all_trees(5, 1)) {
        QuadExt a = elementary_weight(gauss, tau);
        CHECK(a.irr == 0);
        if (tau.order() <= 4)
            CHECK(a.rat == Rational(1) / Rational(tree_factorial(tau)));
    }
    // row sums are the Gauss nodes 1/2 -+ sqrt(3)/6
    QuadExt c1 = gauss.A[0][0] + gauss.A[0][1];
    CHECK(c1.rat == rat(1, 2));
    CHECK(c1.irr == rat(-1, 6));
}

TEST_CASE("quadext arithmetic") {
    QuadExt a(rat(1, 2), rat(1, 3));
    QuadExt b(rat(2), rat(-1, 3));
    QuadExt prod = a * b;
    // (1/2 + 1/3 s)(2 - 1/3 s) with s^2 = 3: rational part 1 - 1/3, irr 2/3 - 1/6
    CHECK(prod.rat == rat(2, 3));
    CHECK(prod.irr == rat(1, 2));
    QuadExt sum = a + b;
    CHECK(sum.rat == rat(5, 2));
    CHECK(sum.irr == 0);
}

TEST_CASE("integrator series store sigma-normalized weights") {
    const Catalog &cat = builtin_catalog();
    const auto &mid = std::get<ButcherTableau>(find_method(cat, "implicit-midpoint").impl);
    SeriesMap s = integrator_series(mid, 4);
    CHECK(s.flavor() == SeriesFlavor::integrator);
    CHECK(s.coefficient(t("[]")) == rat(1));
    CHECK(s.coefficient(t("[[]]")) == rat(1, 2));
    CHECK(s.coefficient(t("[[][]]")) == rat(1, 8)); // a = 1/4, sigma = 2
}

TEST_CASE("exact flow series") {
    SeriesMap s = exact_flow_series(4);
    CHECK(s.coefficient(t("[]")) == rat(1));
    CHECK(s.coefficient(t("[[]]")) == rat(1, 2));
    CHECK(s.coefficient(t("[[[]]]")) == rat(1, 6));   // gamma = 6, sigma = 1
    CHECK(s.coefficient(t("[[][]]")) == rat(1, 6));   // gamma = 3, sigma = 2
}

TEST_CASE("modified field of the implicit midpoint method") {
    const Catalog &cat = builtin_catalog();
    const auto &mid = std::get<ButcherTableau>(find_method(cat, "implicit-midpoint").impl);
    SeriesMap b = modified_field_series(integrator_series(mid, 3));
    CHECK(b.coefficient(t("[]")) == rat(1));
    CHECK(b.coefficient(t("[[]]")) == 0);
    CHECK(b.coefficient(t("[[[]]]")) == rat(1, 12));
    CHECK(b.coefficient(t("[[][]]")) == rat(-1, 24));
}

TEST_CASE("modified field of explicit Euler") {
    const Catalog &cat = builtin_catalog();
    const auto &euler = std::get<ButcherTableau>(find_method(cat, "euler").impl);
    SeriesMap b = modified_field_series(integrator_series(euler, 2));
    CHECK(b.coefficient(t("[]")) == rat(1));
    CHECK(b.coefficient(t("[[]]")) == rat(-1, 2));
}

TEST_CASE("modified field of the exact flow is the field itself") {
    SeriesMap b = modified_field_series(exact_flow_series(4));
    for (const auto &[tau, c] : b.coefficients())
        CHECK(c == (tau == t("[]") ? rat(1) : rat(0)));
}

TEST_CASE("modified_field_series validates its input") {
    SeriesMap not_integrator(1, 2, SeriesFlavor::integrator_map);
    CHECK_THROWS_AS(modified_field_series(not_integrator), std::invalid_argument);
    SeriesMap inconsistent(1, 2, SeriesFlavor::integrator);
    inconsistent.set_coefficient(t("[]"), rat(2));
    CHECK_THROWS_AS(modified_field_series(inconsistent), std::invalid_argument);
}

TEST_CASE("per-order terms of the midpoint modified field pass the pair condition") {
    const Catalog &cat = builtin_catalog();
    const auto &mid = std::get<ButcherTableau>(find_method(cat, "implicit-midpoint").impl);
    SeriesMap b = modified_field_series(integrator_series(mid, 5));
    for (const SeriesMap &term : per_order_terms(b))
        CHECK(check_quadratic_fe(term).holds);
}

TEST_CASE("some per-order term of the rk4 modified field fails the pair condition") {
    const Catalog &cat = builtin_catalog();
    const auto &rk4 = std::get<ButcherTableau>(find_method(cat, "rk4").impl);
    SeriesMap b = modified_field_series(integrator_series(rk4, 5));
    // the method is order 4: terms below order 5 vanish
    for (const auto &[tau, c] : b.coefficients()) {
        if (tau.order() > 1 && tau.order() < 5)
            CHECK(c == 0);
    }
    bool some_failed = false;
    for (const SeriesMap &term : per_order_terms(b))
        if (!check_quadratic_fe(term).holds)
            some_failed = true;
    CHECK(some_failed);
}

TEST_CASE("partition specs") {
    PartitionSpec p({2, 3});
    CHECK(p.blocks() == 2);
    CHECK(p.dim() == 5);
    CHECK(p.block_of(0) == 0);
    CHECK(p.block_of(1) == 0);
    CHECK(p.block_of(2) == 1);
    CHECK(p.block_of(4) == 1);
    CHECK_THROWS_AS(p.block_of(5), std::invalid_argument);
    CHECK_THROWS_AS(PartitionSpec({2, 0}), std::invalid_argument);
    CHECK_THROWS_AS(PartitionSpec(std::vector<int>{}), std::invalid_argument);
}
