#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "feq/errors.hpp"
#include "feq/tree.hpp"
#include "oracles.hpp"

#include <map>

using namespace feq;

namespace {
Tree t(const std::string &s) { return parse_tree(s); }
}

TEST_CASE("canonical form sorts children and is idempotent") {
    Tree a(1, {t("[[]]"), t("[]")});
    Tree b(1, {t("[]"), t("[[]]")});
    CHECK(a == b);
    CHECK(a.children().front() == t("[]"));

    CHECK(Tree::leaf() == t("[]"));

    Tree same(1, {t("[]"), t("[]"), t("[]")});
    CHECK(Tree(1, same.children()) == same);
}

TEST_CASE("canonical form is independent of input child order") {
    Rng rng(2024);
    for (int round = 0; round < 300; ++round) {
        int order = static_cast<int>(rng.int_in(1, 8));
        int colors = static_cast<int>(rng.int_in(1, 2));
        RawTree raw = oracle::random_raw_tree(rng, order, colors);
        Tree reference = Tree::from_raw(raw);
        for (int s = 0; s < 4; ++s)
            CHECK(Tree::from_raw(oracle::shuffled_copy(rng, raw)) == reference);
    }
}

TEST_CASE("order counts vertices") {
    CHECK(t("[]").order() == 1);
    CHECK(t("[[][]]").order() == 3);
    CHECK(t("[[[]]]").order() == 3);
}

TEST_CASE("symmetry coefficients") {
    CHECK(symmetry(t("[]")) == 1);
    CHECK(symmetry(t("[[]]")) == 1);
    CHECK(symmetry(t("[[][]]")) == 2);
    CHECK(symmetry(t("[[][][]]")) == 6);
}

TEST_CASE("symmetry equals the brute-force automorphism count") {
    for (const Tree &tau : all_trees(6, 1))
        CHECK(symmetry(tau) == oracle::automorphism_count(tau));
    // colored spot check: distinct colors break child symmetry
    for (const Tree &tau : all_trees(4, 2))
        CHECK(symmetry(tau) == oracle::automorphism_count(tau));
}

TEST_CASE("butcher product grafts onto the root") {
    CHECK(butcher_product(t("[]"), t("[[]]")) == t("[[[]]]"));
    CHECK(butcher_product(t("[[]]"), t("[]")) == t("[[][]]"));
    CHECK(butcher_product(t("[]"), t("[]")) == t("[[]]"));
}

TEST_CASE("butcher product adds orders") {
    const std::vector<Tree> trees = all_trees(7, 1);
    for (const Tree &u : trees)
        for (const Tree &v : trees) {
            if (u.order() + v.order() > 8)
                continue;
            CHECK(butcher_product(u, v).order() == u.order() + v.order());
        }
}

TEST_CASE("unbuttoned pairs enumerate root-child removals with multiplicity") {
    auto single = unbuttoned_pairs(t("[[[]]]"));
    REQUIRE(single.size() == 1);
    CHECK(single.begin()->first == std::pair(t("[]"), t("[[]]")));
    CHECK(single.begin()->second == 1);

    auto doubled = unbuttoned_pairs(t("[[][]]"));
    REQUIRE(doubled.size() == 1);
    CHECK(doubled.begin()->first == std::pair(t("[[]]"), t("[]")));
    CHECK(doubled.begin()->second == 2);

    auto leaf_pair = unbuttoned_pairs(t("[[]]"));
    REQUIRE(leaf_pair.size() == 1);
    CHECK(leaf_pair.begin()->first == std::pair(t("[]"), t("[]")));

    CHECK_THROWS_AS(unbuttoned_pairs(t("[]")), std::invalid_argument);
}

TEST_CASE("unbuttoned multiplicity is sigma(tau) / (sigma(u) sigma(v))") {
    for (const Tree &tau : all_trees(7, 1)) {
        if (tau.order() < 2)
            continue;
        for (const auto &[pair, mult] : unbuttoned_pairs(tau)) {
            const auto &[u, v] = pair;
            CHECK(butcher_product(u, v) == tau);
            CHECK(mpz_class(mult) * symmetry(u) * symmetry(v) == symmetry(tau));
        }
    }
}

TEST_CASE("enumeration counts match the leaf-growth oracle") {
    const auto ours = enumerate_trees(7, 1);
    const std::vector<std::size_t> expected{1, 1, 2, 4, 9, 20, 48};
    for (std::size_t n = 0; n < expected.size(); ++n)
        CHECK(ours[n].size() == expected[n]);

    const auto grown = oracle::grow_all_trees(7, 1);
    for (std::size_t n = 0; n < 7; ++n) {
        CHECK(ours[n].size() == grown[n].size());
        for (const Tree &tau : ours[n])
            CHECK(grown[n].count(tau) == 1);
    }
}

TEST_CASE("colored enumeration") {
    const auto two = enumerate_trees(2, 2);
    CHECK(two[0].size() == 2);
    CHECK(two[1].size() == 4);

    const auto grown = oracle::grow_all_trees(4, 2);
    const auto ours = enumerate_trees(4, 2);
    for (std::size_t n = 0; n < 4; ++n)
        CHECK(ours[n].size() == grown[n].size());
}

TEST_CASE("enumeration is duplicate-free and sorted") {
    for (int colors : {1, 2}) {
        const std::vector<Tree> trees = all_trees(6, colors);
        for (std::size_t i = 1; i < trees.size(); ++i)
            CHECK(trees[i - 1] < trees[i]);
    }
}

TEST_CASE("requests beyond the order cap are rejected") {
    CHECK_THROWS_AS(enumerate_trees(limits::max_tree_order() + 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_trees(0, 1), std::invalid_argument);
}

TEST_CASE("recolor_root changes only the root color") {
    Tree black = t("[^1[^2]]");
    Tree white = recolor_root(black, 2, 2);
    CHECK(white == t("[^2[^2]]"));
    CHECK(recolor_root(white, 1, 2) == black);
    CHECK(white.children() == black.children());
    CHECK_THROWS_AS(recolor_root(black, 3, 2), std::invalid_argument);
    CHECK_THROWS_AS(recolor_root(black, 0, 2), std::invalid_argument);
}

TEST_CASE("bracket text round-trips") {
    for (const std::string s : {"[]", "[[]]", "[[][]]", "[[[]]]", "[^2]", "[^2[][^3[]]]"})
        CHECK(format_tree(parse_tree(s)) == s);

    Rng rng(77);
    for (int round = 0; round < 200; ++round) {
        Tree tau = Tree::from_raw(
            oracle::random_raw_tree(rng, static_cast<int>(rng.int_in(1, 8)), 3));
        CHECK(parse_tree(format_tree(tau)) == tau);
    }

    CHECK_THROWS_AS(parse_tree(""), ParseError);
    CHECK_THROWS_AS(parse_tree("[[]"), ParseError);
    CHECK_THROWS_AS(parse_tree("[]]"), ParseError);
    CHECK_THROWS_AS(parse_tree("[^]"), ParseError);
    CHECK_THROWS_AS(parse_tree("[^0]"), ParseError);
}
