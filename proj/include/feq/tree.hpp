#pragma once

#include "feq/rational.hpp"

#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace feq {

/// Unvalidated rooted tree as it comes out of a parser or a generator;
/// children in arbitrary order. Color 1 is the "plain" color.
struct RawTree {
    int color = 1;
    std::vector<RawTree> children;
};

/// Canonical rooted tree, optionally N-colored (plain trees are the 1-color
/// case). Immutable after construction: children are kept sorted under the
/// library's total order, so structural equality is value equality and trees
/// can serve as association keys.
///
/// Total order: by order (vertex count) first, then root color, then
/// lexicographic comparison of the (already canonical) child sequences.
class Tree {
public:
    /// The single vertex of the given color.
    explicit Tree(int color = 1);

    /// Canonicalizes: children are sorted recursively. Idempotent.
    Tree(int color, std::vector<Tree> children);

    static Tree leaf(int color = 1) { return Tree(color); }
    static Tree from_raw(const RawTree &raw);

    int color() const { return color_; }
    const std::vector<Tree> &children() const { return children_; }

    /// Number of vertices.
    std::size_t order() const { return order_; }

    /// Largest vertex color appearing anywhere in the tree.
    int max_color() const;

    /// Structural hash of the canonical form, usable for unordered containers.
    std::size_t hash() const { return hash_; }

    std::strong_ordering operator<=>(const Tree &other) const;
    bool operator==(const Tree &other) const;

private:
    int color_;
    std::vector<Tree> children_;
    std::size_t order_;
    std::size_t hash_;
};

/// Parses the bracket notation: "[]" is the single vertex, "[[][]]" nests
/// children; colored vertices are annotated "[^2[]]" ("^1" is omitted when
/// printing). format_tree / parse_tree round-trip on canonical trees.
Tree parse_tree(const std::string &text);
std::string format_tree(const Tree &tree);

/// Symmetry coefficient sigma: sigma(tau) = prod_i sigma(tau_i) * prod_j mu_j!
/// where mu_j count repeated (colored) subtrees among the children. Equals the
/// order of the root-fixing, color-preserving automorphism group.
mpz_class symmetry(const Tree &tree);

/// Tree factorial gamma: gamma(leaf) = 1, gamma(tau) = |tau| * prod gamma(tau_i).
/// Bookkeeping for the exact-flow coefficient series, not a structural notion.
mpz_class tree_factorial(const Tree &tree);

/// Butcher product: grafts v's root as a new (last, then re-sorted) child of
/// u's root. order(u o v) = order(u) + order(v).
Tree butcher_product(const Tree &u, const Tree &v);

/// All ways to split tau as u o v by removing one root child v; the multiset
/// multiplicity of a pair equals sigma(tau) / (sigma(u) sigma(v)).
/// Throws std::invalid_argument for the single vertex.
std::map<std::pair<Tree, Tree>, std::size_t> unbuttoned_pairs(const Tree &tau);

/// Identical tree with the root color replaced. Throws if color is out of
/// [1, num_colors].
Tree recolor_root(const Tree &tree, int color, int num_colors);

/// All canonical trees with vertex colors in [1, colors], grouped by order
/// (index 0 holds order-1 trees). Deterministic: each group is sorted under
/// the total order. Rejects max_order > limits::max_tree_order() or < 1.
std::vector<std::vector<Tree>> enumerate_trees(std::size_t max_order, int colors = 1);

/// Flattened view of enumerate_trees, still sorted.
std::vector<Tree> all_trees(std::size_t max_order, int colors = 1);

} // namespace feq

template <> struct std::hash<feq::Tree> {
    std::size_t operator()(const feq::Tree &t) const { return t.hash(); }
};
