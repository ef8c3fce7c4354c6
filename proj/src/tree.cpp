#include "feq/tree.hpp"

#include "feq/errors.hpp"

#include <algorithm>
#include <stdexcept>

namespace feq {

namespace {

std::size_t hash_combine(std::size_t seed, std::size_t v) {
    // boost-style mix
    return seed ^ (v + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2));
}

std::size_t compute_hash(int color, const std::vector<Tree> &children) {
    std::size_t h = hash_combine(0x517cc1b727220a95ull, static_cast<std::size_t>(color));
    for (const Tree &c : children)
        h = hash_combine(h, c.hash());
    return h;
}

} // namespace

Tree::Tree(int color) : color_(color), order_(1), hash_(compute_hash(color, {})) {
    if (color < 1)
        throw std::invalid_argument("tree color must be >= 1");
}

Tree::Tree(int color, std::vector<Tree> children) : color_(color), children_(std::move(children)) {
    if (color < 1)
        throw std::invalid_argument("tree color must be >= 1");
    std::sort(children_.begin(), children_.end());
    order_ = 1;
    for (const Tree &c : children_)
        order_ += c.order();
    hash_ = compute_hash(color_, children_);
}

Tree Tree::from_raw(const RawTree &raw) {
    std::vector<Tree> kids;
    kids.reserve(raw.children.size());
    for (const RawTree &c : raw.children)
        kids.push_back(from_raw(c));
    return Tree(raw.color, std::move(kids));
}

int Tree::max_color() const {
    int m = color_;
    for (const Tree &c : children_)
        m = std::max(m, c.max_color());
    return m;
}

std::strong_ordering Tree::operator<=>(const Tree &other) const {
    if (order_ != other.order_)
        return order_ <=> other.order_;
    if (color_ != other.color_)
        return color_ <=> other.color_;
    return std::lexicographical_compare_three_way(children_.begin(), children_.end(),
                                                  other.children_.begin(), other.children_.end());
}

bool Tree::operator==(const Tree &other) const {
    return hash_ == other.hash_ && (*this <=> other) == 0;
}

namespace {

RawTree parse_node(const std::string &s, std::size_t &pos) {
    if (pos >= s.size() || s[pos] != '[')
        throw ParseError("expected '[' at position " + std::to_string(pos) + " in '" + s + "'");
    ++pos;
    RawTree node;
    if (pos < s.size() && s[pos] == '^') {
        ++pos;
        std::size_t start = pos;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9')
            ++pos;
        if (pos == start)
            throw ParseError("expected color digits after '^' in '" + s + "'");
        node.color = std::stoi(s.substr(start, pos - start));
        if (node.color < 1)
            throw ParseError("colors start at 1 in '" + s + "'");
    }
    while (pos < s.size() && s[pos] == '[')
        node.children.push_back(parse_node(s, pos));
    if (pos >= s.size() || s[pos] != ']')
        throw ParseError("expected ']' at position " + std::to_string(pos) + " in '" + s + "'");
    ++pos;
    return node;
}

} // namespace

Tree parse_tree(const std::string &text) {
    std::size_t pos = 0;
    while (pos < text.size() && text[pos] == ' ')
        ++pos;
    RawTree raw = parse_node(text, pos);
    while (pos < text.size() && text[pos] == ' ')
        ++pos;
    if (pos != text.size())
        throw ParseError("trailing characters after tree in '" + text + "'");
    return Tree::from_raw(raw);
}

std::string format_tree(const Tree &tree) {
    std::string out = "[";
    if (tree.color() != 1)
        out += "^" + std::to_string(tree.color());
    for (const Tree &c : tree.children())
        out += format_tree(c);
    out += "]";
    return out;
}

mpz_class symmetry(const Tree &tree) {
    mpz_class sigma = 1;
    const auto &kids = tree.children();
    for (std::size_t i = 0; i < kids.size();) {
        std::size_t run = 1;
        while (i + run < kids.size() && kids[i + run] == kids[i])
            ++run;
        mpz_class s = symmetry(kids[i]);
        for (std::size_t k = 0; k < run; ++k)
            sigma *= s;
        mpz_class fact = 1;
        for (std::size_t k = 2; k <= run; ++k)
            fact *= static_cast<unsigned long>(k);
        sigma *= fact;
        i += run;
    }
    return sigma;
}

mpz_class tree_factorial(const Tree &tree) {
    mpz_class g = static_cast<unsigned long>(tree.order());
    for (const Tree &c : tree.children())
        g *= tree_factorial(c);
    return g;
}

Tree butcher_product(const Tree &u, const Tree &v) {
    std::vector<Tree> kids = u.children();
    kids.push_back(v);
    return Tree(u.color(), std::move(kids));
}

std::map<std::pair<Tree, Tree>, std::size_t> unbuttoned_pairs(const Tree &tau) {
    if (tau.order() < 2)
        throw std::invalid_argument("the single vertex has no Butcher-product decompositions");
    std::map<std::pair<Tree, Tree>, std::size_t> pairs;
    const auto &kids = tau.children();
    for (std::size_t i = 0; i < kids.size(); ++i) {
        std::vector<Tree> rest;
        rest.reserve(kids.size() - 1);
        for (std::size_t j = 0; j < kids.size(); ++j)
            if (j != i)
                rest.push_back(kids[j]);
        Tree u(tau.color(), std::move(rest));
        pairs[{std::move(u), kids[i]}] += 1;
    }
    return pairs;
}

Tree recolor_root(const Tree &tree, int color, int num_colors) {
    if (color < 1 || color > num_colors)
        throw std::invalid_argument("root color " + std::to_string(color) + " outside [1, " +
                                    std::to_string(num_colors) + "]");
    return Tree(color, tree.children());
}

std::vector<std::vector<Tree>> enumerate_trees(std::size_t max_order, int colors) {
    if (max_order < 1)
        throw std::invalid_argument("max_order must be >= 1");
    if (max_order > limits::max_tree_order())
        throw std::invalid_argument("max_order " + std::to_string(max_order) +
                                    " exceeds the configured cap " +
                                    std::to_string(limits::max_tree_order()));
    if (colors < 1)
        throw std::invalid_argument("colors must be >= 1");

    // by_order[n-1] = all trees of order n, sorted. A tree of order n is a
    // root color plus a multiset of subtrees of total order n-1; multisets are
    // enumerated as nondecreasing sequences over the sorted pool of smaller
    // trees.
    std::vector<std::vector<Tree>> by_order;
    std::vector<Tree> pool; // all trees of order < current n, sorted by (order, ...)

    for (std::size_t n = 1; n <= max_order; ++n) {
        std::vector<Tree> level;
        std::vector<Tree> chosen;
        // pick children with nondecreasing pool indices, total order n-1
        auto rec = [&](auto &&self, std::size_t remaining, std::size_t min_index) -> void {
            if (remaining == 0) {
                for (int c = 1; c <= colors; ++c)
                    level.emplace_back(c, chosen);
                return;
            }
            for (std::size_t i = min_index; i < pool.size(); ++i) {
                if (pool[i].order() > remaining)
                    break; // pool sorted by order first
                chosen.push_back(pool[i]);
                self(self, remaining - pool[i].order(), i);
                chosen.pop_back();
            }
        };
        rec(rec, n - 1, 0);
        std::sort(level.begin(), level.end());
        pool.insert(pool.end(), level.begin(), level.end());
        by_order.push_back(std::move(level));
    }
    return by_order;
}

std::vector<Tree> all_trees(std::size_t max_order, int colors) {
    std::vector<Tree> out;
    for (auto &level : enumerate_trees(max_order, colors))
        for (Tree &t : level)
            out.push_back(std::move(t));
    return out;
}

} // namespace feq
