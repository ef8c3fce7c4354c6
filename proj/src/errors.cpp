#include "feq/errors.hpp"

namespace feq::limits {

namespace {
std::atomic<std::size_t> g_max_tree_order{8};
std::atomic<std::size_t> g_monomial_budget{1000000};
} // namespace

std::size_t max_tree_order() { return g_max_tree_order.load(); }
void set_max_tree_order(std::size_t n) { g_max_tree_order.store(n); }

std::size_t monomial_budget() { return g_monomial_budget.load(); }
void set_monomial_budget(std::size_t n) { g_monomial_budget.store(n); }

} // namespace feq::limits
