#pragma once

#include <atomic>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace feq {

/// Malformed textual or JSON input.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string &what) : std::runtime_error(what) {}
};

/// A symbolic expansion would exceed the configured monomial budget.
struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string &what) : std::runtime_error(what) {}
};

/// An implicit solve did not converge (numeric mode only).
struct ConvergenceFailure : std::runtime_error {
    ConvergenceFailure(const std::string &what, int iterations)
        : std::runtime_error(what), iterations(iterations) {}
    int iterations;
};

namespace limits {

/// Largest tree order any operation will enumerate. Combinatorial growth past
/// this point is a deliberate opt-in.
std::size_t max_tree_order();
void set_max_tree_order(std::size_t n);

/// Cap on the number of stored monomials in any single polynomial produced by
/// arithmetic. Symbolic expansions (e.g. iterated Lie derivatives of
/// high-degree fields) blow up combinatorially; exceeding the budget throws
/// BudgetExceeded instead of grinding away.
std::size_t monomial_budget();
void set_monomial_budget(std::size_t n);

} // namespace limits

} // namespace feq
