#pragma once

#include "feq/integrate.hpp"

#include <map>
#include <string>
#include <vector>

namespace feq {

/// Named methods available to the CLI and the tests. Users can merge their
/// own entries from a catalog file on top of the built-ins.
struct Catalog {
    std::map<std::string, Method> methods;
    std::map<std::string, SplittingScheme> splittings;
};

/// euler, implicit-midpoint, heun, rk4, gauss2, exact-flow; lie-trotter and
/// strang as splittings.
const Catalog &builtin_catalog();

const Method &find_method(const Catalog &catalog, const std::string &name);
const SplittingScheme &find_splitting(const Catalog &catalog, const std::string &name);

} // namespace feq
