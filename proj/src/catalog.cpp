#include "feq/catalog.hpp"

#include <stdexcept>

namespace feq {

namespace {

Catalog make_builtins() {
    Catalog cat;
    using R = Rational;

    cat.methods["euler"] = Method{"euler", ButcherTableau::from_Ab({{R(0)}}, {R(1)})};
    cat.methods["implicit-midpoint"] =
        Method{"implicit-midpoint", ButcherTableau::from_Ab({{rat(1, 2)}}, {R(1)})};
    cat.methods["heun"] = Method{
        "heun", ButcherTableau::from_Ab({{R(0), R(0)}, {R(1), R(0)}}, {rat(1, 2), rat(1, 2)})};
    cat.methods["rk4"] = Method{
        "rk4", ButcherTableau::from_Ab({{R(0), R(0), R(0), R(0)},
                                        {rat(1, 2), R(0), R(0), R(0)},
                                        {R(0), rat(1, 2), R(0), R(0)},
                                        {R(0), R(0), R(1), R(0)}},
                                       {rat(1, 6), rat(1, 3), rat(1, 3), rat(1, 6)})};
    // two-stage Gauss collocation; entries live in Q(sqrt(3))
    const QuadExt quarter(rat(1, 4), R(0));
    const QuadExt minus(rat(1, 4), rat(-1, 6));
    const QuadExt plus(rat(1, 4), rat(1, 6));
    const QuadExt half(rat(1, 2), R(0));
    cat.methods["gauss2"] =
        Method{"gauss2", ExtTableau::from_Ab({{quarter, minus}, {plus, quarter}}, {half, half})};
    cat.methods["exact-flow"] = Method{"exact-flow", ExactFlowTag{}};

    cat.splittings["lie-trotter"] =
        SplittingScheme(2, {{1, R(1)}, {2, R(1)}});
    cat.splittings["strang"] =
        SplittingScheme(2, {{1, rat(1, 2)}, {2, R(1)}, {1, rat(1, 2)}});
    return cat;
}

} // namespace

const Catalog &builtin_catalog() {
    static const Catalog catalog = make_builtins();
    return catalog;
}

const Method &find_method(const Catalog &catalog, const std::string &name) {
    auto it = catalog.methods.find(name);
    if (it == catalog.methods.end())
        throw std::invalid_argument("unknown method '" + name + "'");
    return it->second;
}

const SplittingScheme &find_splitting(const Catalog &catalog, const std::string &name) {
    auto it = catalog.splittings.find(name);
    if (it == catalog.splittings.end())
        throw std::invalid_argument("unknown splitting '" + name + "'");
    return it->second;
}

} // namespace feq
