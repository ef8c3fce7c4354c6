#pragma once

#include "feq/catalog.hpp"
#include "feq/integrate.hpp"
#include "feq/poly.hpp"
#include "feq/series.hpp"
#include "feq/tree.hpp"

#include <json.hpp>

#include <string>

namespace feq {

using Json = nlohmann::ordered_json;

/// Rationals serialize as "p/q" strings; {"num": .., "den": ..} objects and
/// bare integers are accepted on input.
Json rational_to_json(const Rational &q);
Rational rational_from_json(const Json &j);

Json series_to_json(const SeriesMap &s);     // schema feq.series/1
SeriesMap series_from_json(const Json &j);

Json tableau_to_json(const ButcherTableau &t); // schema feq.tableau/1
ButcherTableau tableau_from_json(const Json &j);

Json field_to_json(const PolyVectorField &f); // schema feq.field/1
PolyVectorField field_from_json(const Json &j);

Json map_to_json(const PolyMap &F); // schema feq.map/1
PolyMap map_from_json(const Json &j);

Json splitting_to_json(const SplittingScheme &s); // schema feq.splitting/1
SplittingScheme splitting_from_json(const Json &j);

Json partition_to_json(const PartitionSpec &p);
PartitionSpec partition_from_json(const Json &j);

Json hseries_to_json(const HSeries<Rational> &s);

Json pair_report_to_json(const PairConditionReport &r);
Json root_color_report_to_json(const RootColorReport &r);
Json residual_to_json(const DiagramResidual &r);

/// Merges tableaux and splittings from a catalog file (schema feq.methods/1)
/// over the built-ins.
Catalog catalog_with_file(const std::string &path);

Json load_json(const std::string &path);
void save_json(const std::string &path, const Json &j);

} // namespace feq
