#include "feq/json_io.hpp"

#include "feq/errors.hpp"

#include <fstream>

namespace feq {

namespace {

void require_schema(const Json &j, const std::string &name) {
    if (!j.is_object() || !j.contains("schema") || !j["schema"].is_string())
        throw ParseError("missing schema field (expected \"" + name + "\")");
    if (j["schema"].get<std::string>() != name)
        throw ParseError("expected schema \"" + name + "\", found \"" +
                         j["schema"].get<std::string>() + "\"");
}

std::vector<Rational> rational_vector(const Json &j) {
    std::vector<Rational> out;
    for (const Json &x : j)
        out.push_back(rational_from_json(x));
    return out;
}

Json rational_vector_to_json(const std::vector<Rational> &v) {
    Json out = Json::array();
    for (const Rational &x : v)
        out.push_back(rational_to_json(x));
    return out;
}

std::vector<Poly> components_from_json(const Json &j, int nvars) {
    std::vector<Poly> comps;
    for (const Json &comp : j) {
        Poly p(nvars);
        for (const Json &term : comp) {
            if (!term.contains("exponents") || !term.contains("coeff"))
                throw ParseError("monomial needs \"exponents\" and \"coeff\"");
            Exponents e;
            for (const Json &x : term["exponents"])
                e.push_back(x.get<std::uint32_t>());
            if (static_cast<int>(e.size()) != nvars)
                throw ParseError("exponent vector length does not match the dimension");
            p.add_term(e, rational_from_json(term["coeff"]));
        }
        comps.push_back(std::move(p));
    }
    return comps;
}

Json components_to_json(const std::vector<Poly> &comps) {
    Json out = Json::array();
    for (const Poly &p : comps) {
        Json terms = Json::array();
        for (const auto &[e, c] : p.terms()) {
            Json term;
            term["exponents"] = e;
            term["coeff"] = rational_to_json(c);
            terms.push_back(std::move(term));
        }
        out.push_back(std::move(terms));
    }
    return out;
}

} // namespace

Json rational_to_json(const Rational &q) { return rat_str(q); }

Rational rational_from_json(const Json &j) {
    if (j.is_string())
        return rat_parse(j.get<std::string>());
    if (j.is_number_integer())
        return Rational(j.get<long>());
    if (j.is_object() && j.contains("num") && j.contains("den")) {
        auto part = [](const Json &x) {
            return x.is_string() ? rat_parse(x.get<std::string>()) : Rational(x.get<long>());
        };
        Rational num = part(j["num"]), den = part(j["den"]);
        if (den == 0)
            throw ParseError("zero denominator");
        return num / den;
    }
    throw ParseError("expected a rational (string \"p/q\", integer, or {num, den})");
}

Json series_to_json(const SeriesMap &s) {
    Json j;
    j["schema"] = "feq.series/1";
    j["colors"] = s.colors();
    j["truncation_order"] = s.truncation_order();
    j["flavor"] = s.flavor() == SeriesFlavor::integrator ? "integrator" : "integrator-map";
    Json coeffs = Json::object();
    for (const auto &[tau, c] : s.coefficients())
        if (c != 0)
            coeffs[format_tree(tau)] = rational_to_json(c);
    j["coefficients"] = std::move(coeffs);
    return j;
}

SeriesMap series_from_json(const Json &j) {
    require_schema(j, "feq.series/1");
    const int colors = j.at("colors").get<int>();
    const std::size_t order = j.at("truncation_order").get<std::size_t>();
    const std::string flavor = j.at("flavor").get<std::string>();
    if (flavor != "integrator" && flavor != "integrator-map")
        throw ParseError("flavor must be \"integrator\" or \"integrator-map\"");
    SeriesMap s(colors, order,
                flavor == "integrator" ? SeriesFlavor::integrator : SeriesFlavor::integrator_map);
    for (const auto &[key, value] : j.at("coefficients").items()) {
        Tree tau = parse_tree(key);
        try {
            s.set_coefficient(tau, rational_from_json(value));
        } catch (const std::invalid_argument &e) {
            throw ParseError(e.what());
        }
    }
    return s;
}

Json tableau_to_json(const ButcherTableau &t) {
    Json j;
    j["schema"] = "feq.tableau/1";
    j["stages"] = t.stages;
    Json A = Json::array();
    for (const auto &row : t.A)
        A.push_back(rational_vector_to_json(row));
    j["A"] = std::move(A);
    j["b"] = rational_vector_to_json(t.b);
    j["c"] = rational_vector_to_json(t.c);
    return j;
}

ButcherTableau tableau_from_json(const Json &j) {
    require_schema(j, "feq.tableau/1");
    std::vector<std::vector<Rational>> A;
    for (const Json &row : j.at("A"))
        A.push_back(rational_vector(row));
    std::vector<Rational> b = rational_vector(j.at("b"));
    try {
        ButcherTableau tab = j.contains("c")
                                 ? ButcherTableau::from_Abc(std::move(A), std::move(b),
                                                            rational_vector(j["c"]))
                                 : ButcherTableau::from_Ab(std::move(A), std::move(b));
        if (j.contains("stages") && j["stages"].get<int>() != tab.stages)
            throw ParseError("declared stage count does not match b");
        return tab;
    } catch (const std::invalid_argument &e) {
        throw ParseError(e.what());
    }
}

Json field_to_json(const PolyVectorField &f) {
    Json j;
    j["schema"] = "feq.field/1";
    j["dimension"] = f.dim;
    j["components"] = components_to_json(f.comps);
    return j;
}

PolyVectorField field_from_json(const Json &j) {
    require_schema(j, "feq.field/1");
    const int dim = j.at("dimension").get<int>();
    std::vector<Poly> comps = components_from_json(j.at("components"), dim);
    if (static_cast<int>(comps.size()) != dim)
        throw ParseError("component count does not match the dimension");
    return PolyVectorField(dim, std::move(comps));
}

Json map_to_json(const PolyMap &F) {
    Json j;
    j["schema"] = "feq.map/1";
    j["input_dimension"] = F.dim_in;
    j["output_dimension"] = F.dim_out;
    j["components"] = components_to_json(F.comps);
    return j;
}

PolyMap map_from_json(const Json &j) {
    require_schema(j, "feq.map/1");
    const int din = j.at("input_dimension").get<int>();
    const int dout = j.at("output_dimension").get<int>();
    std::vector<Poly> comps = components_from_json(j.at("components"), din);
    if (static_cast<int>(comps.size()) != dout)
        throw ParseError("component count does not match the output dimension");
    return PolyMap(din, dout, std::move(comps));
}

Json splitting_to_json(const SplittingScheme &s) {
    Json j;
    j["schema"] = "feq.splitting/1";
    j["parts"] = s.parts;
    Json stages = Json::array();
    for (const auto &st : s.stages) {
        Json stage;
        stage["part"] = st.part;
        stage["coeff"] = rational_to_json(st.coeff);
        stages.push_back(std::move(stage));
    }
    j["stages"] = std::move(stages);
    return j;
}

SplittingScheme splitting_from_json(const Json &j) {
    require_schema(j, "feq.splitting/1");
    std::vector<SplittingScheme::Stage> stages;
    for (const Json &st : j.at("stages"))
        stages.push_back({st.at("part").get<int>(), rational_from_json(st.at("coeff"))});
    try {
        return SplittingScheme(j.at("parts").get<int>(), std::move(stages));
    } catch (const std::invalid_argument &e) {
        throw ParseError(e.what());
    }
}

Json partition_to_json(const PartitionSpec &p) {
    Json j;
    j["schema"] = "feq.partition/1";
    j["sizes"] = p.sizes;
    return j;
}

PartitionSpec partition_from_json(const Json &j) {
    require_schema(j, "feq.partition/1");
    try {
        return PartitionSpec(j.at("sizes").get<std::vector<int>>());
    } catch (const std::invalid_argument &e) {
        throw ParseError(e.what());
    }
}

Json hseries_to_json(const HSeries<Rational> &s) {
    Json j = Json::array();
    for (int k = 0; k <= s.trunc(); ++k)
        j.push_back(rational_to_json(s[k]));
    return j;
}

Json pair_report_to_json(const PairConditionReport &r) {
    Json j;
    j["holds"] = r.holds;
    Json v = Json::array();
    for (const auto &viol : r.violations) {
        Json item;
        item["u"] = format_tree(viol.u);
        item["v"] = format_tree(viol.v);
        item["sum"] = rational_to_json(viol.sum);
        v.push_back(std::move(item));
    }
    j["violations"] = std::move(v);
    return j;
}

Json root_color_report_to_json(const RootColorReport &r) {
    Json j;
    j["holds"] = r.holds;
    Json v = Json::array();
    for (const auto &viol : r.violations) {
        Json item;
        item["tree"] = format_tree(viol.tau);
        item["root_color"] = viol.color;
        item["coefficient"] = rational_to_json(viol.got);
        item["expected"] = rational_to_json(viol.want);
        v.push_back(std::move(item));
    }
    j["violations"] = std::move(v);
    return j;
}

Json residual_to_json(const DiagramResidual &r) {
    Json j;
    j["mode"] = r.mode == Mode::formal ? "formal" : "numeric";
    j["zero"] = r.is_zero();
    if (r.mode == Mode::formal) {
        j["first_nonzero_order"] = r.first_nonzero_order;
        Json comps = Json::array();
        for (const auto &s : r.formal)
            comps.push_back(hseries_to_json(s));
        j["residual"] = std::move(comps);
    } else {
        j["magnitude"] = r.magnitude;
        j["tol"] = r.tol;
        j["residual"] = r.numeric;
    }
    return j;
}

Catalog catalog_with_file(const std::string &path) {
    Catalog cat = builtin_catalog();
    Json j = load_json(path);
    require_schema(j, "feq.methods/1");
    if (j.contains("tableaux"))
        for (const auto &[name, tj] : j["tableaux"].items())
            cat.methods[name] = Method{name, tableau_from_json(tj)};
    if (j.contains("splittings"))
        for (const auto &[name, sj] : j["splittings"].items())
            cat.splittings[name] = splitting_from_json(sj);
    return cat;
}

Json load_json(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception &e) {
        throw ParseError("invalid JSON in '" + path + "': " + e.what());
    }
    return j;
}

void save_json(const std::string &path, const Json &j) {
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

} // namespace feq
