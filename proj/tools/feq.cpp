#include "feq/catalog.hpp"
#include "feq/errors.hpp"
#include "feq/fields.hpp"
#include "feq/integrate.hpp"
#include "feq/json_io.hpp"
#include "feq/random.hpp"
#include "feq/series.hpp"
#include "feq/tree.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace feq;

struct GlobalOpts {
    std::size_t order = 4;
    int colors = 1;
    std::uint64_t seed = 0;
    std::string format = "text";
    std::size_t budget = 1000000;
    std::string catalog_file;
};

bool json_output(const GlobalOpts &g) { return g.format == "json"; }

void emit(const Json &j) { std::cout << j.dump(2) << "\n"; }

Catalog load_catalog(const GlobalOpts &g) {
    if (g.catalog_file.empty())
        return builtin_catalog();
    return catalog_with_file(g.catalog_file);
}

Method method_from_arg(const Catalog &cat, const std::string &arg) {
    if (arg.size() > 5 && arg.substr(arg.size() - 5) == ".json")
        return Method{arg, tableau_from_json(load_json(arg))};
    return find_method(cat, arg);
}

int cmd_trees(const GlobalOpts &g) {
    const auto levels = enumerate_trees(g.order, g.colors);
    if (json_output(g)) {
        Json j;
        j["schema"] = "feq.trees/1";
        j["max_order"] = g.order;
        j["colors"] = g.colors;
        Json list = Json::array();
        for (const auto &level : levels)
            for (const Tree &t : level) {
                Json item;
                item["tree"] = format_tree(t);
                item["order"] = t.order();
                item["sigma"] = symmetry(t).get_str();
                list.push_back(std::move(item));
            }
        j["trees"] = std::move(list);
        emit(j);
    } else {
        std::size_t total = 0;
        for (const auto &level : levels) {
            for (const Tree &t : level) {
                std::cout << "order " << t.order() << "  sigma " << symmetry(t).get_str() << "  "
                          << format_tree(t) << "\n";
                ++total;
            }
        }
        std::cout << total << " trees through order " << g.order << " with " << g.colors
                  << (g.colors == 1 ? " color\n" : " colors\n");
    }
    return 0;
}

int cmd_check(const GlobalOpts &g, const std::string &file, const std::string &which,
              bool all_pairs) {
    const SeriesMap series = series_from_json(load_json(file));
    bool holds = true;
    Json report;
    std::string text;
    if (which == "qfe" || which == "p-qfe") {
        PairConditionReport r = which == "qfe" ? check_quadratic_fe(series)
                                               : check_partitioned_qfe(series, !all_pairs);
        holds = r.holds;
        report = pair_report_to_json(r);
        if (r.holds)
            text = "pair condition holds: b(u o v) + b(v o u) = 0 on all checked pairs";
        else {
            text = "pair condition violated:";
            for (const auto &v : r.violations)
                text += "\n  u=" + format_tree(v.u) + "  v=" + format_tree(v.v) +
                        "  b(u o v)+b(v o u) = " + rat_str(v.sum);
        }
    } else if (which == "nb-affine") {
        RootColorReport r = check_affine_root_condition(series);
        holds = r.holds;
        report = root_color_report_to_json(r);
        if (r.holds)
            text = "root-color condition holds: coefficients are independent of the root color";
        else {
            text = "root-color condition violated:";
            for (const auto &v : r.violations)
                text += "\n  " + format_tree(v.tau) + " recolored to " + std::to_string(v.color) +
                        ": " + rat_str(v.got) + " != " + rat_str(v.want);
        }
    } else {
        throw std::invalid_argument("unknown check '" + which + "'");
    }
    report["check"] = which;
    report["input"] = file;
    if (json_output(g))
        emit(report);
    else
        std::cout << text << "\n";
    return holds ? 0 : 1;
}

int cmd_modified(const GlobalOpts &g, const std::string &method_arg, const std::string &out) {
    const Catalog cat = load_catalog(g);
    const Method method = method_from_arg(cat, method_arg);
    SeriesMap a(1, g.order, SeriesFlavor::integrator);
    if (const auto *tab = std::get_if<ButcherTableau>(&method.impl))
        a = integrator_series(*tab, g.order);
    else if (const auto *ext = std::get_if<ExtTableau>(&method.impl))
        a = ext_integrator_series(*ext, g.order);
    else
        a = exact_flow_series(g.order);
    const SeriesMap b = modified_field_series(a);
    const Json j = series_to_json(b);
    if (!out.empty())
        save_json(out, j);
    if (json_output(g)) {
        emit(j);
    } else {
        std::cout << "modified vector field of " << method.name << " through order " << g.order
                  << ":\n";
        for (const auto &[tau, c] : b.coefficients())
            if (c != 0)
                std::cout << "  " << format_tree(tau) << " : " << rat_str(c) << "\n";
    }
    return 0;
}

RationalPoint parse_point(const std::string &text, int dim) {
    RationalPoint p;
    std::size_t pos = 0;
    while (pos <= text.size() && !text.empty()) {
        std::size_t comma = text.find(',', pos);
        std::string piece =
            comma == std::string::npos ? text.substr(pos) : text.substr(pos, comma - pos);
        p.push_back(rat_parse(piece));
        if (comma == std::string::npos)
            break;
        pos = comma + 1;
    }
    if (p.empty())
        p.assign(dim, Rational(0));
    if (static_cast<int>(p.size()) != dim)
        throw std::invalid_argument("start point has " + std::to_string(p.size()) +
                                    " entries, expected " + std::to_string(dim));
    return p;
}

Json residual_report(const std::string &method, const DiagramResidual &r) {
    Json j = residual_to_json(r);
    j["method"] = method;
    return j;
}

void print_residual(const DiagramResidual &r) {
    if (r.mode == Mode::formal) {
        if (r.is_zero())
            std::cout << "residual identically zero through h^"
                      << (r.formal.empty() ? 0 : r.formal.front().trunc()) << "\n";
        else {
            std::cout << "residual first nonzero at h^" << r.first_nonzero_order << "\n";
            for (std::size_t i = 0; i < r.formal.size(); ++i) {
                std::cout << "  z" << (i + 1) << ":";
                for (int k = 0; k <= r.formal[i].trunc(); ++k)
                    std::cout << " " << rat_str(r.formal[i][k]);
                std::cout << "\n";
            }
        }
    } else {
        std::cout << "numeric residual magnitude " << r.magnitude << " (tol " << r.tol << ")\n";
    }
}

int cmd_verify(const GlobalOpts &g, const std::string &method_arg,
               const std::vector<std::string> &field_files, const std::string &observable_file,
               const std::string &mode, double h, const std::string &y0_text, int random_count,
               int random_dim, int random_degree) {
    const Catalog cat = load_catalog(g);
    const int order = static_cast<int>(g.order);
    bool all_zero = true;
    Json instances = Json::array();

    auto run_instance = [&](const PolyVectorField &f, const PolyMap &F, const RationalPoint &y0) {
        DiagramResidual r;
        const bool splitting = cat.splittings.count(method_arg) > 0;
        if (mode == "numeric") {
            std::vector<double> y0d;
            for (const Rational &x : y0)
                y0d.push_back(rat_double(x));
            if (splitting)
                throw std::invalid_argument("numeric verify expects a tableau method");
            r = fe_diagram_residual_numeric(method_from_arg(cat, method_arg), f, F, y0d, h);
        } else if (splitting) {
            // split f into components across parts: caller passed parts as files
            throw std::invalid_argument("pass one --field per part for splitting methods");
        } else {
            r = fe_diagram_residual(method_from_arg(cat, method_arg), f, F, y0, order);
        }
        all_zero = all_zero && r.is_zero();
        instances.push_back(residual_report(method_arg, r));
        if (!json_output(g))
            print_residual(r);
    };

    if (random_count > 0) {
        Rng rng(g.seed);
        for (int i = 0; i < random_count; ++i) {
            PolyVectorField f = random_field(rng, random_dim, random_degree, 4);
            PolyMap F = random_map(rng, random_dim, 1, 2, 4);
            RationalPoint y0 = random_point(rng, random_dim);
            run_instance(f, F, y0);
        }
    } else if (cat.splittings.count(method_arg) > 0 && mode == "formal") {
        std::vector<PolyVectorField> parts;
        for (const std::string &file : field_files)
            parts.push_back(field_from_json(load_json(file)));
        if (parts.empty())
            throw std::invalid_argument("splitting verify needs at least one --field");
        const PolyMap F = map_from_json(load_json(observable_file));
        const RationalPoint y0 = parse_point(y0_text, parts.front().dim);
        DiagramResidual r =
            fe_diagram_residual_additive(find_splitting(cat, method_arg), parts, F, y0, order);
        all_zero = r.is_zero();
        instances.push_back(residual_report(method_arg, r));
        if (!json_output(g))
            print_residual(r);
    } else {
        if (field_files.size() != 1)
            throw std::invalid_argument("expected exactly one --field for tableau methods");
        const PolyVectorField f = field_from_json(load_json(field_files.front()));
        const PolyMap F = map_from_json(load_json(observable_file));
        const RationalPoint y0 = parse_point(y0_text, f.dim);
        run_instance(f, F, y0);
    }

    if (json_output(g)) {
        Json j;
        j["schema"] = "feq.verify/1";
        j["method"] = method_arg;
        j["mode"] = mode;
        j["order"] = g.order;
        j["seed"] = g.seed;
        j["all_zero"] = all_zero;
        j["instances"] = std::move(instances);
        emit(j);
    }
    return all_zero ? 0 : 1;
}

int cmd_witness(const GlobalOpts &g, const std::string &u_text, const std::string &v_text,
                const std::string &prefix) {
    const Tree u = parse_tree(u_text);
    const Tree v = parse_tree(v_text);
    const WitnessPair w = witness_pair(u, v);
    if (!prefix.empty()) {
        save_json(prefix + "-field.json", field_to_json(w.field));
        save_json(prefix + "-observable.json", map_to_json(w.observable));
    }
    const int n = w.field.dim;
    const RationalPoint origin(n, Rational(0));
    const DerivativeForm hessian(w.observable, 2);
    const RationalPoint uf = elementary_differential(u, w.field, origin);
    const RationalPoint vf = elementary_differential(v, w.field, origin);
    std::vector<RationalPoint> dirs{uf, vf};
    const Rational value = hessian(origin, dirs)[0];

    if (json_output(g)) {
        Json j;
        j["schema"] = "feq.witness/1";
        j["u"] = format_tree(u);
        j["v"] = format_tree(v);
        j["dimension"] = n;
        j["sigma_u"] = symmetry(u).get_str();
        j["sigma_v"] = symmetry(v).get_str();
        j["hessian_value"] = rational_to_json(value);
        j["field"] = field_to_json(w.field);
        j["observable"] = map_to_json(w.observable);
        emit(j);
    } else {
        std::cout << "witness pair for u=" << format_tree(u) << ", v=" << format_tree(v)
                  << " on dimension " << n << "\n";
        std::cout << "sigma(u) = " << symmetry(u).get_str()
                  << ", sigma(v) = " << symmetry(v).get_str() << "\n";
        std::cout << "F''(u(f), v(f))(0) = " << rat_str(value) << "\n";
        if (!prefix.empty())
            std::cout << "wrote " << prefix << "-field.json and " << prefix
                      << "-observable.json\n";
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    GlobalOpts g;
    CLI::App app{"exact checks of functional equivariance and invariant preservation for "
                 "B-series, NB-series, and P-series integrator maps"};
    app.fallthrough();
    app.add_option("--order", g.order, "truncation / expansion order")->capture_default_str();
    app.add_option("--colors", g.colors, "number of vertex colors")->capture_default_str();
    app.add_option("--seed", g.seed, "seed for random instances")->capture_default_str();
    app.add_option("--format", g.format, "output format: text or json")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    app.add_option("--budget", g.budget, "monomial budget for symbolic expansion")
        ->capture_default_str();
    app.add_option("--catalog", g.catalog_file, "extra method catalog file (feq.methods/1)");
    bool list = false;
    app.add_flag("--list", list, "list the method catalog and exit");

    auto *trees = app.add_subcommand("trees", "enumerate rooted trees with symmetry coefficients");

    auto *check = app.add_subcommand("check", "run a coefficient condition on a series file");
    std::string check_file, check_which = "qfe";
    bool all_pairs = false;
    check->add_option("file", check_file, "series JSON file")->required();
    check->add_option("--which", check_which, "qfe, nb-affine, or p-qfe")
        ->check(CLI::IsMember({"qfe", "nb-affine", "p-qfe"}));
    check->add_flag("--all-pairs", all_pairs, "p-qfe: also check pairs with equal root colors");

    auto *modified = app.add_subcommand("modified", "modified vector field of a method");
    std::string mod_method, mod_out;
    modified->add_option("method", mod_method, "catalog name or tableau JSON file")->required();
    modified->add_option("-o,--out", mod_out, "write the series to this file");

    auto *verify = app.add_subcommand("verify", "observable-diagram commutation residual");
    std::string ver_method, ver_obs, ver_mode = "formal", ver_y0;
    std::vector<std::string> ver_fields;
    double ver_h = 1e-3;
    int ver_random = 0, ver_dim = 2, ver_degree = 2;
    verify->add_option("--method", ver_method, "catalog name, splitting name, or tableau file")
        ->required();
    verify->add_option("--field", ver_fields, "vector field file (repeat per splitting part)");
    verify->add_option("--observable", ver_obs, "observable map file");
    verify->add_option("--mode", ver_mode, "formal or numeric")
        ->check(CLI::IsMember({"formal", "numeric"}));
    verify->add_option("--step-size", ver_h, "step size (numeric mode)")->capture_default_str();
    verify->add_option("--y0", ver_y0, "start point, comma-separated rationals (default 0)");
    verify->add_option("--random", ver_random, "verify this many random (f, F, y0) instances");
    verify->add_option("--dim", ver_dim, "dimension for random instances")->capture_default_str();
    verify->add_option("--degree", ver_degree, "degree for random fields")->capture_default_str();

    auto *witness = app.add_subcommand("witness", "witness field and observable for a tree pair");
    std::string wit_u, wit_v, wit_prefix;
    witness->add_option("u", wit_u, "first tree (bracket notation)")->required();
    witness->add_option("v", wit_v, "second tree (bracket notation)")->required();
    witness->add_option("--out-prefix", wit_prefix, "write <prefix>-field.json and "
                                                    "<prefix>-observable.json");

    app.require_subcommand(0, 1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        limits::set_monomial_budget(g.budget);
        if (list) {
            const Catalog cat = load_catalog(g);
            std::cout << "methods:";
            for (const auto &[name, _] : cat.methods)
                std::cout << " " << name;
            std::cout << "\nsplittings:";
            for (const auto &[name, _] : cat.splittings)
                std::cout << " " << name;
            std::cout << "\n";
            return 0;
        }
        if (trees->parsed())
            return cmd_trees(g);
        if (check->parsed())
            return cmd_check(g, check_file, check_which, all_pairs);
        if (modified->parsed())
            return cmd_modified(g, mod_method, mod_out);
        if (verify->parsed())
            return cmd_verify(g, ver_method, ver_fields, ver_obs, ver_mode, ver_h, ver_y0,
                              ver_random, ver_dim, ver_degree);
        if (witness->parsed())
            return cmd_witness(g, wit_u, wit_v, wit_prefix);
        std::cout << app.help();
        return 0;
    } catch (const feq::ParseError &e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const feq::BudgetExceeded &e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument &e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
