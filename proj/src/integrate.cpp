#include "feq/integrate.hpp"

#include "feq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace feq {

std::vector<Poly> symbolic_point(int dim) {
    std::vector<Poly> y0;
    y0.reserve(dim);
    for (int i = 0; i < dim; ++i)
        y0.push_back(Poly::variable(dim, i));
    return y0;
}

std::vector<Poly> constant_point(std::span<const Rational> point) {
    std::vector<Poly> y0;
    y0.reserve(point.size());
    for (const Rational &x : point)
        y0.push_back(Poly::constant(0, x));
    return y0;
}

std::vector<Poly> state_order_coeffs(const FormalState &state, int k) {
    std::vector<Poly> out;
    out.reserve(state.size());
    for (const auto &s : state)
        out.push_back(s[k]);
    return out;
}

std::vector<HSeries<Rational>> state_to_rational(const FormalState &state) {
    std::vector<HSeries<Rational>> out;
    out.reserve(state.size());
    for (const auto &s : state) {
        HSeries<Rational> r(s.trunc(), Rational(0));
        for (int k = 0; k <= s.trunc(); ++k) {
            const Poly &p = s[k];
            if (p.nvars() != 0)
                throw std::invalid_argument("state still depends on symbolic variables");
            r[k] = p.eval_rational(std::span<const Rational>{});
        }
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

int ambient_vars(std::span<const Poly> y0) {
    if (y0.empty())
        throw std::invalid_argument("empty start point");
    for (const Poly &p : y0)
        if (p.nvars() != y0.front().nvars())
            throw std::invalid_argument("start point components live in different spaces");
    return y0.front().nvars();
}

HSeries<Poly> one_series(int ambient, int order) {
    HSeries<Poly> one(order, Poly(ambient));
    one[0] = Poly::constant(ambient, Rational(1));
    return one;
}

FormalState state_from_point(std::span<const Poly> y0, int order) {
    const int ambient = ambient_vars(y0);
    FormalState state;
    state.reserve(y0.size());
    for (const Poly &p : y0) {
        HSeries<Poly> s(order, Poly(ambient));
        s[0] = p;
        state.push_back(std::move(s));
    }
    return state;
}

/// f evaluated componentwise at an h-series state.
FormalState eval_field(const PolyVectorField &f, const FormalState &state) {
    if (static_cast<int>(state.size()) != f.dim)
        throw std::invalid_argument("state dimension does not match the field");
    const int ambient = state.front()[0].nvars();
    const int order = state.front().trunc();
    const HSeries<Poly> one = one_series(ambient, order);
    FormalState out;
    out.reserve(f.comps.size());
    for (const Poly &comp : f.comps)
        out.push_back(comp.eval<HSeries<Poly>>(state, one));
    return out;
}

HSeries<Poly> series_coeff_derivative(const HSeries<Poly> &s, int var) {
    HSeries<Poly> out = s;
    for (int k = 0; k <= s.trunc(); ++k)
        out[k] = s[k].derivative(var);
    return out;
}

Rational rational_pow(const Rational &x, int m) {
    Rational acc(1);
    for (int i = 0; i < m; ++i)
        acc *= x;
    return acc;
}

Rational inv_factorial(int m) {
    Rational f(1);
    for (int i = 2; i <= m; ++i)
        f *= Rational(i);
    return Rational(1) / f;
}

} // namespace

FormalState rk_step_formal(const ButcherTableau &tab, const PolyVectorField &f,
                           std::span<const Poly> y0, int order) {
    if (order < 1)
        throw std::invalid_argument("expansion order must be >= 1");
    if (static_cast<int>(y0.size()) != f.dim)
        throw std::invalid_argument("start point dimension does not match the field");
    const FormalState start = state_from_point(y0, order);

    // stage derivatives K_i = f(y0 + h sum_j A_ij K_j); each fixed-point round
    // settles one more power of h, so `order` rounds are exact
    const int ambient = start.front()[0].nvars();
    std::vector<FormalState> K(tab.stages,
                               FormalState(f.dim, HSeries<Poly>(order, Poly(ambient))));
    for (int round = 0; round < order; ++round) {
        std::vector<FormalState> next;
        next.reserve(tab.stages);
        for (int i = 0; i < tab.stages; ++i) {
            FormalState Yi = start;
            for (int j = 0; j < tab.stages; ++j) {
                if (tab.A[i][j] == 0)
                    continue;
                for (int k = 0; k < f.dim; ++k)
                    Yi[k] += coeff_mul(K[j][k], tab.A[i][j]).shifted(1);
            }
            next.push_back(eval_field(f, Yi));
        }
        K = std::move(next);
    }

    FormalState y1 = start;
    for (int i = 0; i < tab.stages; ++i) {
        if (tab.b[i] == 0)
            continue;
        for (int k = 0; k < f.dim; ++k)
            y1[k] += coeff_mul(K[i][k], tab.b[i]).shifted(1);
    }
    return y1;
}

FormalState bseries_step_formal(const SeriesMap &integrator, const PolyVectorField &f,
                                std::span<const Poly> y0, int order) {
    if (integrator.flavor() != SeriesFlavor::integrator)
        throw std::invalid_argument("expected an integrator-flavor series");
    if (integrator.colors() != 1)
        throw std::invalid_argument("expected a 1-color series");
    if (integrator.truncation_order() < static_cast<std::size_t>(order))
        throw std::invalid_argument("series truncation is below the requested order");
    if (static_cast<int>(y0.size()) != f.dim)
        throw std::invalid_argument("start point dimension does not match the field");
    const int ambient = ambient_vars(y0);
    const Poly one = Poly::constant(ambient, Rational(1));

    FormalState y1 = state_from_point(y0, order);
    for (int j = 1; j <= order; ++j) {
        PolyVectorField term = series_order_term_field(integrator, j, f);
        for (int k = 0; k < f.dim; ++k)
            if (!term.comps[k].is_zero())
                y1[k][j] += term.comps[k].eval<Poly>(y0, one);
    }
    return y1;
}

std::vector<PolyVectorField> lie_taylor_fields(const PolyVectorField &g, int count) {
    std::vector<PolyVectorField> B;
    B.reserve(count + 1);
    std::vector<Poly> id;
    for (int i = 0; i < g.dim; ++i)
        id.push_back(Poly::variable(g.dim, i));
    B.emplace_back(g.dim, std::move(id));
    std::vector<std::vector<Poly>> dir{g.comps};
    for (int m = 1; m <= count; ++m) {
        std::vector<Poly> comps;
        comps.reserve(g.dim);
        for (int i = 0; i < g.dim; ++i)
            comps.push_back(apply_derivative(B.back().comps[i], dir, g.dim));
        B.emplace_back(g.dim, std::move(comps));
    }
    return B;
}

FormalState flow_formal(std::span<const PolyVectorField> fields, std::span<const Poly> y0,
                        int order) {
    if (fields.empty())
        throw std::invalid_argument("need at least the base field");
    const int d = fields.front().dim;
    for (const PolyVectorField &fk : fields)
        if (fk.dim != d)
            throw std::invalid_argument("field terms have mismatched dimensions");
    if (static_cast<int>(y0.size()) != d)
        throw std::invalid_argument("start point dimension does not match the field");
    if (order < 0)
        throw std::invalid_argument("expansion order must be >= 0");

    // The h-dependent field in its own x-space.
    FormalState ftilde;
    ftilde.reserve(d);
    for (int i = 0; i < d; ++i) {
        HSeries<Poly> s(order, Poly(d));
        for (int k = 0; k <= order && k < static_cast<int>(fields.size()); ++k)
            s[k] = fields[k].comps[i];
        ftilde.push_back(std::move(s));
    }

    // A_0 = id; A_{m+1} = (Jacobian of A_m) ftilde. The flow for time h is
    // sum_m h^m/m! A_m, each term shifted by its own h power.
    FormalState A;
    A.reserve(d);
    for (int i = 0; i < d; ++i) {
        HSeries<Poly> s(order, Poly(d));
        s[0] = Poly::variable(d, i);
        A.push_back(std::move(s));
    }
    FormalState exp_series = A;
    for (int m = 1; m <= order; ++m) {
        FormalState next;
        next.reserve(d);
        for (int i = 0; i < d; ++i) {
            HSeries<Poly> acc(order, Poly(d));
            for (int j = 0; j < d; ++j) {
                if (ftilde[j].is_zero())
                    continue;
                acc += series_coeff_derivative(A[i], j) * ftilde[j];
            }
            next.push_back(std::move(acc));
        }
        A = std::move(next);
        const Rational w = inv_factorial(m);
        for (int i = 0; i < d; ++i)
            exp_series[i] += coeff_mul(A[i], w).shifted(m);
    }

    // Substitute the start point for the x variables.
    const int ambient = ambient_vars(y0);
    const Poly one = Poly::constant(ambient, Rational(1));
    FormalState out;
    out.reserve(d);
    for (int i = 0; i < d; ++i) {
        HSeries<Poly> s(order, Poly(ambient));
        for (int k = 0; k <= order; ++k)
            s[k] = exp_series[i][k].eval<Poly>(y0, one);
        out.push_back(std::move(s));
    }
    return out;
}

FormalState flow_formal(const PolyVectorField &f, std::span<const Poly> y0, int order) {
    return flow_formal(std::span(&f, 1), y0, order);
}

SplittingScheme::SplittingScheme(int parts, std::vector<Stage> stages)
    : parts(parts), stages(std::move(stages)) {
    if (parts < 1)
        throw std::invalid_argument("need at least one part");
    for (const Stage &s : this->stages)
        if (s.part < 1 || s.part > parts)
            throw std::invalid_argument("stage part index outside [1, parts]");
}

bool SplittingScheme::is_consistent() const {
    std::vector<Rational> sums(parts, Rational(0));
    for (const Stage &s : stages)
        sums[s.part - 1] += s.coeff;
    for (const Rational &s : sums)
        if (s != 1)
            return false;
    return true;
}

FormalState splitting_step_formal(const SplittingScheme &scheme,
                                  std::span<const PolyVectorField> parts,
                                  std::span<const Poly> y0, int order) {
    if (static_cast<int>(parts.size()) != scheme.parts)
        throw std::invalid_argument("part count does not match the scheme");
    const int d = parts.empty() ? 0 : parts.front().dim;
    for (const PolyVectorField &p : parts)
        if (p.dim != d)
            throw std::invalid_argument("part fields have mismatched dimensions");
    if (static_cast<int>(y0.size()) != d)
        throw std::invalid_argument("start point dimension does not match the fields");

    std::vector<std::vector<PolyVectorField>> taylor;
    taylor.reserve(parts.size());
    for (const PolyVectorField &p : parts)
        taylor.push_back(lie_taylor_fields(p, order));

    const int ambient = ambient_vars(y0);
    FormalState state = state_from_point(y0, order);
    const HSeries<Poly> one = one_series(ambient, order);
    for (const SplittingScheme::Stage &stage : scheme.stages) {
        const auto &B = taylor[stage.part - 1];
        FormalState next(d, HSeries<Poly>(order, Poly(ambient)));
        for (int m = 0; m <= order; ++m) {
            const Rational w = rational_pow(stage.coeff, m) * inv_factorial(m);
            if (w == 0)
                continue;
            for (int i = 0; i < d; ++i) {
                if (B[m].comps[i].is_zero())
                    continue;
                HSeries<Poly> val = B[m].comps[i].eval<HSeries<Poly>>(state, one);
                next[i] += coeff_mul(val, w).shifted(m);
            }
        }
        state = std::move(next);
    }
    return state;
}

PartitionedMethod::PartitionedMethod(std::vector<ButcherTableau> tableaux, PartitionSpec partition)
    : tableaux(std::move(tableaux)), partition(std::move(partition)) {
    if (this->tableaux.empty())
        throw std::invalid_argument("need at least one tableau");
    if (static_cast<int>(this->tableaux.size()) != this->partition.blocks())
        throw std::invalid_argument("one tableau per partition block required");
    for (const ButcherTableau &t : this->tableaux)
        if (t.stages != this->tableaux.front().stages)
            throw std::invalid_argument("partitioned tableaux must share the stage count");
}

FormalState partitioned_step_formal(const PartitionedMethod &method, const PolyVectorField &f,
                                    std::span<const Poly> y0, int order) {
    if (method.partition.dim() != f.dim)
        throw std::invalid_argument("partition does not cover the field's space");
    if (static_cast<int>(y0.size()) != f.dim)
        throw std::invalid_argument("start point dimension does not match the field");
    if (order < 1)
        throw std::invalid_argument("expansion order must be >= 1");
    const int stages = method.tableaux.front().stages;
    const int ambient = ambient_vars(y0);
    const FormalState start = state_from_point(y0, order);

    std::vector<int> block(f.dim);
    for (int k = 0; k < f.dim; ++k)
        block[k] = method.partition.block_of(k);

    std::vector<FormalState> K(stages, FormalState(f.dim, HSeries<Poly>(order, Poly(ambient))));
    for (int round = 0; round < order; ++round) {
        std::vector<FormalState> next;
        next.reserve(stages);
        for (int i = 0; i < stages; ++i) {
            FormalState Yi = start;
            for (int j = 0; j < stages; ++j)
                for (int k = 0; k < f.dim; ++k) {
                    const Rational &a = method.tableaux[block[k]].A[i][j];
                    if (a != 0)
                        Yi[k] += coeff_mul(K[j][k], a).shifted(1);
                }
            next.push_back(eval_field(f, Yi));
        }
        K = std::move(next);
    }

    FormalState y1 = start;
    for (int i = 0; i < stages; ++i)
        for (int k = 0; k < f.dim; ++k) {
            const Rational &bi = method.tableaux[block[k]].b[i];
            if (bi != 0)
                y1[k] += coeff_mul(K[i][k], bi).shifted(1);
        }
    return y1;
}

FormalState method_step_formal(const Method &method, const PolyVectorField &f,
                               std::span<const Poly> y0, int order) {
    if (const auto *tab = std::get_if<ButcherTableau>(&method.impl))
        return rk_step_formal(*tab, f, y0, order);
    if (const auto *ext = std::get_if<ExtTableau>(&method.impl))
        return bseries_step_formal(ext_integrator_series(*ext, order), f, y0, order);
    return flow_formal(f, y0, order);
}

std::vector<PolyVectorField> modified_field_polynomials(const FormalStepFn &step,
                                                        const PolyVectorField &f, int order) {
    if (order < 1)
        throw std::invalid_argument("expansion order must be >= 1");
    const std::vector<Poly> y0 = symbolic_point(f.dim);
    const FormalState S = step(y0, order);
    if (static_cast<int>(S.size()) != f.dim)
        throw std::invalid_argument("step dimension does not match the field");
    for (int i = 0; i < f.dim; ++i) {
        if (!(S[i][0] == y0[i]))
            throw std::invalid_argument("method is not a one-step map (h^0 term is not id)");
        if (!(S[i][1] == f.comps[i]))
            throw std::invalid_argument("method is not consistent (h^1 term is not f)");
    }

    std::vector<PolyVectorField> terms{f};
    for (int j = 2; j <= order; ++j) {
        const FormalState T = flow_formal(terms, y0, j);
        std::vector<Poly> comps;
        comps.reserve(f.dim);
        for (int i = 0; i < f.dim; ++i)
            comps.push_back(S[i][j] - T[i][j]);
        terms.emplace_back(f.dim, std::move(comps));
    }
    terms.erase(terms.begin());
    return terms;
}

std::vector<PolyVectorField> modified_field_polynomials(const Method &method,
                                                        const PolyVectorField &f, int order) {
    return modified_field_polynomials(
        [&](std::span<const Poly> y0, int n) { return method_step_formal(method, f, y0, n); }, f,
        order);
}

std::vector<PolyVectorField> splitting_modified_field(const SplittingScheme &scheme,
                                                      std::span<const PolyVectorField> parts,
                                                      int order) {
    if (parts.empty())
        throw std::invalid_argument("need at least one part field");
    if (!scheme.is_consistent())
        throw std::invalid_argument("splitting scheme is not consistent");
    PolyVectorField total = parts.front();
    for (std::size_t nu = 1; nu < parts.size(); ++nu)
        total = total + parts[nu];
    return modified_field_polynomials(
        [&](std::span<const Poly> y0, int n) {
            return splitting_step_formal(scheme, parts, y0, n);
        },
        total, order);
}

bool DiagramResidual::is_zero() const {
    if (mode == Mode::formal)
        return first_nonzero_order == -1;
    return magnitude <= tol; // numeric zero means "within the solve tolerance"
}

namespace {

std::vector<HSeries<Poly>> diagram_defect(const FormalState &base, const FormalState &aug,
                                          const PolyMap &F, int order) {
    const int d = F.dim_in;
    const int ambient = base.front()[0].nvars();
    const HSeries<Poly> one = one_series(ambient, order);
    std::vector<HSeries<Poly>> defect;
    defect.reserve(F.dim_out);
    for (int i = 0; i < F.dim_out; ++i) {
        HSeries<Poly> lhs = F.comps[i].eval<HSeries<Poly>>(std::span(base.data(), d), one);
        defect.push_back(lhs - aug[d + i]);
    }
    return defect;
}

DiagramResidual residual_from_defect(std::vector<HSeries<Poly>> defect) {
    DiagramResidual r;
    r.mode = Mode::formal;
    FormalState state = std::move(defect);
    r.formal = state_to_rational(state);
    for (const auto &s : r.formal) {
        int k = s.first_nonzero_order();
        if (k >= 0 && (r.first_nonzero_order < 0 || k < r.first_nonzero_order))
            r.first_nonzero_order = k;
    }
    return r;
}

std::vector<Poly> augmented_start(std::span<const Poly> y0, const PolyMap &F) {
    const int ambient = ambient_vars(y0);
    const Poly one = Poly::constant(ambient, Rational(1));
    std::vector<Poly> start(y0.begin(), y0.end());
    for (const Poly &Fi : F.comps)
        start.push_back(Fi.eval<Poly>(y0, one));
    return start;
}

} // namespace

std::vector<HSeries<Poly>> fe_diagram_defect_symbolic(const Method &method,
                                                      const PolyVectorField &f, const PolyMap &F,
                                                      int order) {
    if (F.dim_in != f.dim)
        throw std::invalid_argument("observable input dimension does not match the field");
    const std::vector<Poly> y0 = symbolic_point(f.dim);
    const FormalState base = method_step_formal(method, f, y0, order);
    const PolyVectorField g = augment(f, F);
    const FormalState aug = method_step_formal(method, g, augmented_start(y0, F), order);
    return diagram_defect(base, aug, F, order);
}

DiagramResidual fe_diagram_residual(const Method &method, const PolyVectorField &f,
                                    const PolyMap &F, const RationalPoint &y0, int order) {
    if (F.dim_in != f.dim)
        throw std::invalid_argument("observable input dimension does not match the field");
    if (static_cast<int>(y0.size()) != f.dim)
        throw std::invalid_argument("start point dimension does not match the field");
    const std::vector<Poly> start = constant_point(y0);
    const FormalState base = method_step_formal(method, f, start, order);
    const PolyVectorField g = augment(f, F);
    const FormalState aug = method_step_formal(method, g, augmented_start(start, F), order);
    return residual_from_defect(diagram_defect(base, aug, F, order));
}

std::vector<HSeries<Poly>>
fe_diagram_defect_additive_symbolic(const SplittingScheme &scheme,
                                    std::span<const PolyVectorField> parts, const PolyMap &F,
                                    int order) {
    if (parts.empty())
        throw std::invalid_argument("need at least one part field");
    const int d = parts.front().dim;
    if (F.dim_in != d)
        throw std::invalid_argument("observable input dimension does not match the fields");
    const std::vector<Poly> y0 = symbolic_point(d);
    const FormalState base = splitting_step_formal(scheme, parts, y0, order);
    std::vector<PolyVectorField> aug_parts;
    aug_parts.reserve(parts.size());
    for (const PolyVectorField &p : parts)
        aug_parts.push_back(augment(p, F));
    const FormalState aug =
        splitting_step_formal(scheme, aug_parts, augmented_start(y0, F), order);
    return diagram_defect(base, aug, F, order);
}

DiagramResidual fe_diagram_residual_additive(const SplittingScheme &scheme,
                                             std::span<const PolyVectorField> parts,
                                             const PolyMap &F, const RationalPoint &y0,
                                             int order) {
    if (parts.empty())
        throw std::invalid_argument("need at least one part field");
    const int d = parts.front().dim;
    if (F.dim_in != d || static_cast<int>(y0.size()) != d)
        throw std::invalid_argument("dimension mismatch in the additive diagram");
    const std::vector<Poly> start = constant_point(y0);
    const FormalState base = splitting_step_formal(scheme, parts, start, order);
    std::vector<PolyVectorField> aug_parts;
    aug_parts.reserve(parts.size());
    for (const PolyVectorField &p : parts)
        aug_parts.push_back(augment(p, F));
    const FormalState aug =
        splitting_step_formal(scheme, aug_parts, augmented_start(start, F), order);
    return residual_from_defect(diagram_defect(base, aug, F, order));
}

ClosureReport check_closure_under_differentiation(const SeriesMap &phi, const PolyVectorField &f,
                                                  int order) {
    if (phi.colors() != 1)
        throw std::invalid_argument("closure check expects a 1-color series");
    const PolyVectorField lifted = tangent_lift(f);
    PolyVectorField lhs = PolyVectorField::zero(lifted.dim);
    PolyVectorField rhs_inner = PolyVectorField::zero(f.dim);
    for (const auto &[tau, c] : phi.coefficients()) {
        if (c == 0 || tau.order() > static_cast<std::size_t>(order))
            continue;
        lhs = lhs + c * elementary_differential_field(tau, lifted);
        rhs_inner = rhs_inner + c * elementary_differential_field(tau, f);
    }
    ClosureReport report;
    report.defect = lhs - tangent_lift(rhs_inner);
    report.closed = report.defect.is_zero();
    return report;
}

PolyVectorField hamiltonian_field(const Poly &H) {
    const int n = H.nvars();
    if (n % 2 != 0)
        throw std::invalid_argument("Hamiltonian needs an even-dimensional (q, p) space");
    const int m = n / 2;
    std::vector<Poly> comps;
    comps.reserve(n);
    for (int i = 0; i < m; ++i)
        comps.push_back(H.derivative(m + i)); // dq/dt = dH/dp
    for (int i = 0; i < m; ++i)
        comps.push_back(-H.derivative(i)); // dp/dt = -dH/dq
    return PolyVectorField(n, std::move(comps));
}

PolyMap canonical_omega(int dim) {
    if (dim % 2 != 0)
        throw std::invalid_argument("canonical form needs an even dimension");
    const int m = dim / 2, n = 2 * dim;
    Poly w(n);
    for (int i = 0; i < m; ++i) {
        w += Poly::variable(n, i) * Poly::variable(n, dim + m + i);       // xi_q eta_p
        w -= Poly::variable(n, m + i) * Poly::variable(n, dim + i);       // xi_p eta_q
    }
    return PolyMap(n, 1, {std::move(w)});
}

SymplecticReport check_symplectic_modified(const Method &method, const Poly &hamiltonian,
                                           int order,
                                           std::span<const RationalPoint> sample_points) {
    const PolyVectorField f = hamiltonian_field(hamiltonian);
    const PolyMap omega = canonical_omega(f.dim);
    std::vector<PolyVectorField> terms{f};
    for (PolyVectorField &fj : modified_field_polynomials(method, f, order))
        terms.push_back(std::move(fj));

    SymplecticReport report;
    for (int j = 1; j <= order; ++j) {
        SymplecticOrderResult res;
        res.order_j = j;
        const PolyVectorField lifted = bilinear_observable_augment(terms[j - 1], omega);
        res.defect = lifted.comps.back(); // the (L_{f_j} omega)(xi, eta) block
        res.pass = res.defect.is_zero();
        for (const RationalPoint &pt : sample_points) {
            if (static_cast<int>(pt.size()) != 3 * f.dim)
                throw std::invalid_argument("sample points live in (y, xi, eta)-space");
            RationalPoint full = pt; // z slot unused by the defect
            full.resize(lifted.dim, Rational(0));
            res.sample_values.push_back(res.defect.eval_rational(full));
        }
        if (!res.pass)
            report.all_pass = false;
        report.orders.push_back(std::move(res));
    }
    return report;
}

RigidityReport check_exact_flow_rigidity(const SplittingScheme &scheme,
                                         std::span<const PolyVectorField> parts, const PolyMap &A,
                                         int order) {
    if (parts.empty())
        throw std::invalid_argument("need at least one part field");
    const int d = parts.front().dim;
    if (A.dim_in != d)
        throw std::invalid_argument("invariant input dimension does not match the fields");
    if (A.degree() > 1)
        throw std::invalid_argument("the invariant must be affine");
    PolyVectorField total = parts.front();
    for (std::size_t nu = 1; nu < parts.size(); ++nu)
        total = total + parts[nu];

    auto a_prime = [&](const PolyVectorField &g) {
        std::vector<std::vector<Poly>> dir{g.comps};
        std::vector<Poly> out;
        out.reserve(A.comps.size());
        for (const Poly &Ai : A.comps)
            out.push_back(apply_derivative(Ai, dir, d));
        return out;
    };
    for (const Poly &p : a_prime(total))
        if (!p.is_zero())
            throw std::invalid_argument("A is not an invariant of the summed field");

    RigidityReport report;
    const std::vector<PolyVectorField> terms = splitting_modified_field(scheme, parts, order);
    for (std::size_t j = 0; j < terms.size(); ++j) {
        std::vector<Poly> derived = a_prime(terms[j]);
        bool zero = true;
        for (const Poly &p : derived)
            if (!p.is_zero())
                zero = false;
        if (!zero) {
            report.exact_through = false;
            report.first_violation_order = static_cast<int>(j) + 2;
            report.violating_derivative = std::move(derived);
            break;
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// numeric mode
// ---------------------------------------------------------------------------

namespace {

struct DoubleTableau {
    int stages;
    std::vector<std::vector<double>> A;
    std::vector<double> b;
};

double quadext_double(const QuadExt &x) {
    return rat_double(x.rat) + rat_double(x.irr) * std::sqrt(static_cast<double>(x.root));
}

DoubleTableau to_double(const ButcherTableau &tab) {
    DoubleTableau d{tab.stages, {}, {}};
    for (const auto &row : tab.A) {
        std::vector<double> r;
        for (const Rational &a : row)
            r.push_back(rat_double(a));
        d.A.push_back(std::move(r));
    }
    for (const Rational &x : tab.b)
        d.b.push_back(rat_double(x));
    return d;
}

DoubleTableau to_double(const ExtTableau &tab) {
    DoubleTableau d{tab.stages, {}, {}};
    for (const auto &row : tab.A) {
        std::vector<double> r;
        for (const QuadExt &a : row)
            r.push_back(quadext_double(a));
        d.A.push_back(std::move(r));
    }
    for (const QuadExt &x : tab.b)
        d.b.push_back(quadext_double(x));
    return d;
}

using DenseMatrix = std::vector<std::vector<double>>;
using JacobianFn = std::function<DenseMatrix(const std::vector<double> &)>;

std::vector<double> solve_dense(DenseMatrix M, std::vector<double> rhs) {
    const int n = static_cast<int>(rhs.size());
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(M[r][col]) > std::abs(M[pivot][col]))
                pivot = r;
        if (M[pivot][col] == 0.0)
            throw ConvergenceFailure("singular Newton matrix", 0);
        std::swap(M[pivot], M[col]);
        std::swap(rhs[pivot], rhs[col]);
        for (int r = col + 1; r < n; ++r) {
            double factor = M[r][col] / M[col][col];
            if (factor == 0.0)
                continue;
            for (int c2 = col; c2 < n; ++c2)
                M[r][c2] -= factor * M[col][c2];
            rhs[r] -= factor * rhs[col];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double acc = rhs[r];
        for (int c2 = r + 1; c2 < n; ++c2)
            acc -= M[r][c2] * x[c2];
        x[r] = acc / M[r][r];
    }
    return x;
}

JacobianFn poly_jacobian(const PolyVectorField &f) {
    auto derivs = std::make_shared<std::vector<std::vector<Poly>>>();
    for (const Poly &comp : f.comps) {
        std::vector<Poly> row;
        for (int j = 0; j < f.dim; ++j)
            row.push_back(comp.derivative(j));
        derivs->push_back(std::move(row));
    }
    const int d = f.dim;
    return [derivs, d](const std::vector<double> &y) {
        DenseMatrix J(d, std::vector<double>(d));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                J[i][j] = (*derivs)[i][j].eval_double(y);
        return J;
    };
}

JacobianFn fd_jacobian(const NumericField &f, int dim) {
    return [f, dim](const std::vector<double> &y) {
        DenseMatrix J(dim, std::vector<double>(dim));
        const std::vector<double> base = f(y);
        for (int j = 0; j < dim; ++j) {
            double eps = 1e-8 * std::max(1.0, std::abs(y[j]));
            std::vector<double> yp = y;
            yp[j] += eps;
            std::vector<double> fp = f(yp);
            for (int i = 0; i < dim; ++i)
                J[i][j] = (fp[i] - base[i]) / eps;
        }
        return J;
    };
}

// Stage derivatives K_i = f(y + h sum_j A_ij K_j); fixed point with Newton
// fallback on the stacked system.
std::vector<std::vector<double>> solve_stages(const DoubleTableau &tab, const NumericField &f,
                                              const JacobianFn &jac, int dim,
                                              std::span<const double> y, double h,
                                              const NumericOptions &opts) {
    const int s = tab.stages;
    auto stage_state = [&](const std::vector<std::vector<double>> &K, int i) {
        std::vector<double> Yi(y.begin(), y.end());
        for (int j = 0; j < s; ++j)
            for (int k = 0; k < dim; ++k)
                Yi[k] += h * tab.A[i][j] * K[j][k];
        return Yi;
    };

    std::vector<std::vector<double>> K(s, std::vector<double>(dim, 0.0));
    for (int it = 0; it < opts.max_fixed_point; ++it) {
        double delta = 0.0;
        std::vector<std::vector<double>> next(s);
        for (int i = 0; i < s; ++i) {
            next[i] = f(stage_state(K, i));
            for (int k = 0; k < dim; ++k)
                delta = std::max(delta, std::abs(next[i][k] - K[i][k]));
        }
        K = std::move(next);
        if (delta <= opts.tol)
            return K;
    }

    // Newton on R(K) = K - f(Y(K))
    for (int it = 0; it < opts.max_newton; ++it) {
        std::vector<double> R(s * dim);
        double rnorm = 0.0;
        std::vector<DenseMatrix> Jf(s);
        for (int i = 0; i < s; ++i) {
            std::vector<double> Yi = stage_state(K, i);
            std::vector<double> fi = f(Yi);
            Jf[i] = jac(Yi);
            for (int k = 0; k < dim; ++k) {
                R[i * dim + k] = K[i][k] - fi[k];
                rnorm = std::max(rnorm, std::abs(R[i * dim + k]));
            }
        }
        if (rnorm <= opts.tol)
            return K;
        DenseMatrix M(s * dim, std::vector<double>(s * dim, 0.0));
        for (int i = 0; i < s; ++i)
            for (int k = 0; k < dim; ++k) {
                M[i * dim + k][i * dim + k] += 1.0;
                for (int j = 0; j < s; ++j)
                    for (int l = 0; l < dim; ++l)
                        M[i * dim + k][j * dim + l] -= h * tab.A[i][j] * Jf[i][k][l];
            }
        std::vector<double> step = solve_dense(std::move(M), std::move(R));
        for (int i = 0; i < s; ++i)
            for (int k = 0; k < dim; ++k)
                K[i][k] -= step[i * dim + k];
    }
    throw ConvergenceFailure("implicit stage equations did not converge",
                             opts.max_fixed_point + opts.max_newton);
}

std::vector<double> rk_step_numeric_impl(const DoubleTableau &tab, const NumericField &f,
                                         const JacobianFn &jac, int dim, std::span<const double> y,
                                         double h, const NumericOptions &opts) {
    auto K = solve_stages(tab, f, jac, dim, y, h, opts);
    std::vector<double> y1(y.begin(), y.end());
    for (int i = 0; i < tab.stages; ++i)
        for (int k = 0; k < dim; ++k)
            y1[k] += h * tab.b[i] * K[i][k];
    return y1;
}

std::vector<double> taylor_flow_numeric(const PolyVectorField &f, std::span<const double> y,
                                        double h, const NumericOptions &opts) {
    constexpr int kMaxTerms = 60;
    std::vector<double> acc(y.begin(), y.end());
    std::vector<std::vector<Poly>> dir{f.comps};
    PolyVectorField Bm = f; // Lie-Taylor terms built lazily; for small h only
                            // a handful are ever needed
    double hm = 1.0, mfact = 1.0;
    for (int m = 1; m <= kMaxTerms; ++m) {
        if (m > 1) {
            std::vector<Poly> comps;
            comps.reserve(f.dim);
            for (int i = 0; i < f.dim; ++i)
                comps.push_back(apply_derivative(Bm.comps[i], dir, f.dim));
            Bm = PolyVectorField(f.dim, std::move(comps));
        }
        hm *= h;
        mfact *= m;
        double scale = hm / mfact;
        double largest = 0.0;
        for (int i = 0; i < f.dim; ++i) {
            double term = scale * Bm.comps[i].eval_double(y);
            acc[i] += term;
            largest = std::max(largest, std::abs(term));
        }
        if (largest <= opts.tol)
            return acc;
    }
    throw ConvergenceFailure("Taylor flow did not reach the tolerance", kMaxTerms);
}

NumericField wrap_poly(const PolyVectorField &f) {
    return [f](const std::vector<double> &y) { return f.eval(std::span<const double>(y)); };
}

} // namespace

std::vector<double> step_numeric(const Method &method, const PolyVectorField &f,
                                 std::span<const double> y, double h, const NumericOptions &opts) {
    if (static_cast<int>(y.size()) != f.dim)
        throw std::invalid_argument("state dimension does not match the field");
    if (const auto *tab = std::get_if<ButcherTableau>(&method.impl))
        return rk_step_numeric_impl(to_double(*tab), wrap_poly(f), poly_jacobian(f), f.dim, y, h,
                                    opts);
    if (const auto *ext = std::get_if<ExtTableau>(&method.impl))
        return rk_step_numeric_impl(to_double(*ext), wrap_poly(f), poly_jacobian(f), f.dim, y, h,
                                    opts);
    return taylor_flow_numeric(f, y, h, opts);
}

std::vector<double> step_numeric(const Method &method, const NumericField &f, int dim,
                                 std::span<const double> y, double h, const NumericOptions &opts) {
    if (static_cast<int>(y.size()) != dim)
        throw std::invalid_argument("state dimension does not match the field");
    if (const auto *tab = std::get_if<ButcherTableau>(&method.impl))
        return rk_step_numeric_impl(to_double(*tab), f, fd_jacobian(f, dim), dim, y, h, opts);
    if (const auto *ext = std::get_if<ExtTableau>(&method.impl))
        return rk_step_numeric_impl(to_double(*ext), f, fd_jacobian(f, dim), dim, y, h, opts);
    throw std::invalid_argument("the exact-flow pseudo-method needs a polynomial field");
}

std::vector<double> splitting_step_numeric(const SplittingScheme &scheme,
                                           std::span<const PolyVectorField> parts,
                                           std::span<const double> y, double h,
                                           const NumericOptions &opts) {
    if (static_cast<int>(parts.size()) != scheme.parts)
        throw std::invalid_argument("part count does not match the scheme");
    std::vector<double> state(y.begin(), y.end());
    for (const SplittingScheme::Stage &stage : scheme.stages)
        state = taylor_flow_numeric(parts[stage.part - 1], state, rat_double(stage.coeff) * h,
                                    opts);
    return state;
}

std::vector<double> partitioned_step_numeric(const PartitionedMethod &method,
                                             const PolyVectorField &f, std::span<const double> y,
                                             double h, const NumericOptions &opts) {
    if (method.partition.dim() != f.dim || static_cast<int>(y.size()) != f.dim)
        throw std::invalid_argument("partitioned method does not match the field");
    const int s = method.tableaux.front().stages;
    const int dim = f.dim;
    std::vector<int> block(dim);
    for (int k = 0; k < dim; ++k)
        block[k] = method.partition.block_of(k);
    std::vector<DoubleTableau> tabs;
    for (const ButcherTableau &t : method.tableaux)
        tabs.push_back(to_double(t));

    auto stage_state = [&](const std::vector<std::vector<double>> &K, int i) {
        std::vector<double> Yi(y.begin(), y.end());
        for (int j = 0; j < s; ++j)
            for (int k = 0; k < dim; ++k)
                Yi[k] += h * tabs[block[k]].A[i][j] * K[j][k];
        return Yi;
    };

    std::vector<std::vector<double>> K(s, std::vector<double>(dim, 0.0));
    bool converged = false;
    for (int it = 0; it < opts.max_fixed_point && !converged; ++it) {
        double delta = 0.0;
        std::vector<std::vector<double>> next(s);
        for (int i = 0; i < s; ++i) {
            next[i] = f.eval(std::span<const double>(stage_state(K, i)));
            for (int k = 0; k < dim; ++k)
                delta = std::max(delta, std::abs(next[i][k] - K[i][k]));
        }
        K = std::move(next);
        converged = delta <= opts.tol;
    }
    if (!converged) {
        // Newton on the stacked stage system, block-aware in A
        const JacobianFn jac = poly_jacobian(f);
        for (int it = 0; it < opts.max_newton && !converged; ++it) {
            std::vector<double> R(s * dim);
            double rnorm = 0.0;
            std::vector<DenseMatrix> Jf(s);
            for (int i = 0; i < s; ++i) {
                std::vector<double> Yi = stage_state(K, i);
                std::vector<double> fi = f.eval(std::span<const double>(Yi));
                Jf[i] = jac(Yi);
                for (int k = 0; k < dim; ++k) {
                    R[i * dim + k] = K[i][k] - fi[k];
                    rnorm = std::max(rnorm, std::abs(R[i * dim + k]));
                }
            }
            if (rnorm <= opts.tol) {
                converged = true;
                break;
            }
            DenseMatrix M(s * dim, std::vector<double>(s * dim, 0.0));
            for (int i = 0; i < s; ++i)
                for (int k = 0; k < dim; ++k) {
                    M[i * dim + k][i * dim + k] += 1.0;
                    for (int j = 0; j < s; ++j)
                        for (int l = 0; l < dim; ++l)
                            M[i * dim + k][j * dim + l] -= h * tabs[block[l]].A[i][j] * Jf[i][k][l];
                }
            std::vector<double> step = solve_dense(std::move(M), std::move(R));
            for (int i = 0; i < s; ++i)
                for (int k = 0; k < dim; ++k)
                    K[i][k] -= step[i * dim + k];
        }
    }
    if (!converged)
        throw ConvergenceFailure("partitioned stage equations did not converge",
                                 opts.max_fixed_point + opts.max_newton);

    std::vector<double> y1(y.begin(), y.end());
    for (int i = 0; i < s; ++i)
        for (int k = 0; k < dim; ++k)
            y1[k] += h * tabs[block[k]].b[i] * K[i][k];
    return y1;
}

DiagramResidual fe_diagram_residual_numeric(const Method &method, const PolyVectorField &f,
                                            const PolyMap &F, std::span<const double> y0, double h,
                                            const NumericOptions &opts) {
    if (F.dim_in != f.dim || static_cast<int>(y0.size()) != f.dim)
        throw std::invalid_argument("dimension mismatch in the diagram");
    const std::vector<double> base = step_numeric(method, f, y0, h, opts);
    const PolyVectorField g = augment(f, F);
    std::vector<double> aug_start(y0.begin(), y0.end());
    for (const Poly &Fi : F.comps)
        aug_start.push_back(Fi.eval_double(y0));
    const std::vector<double> aug = step_numeric(method, g, aug_start, h, opts);

    DiagramResidual r;
    r.mode = Mode::numeric;
    r.tol = opts.tol;
    for (int i = 0; i < F.dim_out; ++i) {
        double lhs = F.comps[i].eval_double(base);
        double diff = lhs - aug[f.dim + i];
        r.numeric.push_back(diff);
        r.magnitude = std::max(r.magnitude, std::abs(diff));
    }
    return r;
}

} // namespace feq
