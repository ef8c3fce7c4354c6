#include "feq/poly.hpp"

#include <sstream>
#include <stdexcept>

namespace feq {

Poly Poly::constant(int nvars, const Rational &c) {
    Poly p(nvars);
    if (c != 0)
        p.terms_.emplace(Exponents(nvars, 0), c);
    return p;
}

Poly Poly::variable(int nvars, int index) {
    if (index < 0 || index >= nvars)
        throw std::invalid_argument("variable index out of range");
    Poly p(nvars);
    Exponents e(nvars, 0);
    e[index] = 1;
    p.terms_.emplace(std::move(e), Rational(1));
    return p;
}

long Poly::degree() const {
    long deg = -1;
    for (const auto &[exps, coeff] : terms_) {
        long d = 0;
        for (auto e : exps)
            d += e;
        deg = std::max(deg, d);
    }
    return deg;
}

Rational Poly::coefficient(const Exponents &e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
}

void Poly::add_term(const Exponents &e, const Rational &c) {
    if (static_cast<int>(e.size()) != nvars_)
        throw std::invalid_argument("exponent vector length does not match nvars");
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        if (c != 0)
            terms_.emplace(e, c);
    } else {
        it->second += c;
        if (it->second == 0)
            terms_.erase(it);
    }
    check_budget();
}

Poly &Poly::operator+=(const Poly &other) {
    if (nvars_ != other.nvars_)
        throw std::invalid_argument("polynomial variable counts differ");
    if (other.is_zero())
        return *this;
    for (const auto &[e, c] : other.terms_) {
        auto it = terms_.find(e);
        if (it == terms_.end())
            terms_.emplace(e, c);
        else {
            it->second += c;
            if (it->second == 0)
                terms_.erase(it);
        }
    }
    check_budget();
    return *this;
}

Poly &Poly::operator-=(const Poly &other) { return *this += -other; }

Poly Poly::operator-() const {
    Poly p(nvars_);
    for (const auto &[e, c] : terms_)
        p.terms_.emplace(e, -c);
    return p;
}

Poly &Poly::operator*=(const Rational &c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto &[e, coeff] : terms_)
        coeff *= c;
    return *this;
}

Poly operator*(const Poly &a, const Poly &b) {
    if (a.nvars_ != b.nvars_)
        throw std::invalid_argument("polynomial variable counts differ");
    Poly out(a.nvars_);
    Exponents e(a.nvars_, 0);
    for (const auto &[ea, ca] : a.terms_) {
        for (const auto &[eb, cb] : b.terms_) {
            for (std::size_t i = 0; i < e.size(); ++i)
                e[i] = ea[i] + eb[i];
            Rational c = ca * cb;
            auto it = out.terms_.find(e);
            if (it == out.terms_.end())
                out.terms_.emplace(e, std::move(c));
            else {
                it->second += c;
                if (it->second == 0)
                    out.terms_.erase(it);
            }
        }
        out.check_budget();
    }
    return out;
}

Poly Poly::derivative(int var) const {
    if (var < 0 || var >= nvars_)
        throw std::invalid_argument("derivative variable out of range");
    Poly p(nvars_);
    for (const auto &[e, c] : terms_) {
        if (e[var] == 0)
            continue;
        Exponents d = e;
        d[var] -= 1;
        p.terms_.emplace(std::move(d), c * Rational(e[var]));
    }
    return p;
}

Rational Poly::eval_rational(std::span<const Rational> point) const {
    if (static_cast<int>(point.size()) != nvars_)
        throw std::invalid_argument("point dimension does not match nvars");
    return eval<Rational>(point, Rational(1));
}

double Poly::eval_double(std::span<const double> point) const {
    if (static_cast<int>(point.size()) != nvars_)
        throw std::invalid_argument("point dimension does not match nvars");
    return eval<double>(point, 1.0);
}

Poly Poly::embed(int new_nvars, int offset) const {
    if (offset < 0 || nvars_ + offset > new_nvars)
        throw std::invalid_argument("embedding does not fit the target space");
    Poly p(new_nvars);
    for (const auto &[e, c] : terms_) {
        Exponents d(new_nvars, 0);
        for (int i = 0; i < nvars_; ++i)
            d[i + offset] = e[i];
        p.terms_.emplace(std::move(d), c);
    }
    return p;
}

std::string Poly::str(const std::string &var_prefix) const {
    if (terms_.empty())
        return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto &[e, c] : terms_) {
        Rational a = c;
        if (first) {
            if (a < 0) {
                out << "-";
                a = -a;
            }
        } else {
            out << (a < 0 ? " - " : " + ");
            if (a < 0)
                a = -a;
        }
        first = false;
        bool any_var = false;
        std::ostringstream mono;
        for (int v = 0; v < nvars_; ++v) {
            if (e[v] == 0)
                continue;
            if (any_var)
                mono << "*";
            mono << var_prefix << (v + 1);
            if (e[v] > 1)
                mono << "^" << e[v];
            any_var = true;
        }
        if (!any_var)
            out << rat_str(a);
        else if (a == 1)
            out << mono.str();
        else
            out << rat_str(a) << "*" << mono.str();
    }
    return out.str();
}

void Poly::check_budget() const {
    if (terms_.size() > limits::monomial_budget())
        throw BudgetExceeded("polynomial exceeded the monomial budget (" +
                             std::to_string(limits::monomial_budget()) + " terms)");
}

PolyVectorField::PolyVectorField(int dim, std::vector<Poly> comps)
    : dim(dim), comps(std::move(comps)) {
    if (static_cast<int>(this->comps.size()) != dim)
        throw std::invalid_argument("component count does not match dimension");
    for (const Poly &p : this->comps)
        if (p.nvars() != dim)
            throw std::invalid_argument("component variable count does not match dimension");
}

PolyVectorField PolyVectorField::zero(int dim) {
    return PolyVectorField(dim, std::vector<Poly>(dim, Poly(dim)));
}

long PolyVectorField::degree() const {
    long d = -1;
    for (const Poly &p : comps)
        d = std::max(d, p.degree());
    return d;
}

bool PolyVectorField::is_zero() const {
    for (const Poly &p : comps)
        if (!p.is_zero())
            return false;
    return true;
}

RationalPoint PolyVectorField::eval(std::span<const Rational> point) const {
    RationalPoint out;
    out.reserve(comps.size());
    for (const Poly &p : comps)
        out.push_back(p.eval_rational(point));
    return out;
}

std::vector<double> PolyVectorField::eval(std::span<const double> point) const {
    std::vector<double> out;
    out.reserve(comps.size());
    for (const Poly &p : comps)
        out.push_back(p.eval_double(point));
    return out;
}

PolyVectorField operator+(const PolyVectorField &a, const PolyVectorField &b) {
    if (a.dim != b.dim)
        throw std::invalid_argument("field dimensions differ");
    std::vector<Poly> comps;
    comps.reserve(a.comps.size());
    for (int i = 0; i < a.dim; ++i)
        comps.push_back(a.comps[i] + b.comps[i]);
    return PolyVectorField(a.dim, std::move(comps));
}

PolyVectorField operator-(const PolyVectorField &a, const PolyVectorField &b) {
    return a + Rational(-1) * b;
}

PolyVectorField operator*(const Rational &c, const PolyVectorField &f) {
    std::vector<Poly> comps;
    comps.reserve(f.comps.size());
    for (const Poly &p : f.comps)
        comps.push_back(p * c);
    return PolyVectorField(f.dim, std::move(comps));
}

PolyMap::PolyMap(int dim_in, int dim_out, std::vector<Poly> comps)
    : dim_in(dim_in), dim_out(dim_out), comps(std::move(comps)) {
    if (static_cast<int>(this->comps.size()) != dim_out)
        throw std::invalid_argument("component count does not match output dimension");
    for (const Poly &p : this->comps)
        if (p.nvars() != dim_in)
            throw std::invalid_argument("component variable count does not match input dimension");
}

long PolyMap::degree() const {
    long d = -1;
    for (const Poly &p : comps)
        d = std::max(d, p.degree());
    return d;
}

RationalPoint PolyMap::eval(std::span<const Rational> point) const {
    RationalPoint out;
    out.reserve(comps.size());
    for (const Poly &p : comps)
        out.push_back(p.eval_rational(point));
    return out;
}

PolyMap operator+(const PolyMap &a, const PolyMap &b) {
    if (a.dim_in != b.dim_in || a.dim_out != b.dim_out)
        throw std::invalid_argument("map shapes differ");
    std::vector<Poly> comps;
    for (int i = 0; i < a.dim_out; ++i)
        comps.push_back(a.comps[i] + b.comps[i]);
    return PolyMap(a.dim_in, a.dim_out, std::move(comps));
}

PolyMap operator-(const PolyMap &a, const PolyMap &b) {
    std::vector<Poly> comps;
    for (int i = 0; i < a.dim_out; ++i)
        comps.push_back(a.comps[i] - b.comps[i]);
    return PolyMap(a.dim_in, a.dim_out, std::move(comps));
}

} // namespace feq
