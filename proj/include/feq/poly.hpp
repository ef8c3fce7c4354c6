#pragma once

#include "feq/errors.hpp"
#include "feq/rational.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace feq {

/// Exponent vector of a monomial; length equals the ambient variable count.
using Exponents = std::vector<std::uint32_t>;

inline Rational coeff_mul(const Rational &v, const Rational &c) { return v * c; }
inline double coeff_mul(double v, const Rational &c) { return v * rat_double(c); }

/// Sparse multivariate polynomial with exact rational coefficients over
/// variables y1..yd. Zero coefficients are never stored; term order is the
/// lexicographic order on exponent vectors, so iteration is deterministic.
class Poly {
public:
    explicit Poly(int nvars = 0) : nvars_(nvars) {}

    static Poly constant(int nvars, const Rational &c);
    static Poly variable(int nvars, int index); // 0-based

    int nvars() const { return nvars_; }
    bool is_zero() const { return terms_.empty(); }

    /// Total degree; -1 for the zero polynomial.
    long degree() const;

    const std::map<Exponents, Rational> &terms() const { return terms_; }

    /// Coefficient of a monomial (zero if absent).
    Rational coefficient(const Exponents &e) const;

    void add_term(const Exponents &e, const Rational &c);

    Poly &operator+=(const Poly &other);
    Poly &operator-=(const Poly &other);
    Poly &operator*=(const Poly &other) { return *this = *this * other; }
    Poly &operator*=(const Rational &c);

    friend Poly operator+(Poly a, const Poly &b) { return a += b; }
    friend Poly operator-(Poly a, const Poly &b) { return a -= b; }
    friend Poly operator*(const Poly &a, const Poly &b);
    friend Poly operator*(Poly a, const Rational &c) { return a *= c; }
    friend Poly operator*(const Rational &c, Poly a) { return a *= c; }
    Poly operator-() const;

    bool operator==(const Poly &other) const = default;

    /// Partial derivative with respect to variable index (0-based).
    Poly derivative(int var) const;

    /// Evaluates with the variables replaced by args[0..nvars). The result
    /// lives in whatever ring T is: rationals, doubles, polynomials
    /// (composition), or truncated h-series. `one` is the multiplicative
    /// identity of that ring, needed for constant terms.
    template <class T> T eval(std::span<const T> args, const T &one) const {
        T acc = coeff_mul(one, Rational(0));
        for (const auto &[exps, coeff] : terms_) {
            T term = one;
            bool any = false;
            for (int v = 0; v < nvars_; ++v) {
                for (std::uint32_t k = 0; k < exps[v]; ++k) {
                    term = any ? term * args[v] : args[v];
                    any = true;
                }
            }
            acc = acc + coeff_mul(term, coeff);
        }
        return acc;
    }

    Rational eval_rational(std::span<const Rational> point) const;
    double eval_double(std::span<const double> point) const;

    /// Same polynomial over new_nvars variables with indices shifted by
    /// offset (for building fields on product spaces).
    Poly embed(int new_nvars, int offset) const;

    /// Human-readable rendering, e.g. "1/2*y1^2*y3 - y2".
    std::string str(const std::string &var_prefix = "y") const;

private:
    int nvars_;
    std::map<Exponents, Rational> terms_;

    void check_budget() const;
};

inline Poly coeff_mul(Poly v, const Rational &c) { return v *= c; }

/// Polynomial vector field on Q^d: d components, each a polynomial in d vars.
struct PolyVectorField {
    int dim = 0;
    std::vector<Poly> comps;

    PolyVectorField() = default;
    PolyVectorField(int dim, std::vector<Poly> comps);

    static PolyVectorField zero(int dim);
    long degree() const;
    bool is_zero() const;
    bool operator==(const PolyVectorField &other) const = default;

    RationalPoint eval(std::span<const Rational> point) const;
    std::vector<double> eval(std::span<const double> point) const;
};

PolyVectorField operator+(const PolyVectorField &a, const PolyVectorField &b);
PolyVectorField operator-(const PolyVectorField &a, const PolyVectorField &b);
PolyVectorField operator*(const Rational &c, const PolyVectorField &f);

/// Polynomial map Q^{d_in} -> Q^{d_out} (observables F, affine maps, ...).
struct PolyMap {
    int dim_in = 0;
    int dim_out = 0;
    std::vector<Poly> comps;

    PolyMap() = default;
    PolyMap(int dim_in, int dim_out, std::vector<Poly> comps);

    long degree() const;
    bool is_affine() const { return degree() <= 1; }
    bool is_quadratic() const { return degree() <= 2; }
    bool operator==(const PolyMap &other) const = default;

    RationalPoint eval(std::span<const Rational> point) const;
};

PolyMap operator+(const PolyMap &a, const PolyMap &b);
PolyMap operator-(const PolyMap &a, const PolyMap &b);

} // namespace feq
