#pragma once

#include "feq/poly.hpp"
#include "feq/rational.hpp"

#include <stdexcept>
#include <vector>

namespace feq {

inline bool coeff_is_zero(const Rational &x) { return x == 0; }
inline bool coeff_is_zero(const Poly &p) { return p.is_zero(); }
inline bool coeff_is_zero(double x) { return x == 0.0; }

/// Truncated power series in the step size h, with coefficients in an exact
/// ring T (Rational for point states, Poly for symbolic states). Arithmetic
/// is exact; products simply discard orders beyond the truncation.
template <class T> class HSeries {
public:
    HSeries() = default;

    /// Zero series; `zero` supplies the additive identity of T.
    HSeries(int trunc, const T &zero) : c_(static_cast<std::size_t>(trunc) + 1, zero) {
        if (trunc < 0)
            throw std::invalid_argument("truncation must be >= 0");
    }

    explicit HSeries(std::vector<T> coeffs) : c_(std::move(coeffs)) {
        if (c_.empty())
            throw std::invalid_argument("series needs at least the h^0 coefficient");
    }

    int trunc() const { return static_cast<int>(c_.size()) - 1; }
    const T &operator[](int k) const { return c_.at(static_cast<std::size_t>(k)); }
    T &operator[](int k) { return c_.at(static_cast<std::size_t>(k)); }
    const std::vector<T> &coeffs() const { return c_; }

    HSeries &operator+=(const HSeries &other) {
        check(other);
        for (int k = 0; k <= trunc(); ++k)
            c_[k] = c_[k] + other.c_[k];
        return *this;
    }

    HSeries &operator-=(const HSeries &other) {
        check(other);
        for (int k = 0; k <= trunc(); ++k)
            c_[k] = c_[k] - other.c_[k];
        return *this;
    }

    friend HSeries operator+(HSeries a, const HSeries &b) { return a += b; }
    friend HSeries operator-(HSeries a, const HSeries &b) { return a -= b; }

    friend HSeries operator*(const HSeries &a, const HSeries &b) {
        a.check(b);
        HSeries out = a;
        for (int k = 0; k <= a.trunc(); ++k) {
            T acc = coeff_mul(a.c_[0], Rational(0));
            for (int i = 0; i <= k; ++i)
                acc = acc + a.c_[i] * b.c_[k - i];
            out.c_[k] = std::move(acc);
        }
        return out;
    }

    HSeries &operator*=(const Rational &q) {
        for (T &x : c_)
            x = coeff_mul(x, q);
        return *this;
    }

    /// Multiplication by h^k: shifts coefficients up, dropping the top ones.
    HSeries shifted(int k) const {
        if (k < 0)
            throw std::invalid_argument("negative h power");
        HSeries out = *this;
        for (int j = trunc(); j >= 0; --j)
            out.c_[j] = (j >= k) ? c_[j - k] : coeff_mul(c_[0], Rational(0));
        return out;
    }

    bool is_zero() const {
        for (const T &x : c_)
            if (!coeff_is_zero(x))
                return false;
        return true;
    }

    /// Smallest k with a nonzero h^k coefficient, or -1 if identically zero.
    int first_nonzero_order() const {
        for (int k = 0; k <= trunc(); ++k)
            if (!coeff_is_zero(c_[k]))
                return k;
        return -1;
    }

    bool operator==(const HSeries &other) const = default;

private:
    std::vector<T> c_;

    void check(const HSeries &other) const {
        if (trunc() != other.trunc())
            throw std::invalid_argument("series truncations differ");
    }
};

template <class T> HSeries<T> coeff_mul(HSeries<T> s, const Rational &q) { return s *= q; }

/// Horner evaluation at a concrete step size.
inline Rational eval_h(const HSeries<Rational> &s, const Rational &h) {
    Rational acc(0);
    for (int k = s.trunc(); k >= 0; --k)
        acc = acc * h + s[k];
    return acc;
}

inline double eval_h(const HSeries<Rational> &s, double h) {
    double acc = 0;
    for (int k = s.trunc(); k >= 0; --k)
        acc = acc * h + rat_double(s[k]);
    return acc;
}

} // namespace feq
