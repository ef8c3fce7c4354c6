#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace feq {

/// Exact rational scalar. All library arithmetic is exact; nothing here ever
/// rounds. GMP keeps values canonical (coprime, positive denominator).
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

/// Render as "p" or "p/q" (q > 1).
std::string rat_str(const Rational &q);

/// Parse "p", "p/q", or "-p/q" with arbitrary-precision integers.
Rational rat_parse(const std::string &s);

inline double rat_double(const Rational &q) { return q.get_d(); }

using RationalPoint = std::vector<Rational>;

} // namespace feq
