#include "feq/rational.hpp"

#include "feq/errors.hpp"

namespace feq {

std::string rat_str(const Rational &q) { return q.get_str(); }

Rational rat_parse(const std::string &s) {
    if (s.empty())
        throw ParseError("empty rational literal");
    // Validate by hand: mpq's own parser accepts whitespace and bases we
    // don't want in data files.
    auto is_int = [](const std::string &t) {
        std::size_t i = (t.size() > 0 && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
        if (i >= t.size())
            return false;
        for (; i < t.size(); ++i)
            if (t[i] < '0' || t[i] > '9')
                return false;
        return true;
    };
    std::string num = s, den = "1";
    if (auto pos = s.find('/'); pos != std::string::npos) {
        num = s.substr(0, pos);
        den = s.substr(pos + 1);
    }
    if (!is_int(num) || !is_int(den))
        throw ParseError("bad rational literal '" + s + "'");
    Rational q;
    if (q.set_str(num + "/" + den, 10) != 0)
        throw ParseError("bad rational literal '" + s + "'");
    if (q.get_den() == 0)
        throw ParseError("zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
}

} // namespace feq
