#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace creconf {

// Exact rational arithmetic, backed by GMP. All thresholds, budgets and
// scores use this type; floating point never enters decision logic.
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

// Parses "p", "p/q" or a decimal-free integer string into a canonical rational.
inline Rational parse_rational(const std::string& text) {
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            Rational q(mpz_class(text), 1);
            q.canonicalize();
            return q;
        }
        mpz_class num(text.substr(0, slash));
        mpz_class den(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        Rational q(num, den);
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("malformed rational: '" + text + "'");
    }
}

// Serializes as "p" or "p/q"; fractions never leave the program as floats.
inline std::string fraction_str(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace creconf
