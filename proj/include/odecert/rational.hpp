#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "error.hpp"

namespace odecert {

using BigInt = boost::multiprecision::cpp_int;

// Arbitrary-precision rational, always in lowest terms with positive
// denominator (cpp_rational maintains that canonical form).
using Rat = boost::multiprecision::cpp_rational;

inline Rat rat(long long n) { return Rat(n); }

inline Rat rat(long long n, long long d) {
    if (d == 0) throw Error(ErrKind::DivisionByZero, "rational with zero denominator");
    return Rat(BigInt(n), BigInt(d));
}

inline bool is_integer(const Rat& r) { return denominator(r) == 1; }

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

inline Rat rat_pow(const Rat& r, int n) {
    if (n < 0) throw Error(ErrKind::Internal, "rat_pow with negative exponent");
    Rat acc(1);
    Rat base = r;
    int e = n;
    while (e > 0) {
        if (e & 1) acc *= base;
        base *= base;
        e >>= 1;
    }
    return acc;
}

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

/// Renders p or p/q; negative values carry a leading minus.
inline std::string rat_to_string(const Rat& r) {
    std::string s = numerator(r).str();
    if (denominator(r) != 1) s += "/" + denominator(r).str();
    return s;
}

}  // namespace odecert
