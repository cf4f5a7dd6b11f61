#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gctwist {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return static_cast<double>(r); }

/// Parses "p/q" (or a bare integer "p") into an exact rational.
inline Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(Int(s));
        Int num(s.substr(0, slash));
        Int den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rational(num, den);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a rational: '" + s + "'");
    }
}

/// Serializes as "p/q" with q >= 1, matching the file format.
inline std::string format_rational(const Rational& r) {
    return numerator(r).str() + "/" + denominator(r).str();
}

/// An element of Q/Z, stored as the exact representative in [0, 1).
/// Addition is mod 1; the complex value is e^{2*pi*i*phase}.
class Phase {
public:
    Phase() : v_(0) {}
    explicit Phase(Rational r) : v_(normalize(std::move(r))) {}

    static Phase of(long num, long den) { return Phase(Rational(num, den)); }

    const Rational& value() const { return v_; }
    bool is_zero() const { return v_ == 0; }

    Phase operator+(const Phase& o) const { return Phase(v_ + o.v_); }
    Phase operator-(const Phase& o) const { return Phase(v_ - o.v_); }
    Phase operator-() const { return Phase(-v_); }
    Phase operator*(const Int& k) const { return Phase(v_ * Rational(k)); }
    bool operator==(const Phase& o) const { return v_ == o.v_; }
    bool operator!=(const Phase& o) const { return v_ != o.v_; }
    bool operator<(const Phase& o) const { return v_ < o.v_; }

    std::complex<double> to_complex() const {
        double t = 2.0 * std::numbers::pi * to_double(v_);
        return {std::cos(t), std::sin(t)};
    }

    /// Least n >= 1 with n * phase = 0 in Q/Z.
    Int order() const { return v_ == 0 ? Int(1) : Int(denominator(v_)); }

    std::string str() const { return format_rational(v_); }

private:
    static Rational normalize(Rational r) {
        Int num = numerator(r), den = denominator(r);
        Int m = num % den;
        if (m < 0) m += den;
        return Rational(m, den);
    }
    Rational v_;
};

}  // namespace gctwist
