#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include "gctwist/rational.hpp"

namespace gctwist {

/// Seeded generator with hand-rolled distributions so that identical
/// seeds give identical streams independent of the standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform in {0, ..., n-1}.
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }

    /// Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01(), u2 = uniform01();
        while (u1 == 0.0) u1 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double t = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    std::complex<double> complex_normal() {
        double re = normal(), im = normal();
        return {re, im};
    }

    /// Random positive rational with numerator and denominator in [1, bound].
    Rational positive_rational(unsigned bound = 9) {
        auto num = 1 + index(bound);
        auto den = 1 + index(bound);
        return Rational(static_cast<long>(num), static_cast<long>(den));
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace gctwist
