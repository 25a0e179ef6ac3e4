#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace hkv {

using cplx = std::complex<double>;
using i64 = std::int64_t;
using u64 = std::uint64_t;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// e(a/q) with exact integer reduction of the phase.
inline cplx e_frac(i64 a, i64 q) {
    i64 r = a % q;
    if (r < 0) r += q;
    if (2 * r > q) r -= q;
    const double t = two_pi * static_cast<double>(r) / static_cast<double>(q);
    return {std::cos(t), std::sin(t)};
}

// e(x) = exp(2 pi i x) after reducing x to [-1/2, 1/2].
inline cplx e_real(double x) {
    const double r = x - std::nearbyint(x);
    return {std::cos(two_pi * r), std::sin(two_pi * r)};
}

// Neumaier compensated sum.
class neumaier {
public:
    void add(double x) {
        const double t = s_ + x;
        if (std::fabs(s_) >= std::fabs(x))
            c_ += (s_ - t) + x;
        else
            c_ += (x - t) + s_;
        s_ = t;
    }
    double value() const { return s_ + c_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

class csum {
public:
    void add(cplx z) {
        re_.add(z.real());
        im_.add(z.imag());
    }
    csum& operator+=(cplx z) {
        add(z);
        return *this;
    }
    cplx value() const { return {re_.value(), im_.value()}; }

private:
    neumaier re_, im_;
};

inline double rel_residual(cplx lhs, cplx rhs) {
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1.0});
    return std::abs(lhs - rhs) / scale;
}

}  // namespace hkv
