#include "hkv/special.hpp"

#include "hkv/error.hpp"

namespace hkv {

namespace {

// B_{2k} / (2k (2k-1)), k = 1..12
constexpr double stirling_coeff[] = {
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
    77683.0 / 5796.0,
    -236364091.0 / 1506960.0,
};

cplx stirling(cplx z) {
    const cplx z2 = 1.0 / (z * z);
    cplx term = 1.0 / z;
    cplx series = 0.0;
    for (int k = 0; k < 10; ++k) {
        series += stirling_coeff[k] * term;
        term *= z2;
    }
    return (z - 0.5) * std::log(z) - z + 0.5 * std::log(two_pi) + series;
}

}  // namespace

bool is_non_positive_integer(cplx z, double tol) {
    if (std::fabs(z.imag()) > tol || z.real() > 0.5) return false;
    return std::fabs(z.real() - std::nearbyint(z.real())) < tol;
}

cplx log_gamma(cplx z) {
    require(!is_non_positive_integer(z), errc::pole_at_non_positive_integer, "log Gamma at a pole");
    // the shifted sum of principal logs is the principal branch off the negative axis
    cplx shift = 0.0;
    while (z.real() < 15.0) {
        shift += std::log(z);
        z += 1.0;
    }
    return stirling(z) - shift;
}

cplx log_gamma_reflect(cplx z) {
    if (z.real() >= 0.5) return log_gamma(z);
    require(!is_non_positive_integer(z), errc::pole_at_non_positive_integer, "log Gamma at a pole");
    // Gamma(z) Gamma(1-z) = pi / sin(pi z); branch fixed against the direct path
    const cplx v = std::log(pi) - std::log(std::sin(pi * z)) - log_gamma(1.0 - z);
    const cplx ref = log_gamma(z);
    const double k = std::nearbyint((ref.imag() - v.imag()) / two_pi);
    return v + cplx(0.0, two_pi * k);
}

cplx rgamma(cplx z) {
    if (is_non_positive_integer(z)) return 0.0;
    return std::exp(-log_gamma(z));
}

}  // namespace hkv
