#include "hkv/hurwitz.hpp"

#include <array>

#include "hkv/error.hpp"

namespace hkv {

namespace {

constexpr int em_terms = 12;

// B_{2j} / (2j)!
const std::array<double, em_terms + 1>& bernoulli_ratio() {
    static const std::array<double, em_terms + 1> r = [] {
        constexpr double b[] = {0,           1.0 / 6,         -1.0 / 30,      1.0 / 42,        -1.0 / 30,
                                5.0 / 66,    -691.0 / 2730,   7.0 / 6,        -3617.0 / 510,   43867.0 / 798,
                                -174611.0 / 330, 854513.0 / 138, -236364091.0 / 2730};
        std::array<double, em_terms + 1> out{};
        double f = 1;
        for (int j = 1; j <= em_terms; ++j) {
            f *= (2.0 * j - 1) * (2.0 * j);
            out[j] = b[j] / f;
        }
        return out;
    }();
    return r;
}

}  // namespace

bounded_value hurwitz_zeta(cplx s, double a) {
    require(a > 0, errc::invalid_argument, "Hurwitz parameter must be positive");
    require(std::abs(s - 1.0) > 1e-12, errc::pole_hit, "Hurwitz zeta at s = 1");
    const int J = em_terms;
    const auto K = static_cast<int>(std::ceil(std::max(30.0, 1.6 * (std::abs(s) + 2 * J))));
    csum acc;
    double mag = 0;
    for (int k = 0; k < K; ++k) {
        const cplx t = std::exp(-s * std::log(k + a));
        acc += t;
        mag += std::abs(t);
    }
    const double N = K + a, lN = std::log(N);
    const cplx Ns = std::exp(-s * lN);
    acc += N * Ns / (s - 1.0);
    acc += 0.5 * Ns;
    mag += std::abs(N * Ns / (s - 1.0)) + std::abs(Ns);
    const auto& br = bernoulli_ratio();
    // (s)_{2j-1} N^{-s-2j+1}
    cplx poch = s, pw = Ns / N;
    for (int j = 1; j <= J; ++j) {
        acc += br[j] * poch * pw;
        poch *= (s + (2.0 * j - 1.0)) * (s + 2.0 * j);
        pw /= N * N;
    }
    // |(s)_{2J}|
    cplx pf = 1.0;
    for (int i = 0; i < 2 * J; ++i) pf *= s + static_cast<double>(i);
    const double sig = s.real();
    const double rem = 4.0 * std::abs(pf) / std::pow(two_pi, 2.0 * J) * std::exp((-sig - 2.0 * J + 1.0) * lN) /
                       (sig + 2.0 * J - 1.0);
    const cplx v = acc.value();
    return {v, rem + 4e-16 * mag};
}

hurwitz_table::hurwitz_table(i64 Q, cplx s) : Q_(Q), s_(s), z_(static_cast<std::size_t>(Q)), b_(z_.size()) {
    require(Q >= 1, errc::invalid_argument, "table modulus must be positive");
    const cplx qs = std::exp(-s * std::log(static_cast<double>(Q)));
    const double qsa = std::abs(qs);
    for (i64 a = 1; a <= Q; ++a) {
        const bounded_value h = hurwitz_zeta(s, static_cast<double>(a) / static_cast<double>(Q));
        const auto i = static_cast<std::size_t>(a % Q);
        z_[i] = qs * h.value;
        b_[i] = qsa * h.bound;
    }
}

bounded_value periodic_L(const std::vector<cplx>& c, const hurwitz_table& z) {
    require(static_cast<i64>(c.size()) == z.modulus(), errc::invalid_argument, "period mismatch");
    csum acc;
    double bound = 0, mag = 0;
    for (std::size_t a = 0; a < c.size(); ++a) {
        if (c[a] == 0.0) continue;
        const cplx t = c[a] * z[a];
        acc += t;
        bound += std::abs(c[a]) * z.bound(a);
        mag += std::abs(t);
    }
    return {acc.value(), bound + 4e-16 * mag};
}

bounded_value periodic_L(const std::vector<cplx>& c, cplx s) {
    return periodic_L(c, hurwitz_table(static_cast<i64>(c.size()), s));
}

}  // namespace hkv
