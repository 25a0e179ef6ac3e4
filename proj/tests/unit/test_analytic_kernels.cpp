#include <doctest.h>

#include <cmath>
#include <random>

#include "hkv/error.hpp"
#include "hkv/kernels.hpp"
#include "hkv/special.hpp"

using namespace hkv;

namespace {

double erfc_v1(double y, double kappa) { return 0.5 * std::erfc(std::log(y) / (2.0 * std::sqrt(kappa))); }

cplx phi_u_closed(double y, double pu, cplx delta, double kappa) {
    const double x = y / pu;
    return -0.5 * std::exp((1.0 - delta) * std::log(x)) * std::erfc(std::log(x) / (2.0 * std::sqrt(kappa)));
}

cutoff_function phi_u_default() {
    cutoff_function f;
    f.kind = cutoff_kind::Phi_u;
    f.delta = {0.6, 0.3};
    f.u = 1.5;
    f.p = 5;
    return f;
}

}  // namespace

TEST_SUITE("analytic_kernels") {

TEST_CASE("log_gamma at simple points") {
    CHECK(std::abs(log_gamma(1.0)) < 1e-15);
    CHECK(std::abs(log_gamma(0.5) - std::log(std::sqrt(pi))) < 1e-14);
    for (double x : {0.1, 1.7, 4.5, 12.0, 33.3, 99.0})
        CHECK(std::abs(log_gamma(x) - std::lgamma(x)) < 1e-12 * std::max(1.0, std::fabs(std::lgamma(x))));
}

TEST_CASE("log_gamma recursion and reflection") {
    std::mt19937_64 rng(0x5EED);
    std::uniform_real_distribution<double> re(-40, 60), im(-90, 90);
    const cplx s(3, 4);
    CHECK(std::abs(std::exp(log_gamma(s + 1.0) - log_gamma(s)) / s - 1.0) < 1e-12);
    for (int i = 0; i < 400; ++i) {
        const cplx z(re(rng), im(rng));
        if (std::abs(z) > 100 || std::fabs(z.imag()) < 0.5) continue;
        const cplx ratio = std::exp(log_gamma(z + 1.0) - log_gamma(z)) / z;
        CHECK(std::abs(ratio - 1.0) < 1e-12);
        const cplx a = log_gamma(z), b = log_gamma_reflect(z);
        CHECK(std::abs(std::exp(a - b) - 1.0) < 1e-11);
    }
}

TEST_CASE("log_gamma principal branch is continuous along vertical lines") {
    cplx prev = log_gamma(cplx(0.3, 0.0));
    for (int i = 1; i <= 2000; ++i) {
        const cplx cur = log_gamma(cplx(0.3, 0.05 * i));
        CHECK(std::fabs(cur.imag() - prev.imag()) < 0.5);
        prev = cur;
    }
}

TEST_CASE("log_gamma poles") {
    for (int k : {0, -1, -2, -7})
        CHECK_THROWS_AS(log_gamma(static_cast<double>(k)), hkv::error);
    try {
        log_gamma(-3.0);
    } catch (const hkv::error& e) {
        CHECK(e.code() == errc::pole_at_non_positive_integer);
    }
    CHECK(rgamma(-4.0) == 0.0);
}

TEST_CASE("F ratio values and duality") {
    const auto g1 = gamma_data::trivial(1);
    CHECK(std::abs(F_ratio(0.5, g1) - 1.0) < 1e-14);

    const auto g2 = gamma_data::trivial(2);
    const cplx a = F_ratio(2.0, g2), b = F_ratio_reflect(2.0, g2);
    CHECK(std::abs(a - b) < 1e-13 * std::abs(a));
    // Gamma(-1/2)^2 / Gamma(1)^2 * pi^{-1+4}
    CHECK(std::abs(a - std::pow(pi, 3) * 4.0 * pi) < 1e-11 * std::abs(a));

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> re(-3, 4), im(-30, 30), mu(-0.3, 0.3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto g = gamma_data::make({cplx(mu(rng), mu(rng)), cplx(mu(rng), mu(rng)), cplx(mu(rng), 0)});
        const cplx s(re(rng), im(rng));
        const cplx prod = Fbar_ratio(s, g) * F_ratio(1.0 - s, g);
        CHECK(std::abs(prod - 1.0) < 1e-10);
    }
}

TEST_CASE("F ratio pole and sanity bound") {
    const auto g1 = gamma_data::trivial(1);
    try {
        F_ratio(1.0, g1);
        CHECK(false);
    } catch (const hkv::error& e) {
        CHECK(e.code() == errc::pole_hit);
    }
    CHECK(F_ratio(0.0, g1) == 0.0);
    CHECK_THROWS_AS(gamma_data::make({cplx(0.45, 0)}), hkv::error);
    CHECK_NOTHROW(gamma_data::make({cplx(0.29, 0), cplx(-0.29, 0)}));
}

TEST_CASE("gamma ratio magnitude follows Stirling within a factor 2") {
    const auto g = gamma_data::make({cplx(0.1, 0.2), cplx(-0.1, -0.2)});
    for (double sig : {-1.5, 0.25, 0.5, 2.0})
        for (double t = 10; t <= 50; t += 2.5)
            for (double sgn : {-1.0, 1.0}) {
                const cplx s(sig, sgn * t);
                const double r = std::abs(F_ratio(s, g)) / F_stirling_magnitude(s, g);
                CHECK(r > 0.5);
                CHECK(r < 2.0);
            }
}

TEST_CASE("test function k") {
    test_function_k k;
    CHECK(k(0.0) == 1.0);
    const auto g = gamma_data::make({cplx(0.2, 1.0), cplx(-0.2, -1.0)});
    const auto kv = test_function_k::for_gamma(g);
    CHECK(kv.kind == k_kind::vanishing_at_mu);
    CHECK(kv(0.0) == 1.0);
    for (const cplx& mb : g.mu_bar) CHECK(std::abs(kv(mb)) < 1e-14);
    // Gaussian decay on vertical lines
    for (double sig : {-2.0, 0.0, 1.0, 3.0})
        for (double t : {5.0, 10.0, 20.0})
            CHECK(std::abs(k(cplx(sig, t))) <= std::exp(k.kappa * (sig * sig - t * t)) * (1 + 1e-12));
}

TEST_CASE("V1 matches the erfc closed form") {
    cutoff_function f;
    f.kind = cutoff_kind::V1;
    for (double y : {1e-4, 1e-3, 0.03, 0.5, 1.0, 2.0, 7.0, 10.0, 40.0}) {
        const kernel_value v = eval_cutoff(f, y);
        CHECK(v.tail_bound < 1e-10);
        CHECK(std::abs(v.value - erfc_v1(y, f.k.kappa)) < 1e-11);
    }
}

TEST_CASE("V1 limits") {
    cutoff_function f;
    f.kind = cutoff_kind::V1;
    CHECK(std::abs(eval_cutoff(f, 1e-3).value - 1.0) < 1e-2);
    CHECK(std::abs(eval_cutoff(f, 10.0).value) < 1e-6);
}

TEST_CASE("Phi_u matches the erfc closed form") {
    const auto f = phi_u_default();
    const double pu = std::pow(5.0, 1.5);
    for (double y : {0.01, 1.0, pu, 30.0, 300.0, 3000.0}) {
        const kernel_value v = eval_cutoff(f, y);
        const cplx want = phi_u_closed(y, pu, f.delta, f.k.kappa);
        CHECK(std::abs(v.value - want) < 1e-10 * std::max(1.0, std::abs(want)));
    }
}

TEST_CASE("abscissa independence") {
    auto f = phi_u_default();
    const double pu = std::pow(5.0, 1.5);
    quadrature_options a, b;
    a.sigma = -1.2;
    b.sigma = -2.3;
    const kernel_value va = eval_cutoff(f, pu, a), vb = eval_cutoff(f, pu, b);
    CHECK(std::isfinite(std::abs(va.value)));
    CHECK(std::abs(va.value - vb.value) < 2 * (va.tail_bound + vb.tail_bound) + 1e-13);

    cutoff_function v2;
    v2.kind = cutoff_kind::V2;
    v2.gamma = gamma_data::trivial(2);
    for (double y : {0.01, 0.7, 3.0}) {
        quadrature_options c1, c2;
        c1.sigma = 0.4;
        c2.sigma = 1.8;
        const kernel_value w1 = eval_cutoff(v2, y, c1), w2 = eval_cutoff(v2, y, c2);
        CHECK(std::abs(w1.value - w2.value) < 2 * (w1.tail_bound + w2.tail_bound) + 1e-12);
    }
}

TEST_CASE("contour within 0.1 of a pole is refused") {
    cutoff_function f;
    f.kind = cutoff_kind::V1;
    quadrature_options o;
    o.sigma = 0.05;
    CHECK_THROWS_AS(eval_cutoff(f, 2.0, o), hkv::error);
}

TEST_CASE("too small T raises TailBoundExceedsTolerance") {
    cutoff_function f;
    f.kind = cutoff_kind::V1;
    quadrature_options o;
    o.T = 3.0;
    try {
        eval_cutoff(f, 0.5, o);
        CHECK(false);
    } catch (const hkv::error& e) {
        CHECK(e.code() == errc::tail_bound_exceeds_tolerance);
    }
}

TEST_CASE("V2 near zero tends to F(delta)") {
    cutoff_function v2;
    v2.kind = cutoff_kind::V2;
    v2.gamma = gamma_data::trivial(2);
    const cplx Fd = F_ratio(v2.delta, v2.gamma);
    double prev = HUGE_VAL;
    for (double y : {1e-6, 1e-8, 1e-10, 1e-12, 1e-14}) {
        const double gap = std::abs(eval_cutoff(v2, y).value - Fd);
        CHECK(gap < prev);
        prev = gap;
    }
    CHECK(prev < 1e-2 * std::abs(Fd));
}

TEST_CASE("Phi_u seam: right and left contours agree at y = p^u") {
    const auto f = phi_u_default();
    const double pu = std::pow(5.0, 1.5);
    const kernel_value r = phi_u_right_contour(f, pu), l = eval_cutoff(f, pu);
    CHECK(std::abs(r.value - l.value) < 2 * (r.tail_bound + l.tail_bound) + 1e-12);
}

TEST_CASE("decay profiles") {
    auto f = phi_u_default();
    const decay_fit s = decay_profile(f, decay_side::small_y);
    CHECK(s.slope >= 2 - 0.1);
    const decay_fit l = decay_profile(f, decay_side::large_y);
    CHECK(l.slope <= -3.9);

    f.kind = cutoff_kind::Phi_tilde_u;
    f.euler_alpha = {cplx(0.3, 0.4), cplx(-0.8, 0.6)};
    CHECK(decay_profile(f, decay_side::small_y).slope >= 1.9);
    CHECK(decay_profile(f, decay_side::large_y).slope <= -3.9);
}

TEST_CASE("phi_infinity Mellin pair round-trips") {
    phi_infinity ph;
    ph.gamma = gamma_data::trivial(2);
    ph.fbeta = 91.0 * std::pow(5.0, 8 - 1.5);
    for (double c : {1.2, 2.0}) {
        CHECK(c > ph.strip_lo());
        CHECK(c < ph.strip_hi());
        for (double r : {1e-3, 1e-2, 0.3, 1.0, 5.0}) {
            const double x = r * ph.fbeta;
            const kernel_value direct = ph.value(x);
            const kernel_value inv = ph.mellin_inverse(x, c);
            CHECK(std::abs(direct.value - inv.value) < 1e-8 * std::max(1.0, std::abs(direct.value)));
        }
    }
}

TEST_CASE("GL1 Phi equals the cosine transform of the weight") {
    cutoff_function f;
    f.kind = cutoff_kind::Phi_gl1;
    f.weight.y0 = 50;
    for (double y : {0.004, 0.011, 0.02}) {
        // y * int_0^inf phi(x) 2 cos(2 pi x y) dx by composite Simpson
        const double X = 50 * std::exp(7.0), hx = 0.02;
        const auto m = static_cast<long>(X / hx);
        double acc = 0;
        for (long i = 1; i < m; ++i) {
            const double x = i * hx;
            acc += (i % 2 ? 4.0 : 2.0) * f.weight(x) * 2 * std::cos(two_pi * x * y);
        }
        const double want = y * acc * hx / 3.0;
        const kernel_value v = eval_cutoff(f, y);
        CHECK(std::abs(v.value - want) < 1e-8);
        CHECK(std::fabs(v.value.imag()) < 1e-12);
    }
}

TEST_CASE("Chebyshev tabulation of V2") {
    cutoff_function v2;
    v2.kind = cutoff_kind::V2;
    v2.gamma = gamma_data::trivial(2);
    const tabulated_cutoff tab(v2, 1e-6, 50.0);
    CHECK(tab.error_bound() < 1e-10);
    for (double y : {1.3e-6, 0.002, 0.77, 1.0, 4.4, 49.0}) {
        const cplx d = eval_cutoff(v2, y).value;
        CHECK(std::abs(tab(y) - d) < 1e-10);
    }
}

}  // TEST_SUITE
