#include <doctest.h>

#include <cmath>
#include <random>

#include "hkv/error.hpp"
#include "hkv/ldata.hpp"

using namespace hkv;

namespace {

dirichlet_character chr(i64 p, int beta, i64 t) { return {build_unit_group(p, beta), t}; }

isobaric_datum default_datum() { return isobaric_datum({chr(7, 1, 2), chr(13, 1, 2)}); }

cplx fe_rhs(const isobaric_datum& d, const dirichlet_character& chi, cplx s) {
    const double q = static_cast<double>(chi.q());
    const int n = d.n();
    const cplx tq = gauss_sum(chi) / std::sqrt(q);
    const double cond = static_cast<double>(d.N()) * std::pow(q, n);
    const cplx pref = d.W() * d.omega(chi.q()) * chi(d.N()) * std::pow(tq, n) * std::exp((0.5 - s) * std::log(cond)) *
                      F_ratio(s, d.gamma());
    return pref * twisted_L(d.dual(), chi.conj(), 1.0 - s, l_mode::product).value;
}

}  // namespace

TEST_SUITE("l_data") {

TEST_CASE("Hurwitz zeta special values") {
    CHECK(std::abs(hurwitz_zeta(2.0, 1.0).value - pi * pi / 6) < 1e-14);
    CHECK(std::abs(hurwitz_zeta(-1.0, 1.0).value + 1.0 / 12) < 1e-12);
    for (double a : {0.1, 0.5, 0.9})
        CHECK(std::abs(hurwitz_zeta(0.0, a).value - (0.5 - a)) < 1e-13);
    const bounded_value z = hurwitz_zeta(cplx(0.5, 14.134725141734693), 1.0);
    CHECK(std::abs(z.value) < 1e-9);
    CHECK(z.bound < 1e-12);
    CHECK_THROWS_AS(hurwitz_zeta(1.0, 0.5), hkv::error);
}

TEST_CASE("coefficients of small data") {
    const auto x7 = chr(7, 1, 2);
    const isobaric_datum d1({x7});
    for (i64 m = 1; m < 60; ++m) CHECK(std::abs(d1.coeff(m) - x7(m)) < 1e-14);

    const auto quad5 = chr(5, 1, 2);
    const isobaric_datum d2({quad5, quad5});
    CHECK(std::abs(d2.coeff(2) + 2.0) < 1e-15);
    CHECK(d2.N() == 25);

    const auto d = default_datum();
    CHECK(std::abs(d.coeff(1) - 1.0) < 1e-15);
    CHECK(std::abs(d.coeff(6) - d.coeff(2) * d.coeff(3)) < 1e-14);
    CHECK(d.N() == 91);
    CHECK(std::fabs(std::abs(d.W()) - 1.0) < 1e-12);
}

TEST_CASE("admission rules") {
    CHECK_THROWS_AS(isobaric_datum({chr(7, 1, 1)}), hkv::error);  // odd
    CHECK_THROWS_AS(isobaric_datum({chr(7, 1, 0)}), hkv::error);  // trivial
    CHECK_THROWS_AS(isobaric_datum({chr(25, 1, 0)}), hkv::error);
    CHECK_THROWS_AS(isobaric_datum({chr(5, 2, 5)}), hkv::error);  // imprimitive mod 25
    CHECK_NOTHROW(parse_components("7:2,13:6"));
    CHECK_THROWS_AS(parse_components("15:2"), hkv::error);
}

TEST_CASE("segmented sieve matches factorization and is multiplicative") {
    const auto d = default_datum();
    const i64 M = 20000;
    std::vector<cplx> a(M + 1);
    std::vector<double> dn(M + 1);
    coefficient_sieve(d, M, 777).run([&](i64 m0, const cplx* v, const double* w, std::size_t len) {
        for (std::size_t i = 0; i < len; ++i) {
            a[m0 + i] = v[i];
            dn[m0 + i] = w[i];
        }
    });
    for (i64 m = 1; m <= M; m += 7) CHECK(std::abs(a[m] - d.coeff(m)) < 1e-12);
    for (i64 m = 1; m <= 150; ++m)
        for (i64 k = 1; k <= 130; ++k)
            if (gcd(m, k) == 1) CHECK(std::abs(a[m * k] - a[m] * a[k]) < 1e-12);
    // divisor bound and d_2
    for (i64 m = 1; m <= M; ++m) {
        CHECK(std::abs(a[m]) <= dn[m] + 1e-12);
        if (m <= 400) {
            int cnt = 0;
            for (i64 e = 1; e <= m; ++e) cnt += (m % e == 0);
            CHECK(dn[m] == cnt);
        }
    }
}

TEST_CASE("Ramanujan on average") {
    const auto d = default_datum();
    const auto a = d.coeff_range(50000);
    double s = 0;
    for (std::size_t m = 1; m < a.size(); ++m) {
        s += std::abs(a[m]) / static_cast<double>(m);
        CHECK(s <= std::pow(1 + std::log(static_cast<double>(m)), d.n()));
    }
}

TEST_CASE("dual is an involution") {
    const auto d = default_datum();
    const auto dd = d.dual().dual();
    for (i64 m = 1; m < 500; ++m) CHECK(std::abs(d.coeff(m) - dd.coeff(m)) < 1e-15);
    for (i64 m = 1; m < 100; ++m) CHECK(std::abs(d.dual().coeff(m) - std::conj(d.coeff(m))) < 1e-14);
}

TEST_CASE("Dirichlet L against a direct series") {
    const auto q5 = chr(5, 1, 2);
    const bounded_value L = dirichlet_L(q5, 2.0);
    csum direct;
    for (i64 m = 1; m <= 100000; ++m) direct += q5(m) / (double(m) * double(m));
    CHECK(std::abs(L.value - direct.value()) < 1e-9);
    CHECK(L.bound < 1e-12);
    CHECK_THROWS_AS(dirichlet_L(chr(5, 1, 0), 2.0), hkv::error);
}

TEST_CASE("Dirichlet L functional equation and conjugation") {
    const auto g1 = gamma_data::trivial(1);
    for (const auto& xi : {chr(5, 1, 2), chr(7, 1, 2), chr(13, 1, 4), chr(5, 2, 2)}) {
        for (cplx s : {cplx(0.3, 0.2), cplx(-0.6, 3.5), cplx(0.8, -11.0)}) {
            const cplx lhs = dirichlet_L(xi, s).value;
            const cplx rhs = std::exp(-s * std::log(double(xi.q()))) * gauss_sum(xi) * F_ratio(s, g1) *
                             dirichlet_L(xi.conj(), 1.0 - s).value;
            CHECK(std::abs(lhs - rhs) < 1e-9 * std::max(1.0, std::abs(lhs)));
        }
    }
    const auto q5 = chr(5, 1, 2);
    const cplx s(0.4, 7.0);
    CHECK(std::abs(dirichlet_L(q5, std::conj(s)).value - std::conj(dirichlet_L(q5, s).value)) < 1e-12);
}

TEST_CASE("Euler factor at p removes the p-part") {
    const auto d = default_datum();
    const cplx s(2.2, 1.0);
    const auto trivial5 = chr(5, 1, 0);
    const auto one = chr(11, 1, 0);
    const cplx full = twisted_L(d, one, s, l_mode::product).value / d.euler_inverse(11, s);
    const cplx p_removed = twisted_L(d, trivial5, s, l_mode::product).value;
    CHECK(std::abs(d.euler_inverse(5, s) * full - p_removed) < 1e-12);
}

TEST_CASE("series and product modes agree") {
    const auto d = default_datum();
    const auto chi = chr(5, 3, 2);
    const l_value a = twisted_L(d, chi, 2.5, l_mode::series);
    const l_value b = twisted_L(d, chi, 2.5, l_mode::product);
    CHECK(std::abs(a.value - b.value) < 1e-9);
    CHECK(std::abs(a.value - b.value) <= a.bound + b.bound);
    CHECK_THROWS_AS(twisted_L(d, chi, 0.9, l_mode::series), hkv::error);
}

TEST_CASE("AFE agrees with the product and is Z independent") {
    const auto d = default_datum();
    const auto chi = chr(5, 2, 2);
    const cplx delta(0.6, 0.3);
    const l_value ref = twisted_L(d, chi, delta, l_mode::product);
    const l_value a = twisted_L(d, chi, delta, l_mode::afe);
    CHECK(std::abs(a.value - ref.value) < 1e-6);
    CHECK(std::abs(a.value - ref.value) <= a.bound + ref.bound);
    const auto chi5 = chr(5, 1, 2);
    const l_value ref5 = twisted_L(d, chi5, delta, l_mode::product);
    for (double u : {0.5, 1.0, 1.5}) {
        l_options o;
        o.afe_Z = std::pow(5.0, u);
        const l_value z = twisted_L(d, chi5, delta, l_mode::afe, o);
        CHECK(std::abs(z.value - ref5.value) < 1e-6);
        o.afe_Z *= 2;
        const l_value z2 = twisted_L(d, chi5, delta, l_mode::afe, o);
        CHECK(std::abs(z2.value - z.value) <= z.bound + z2.bound + 1e-12);
    }
    CHECK_THROWS_AS(twisted_L(d, chr(5, 2, 5), delta, l_mode::afe), hkv::error);
}

TEST_CASE("twisted functional equation at sampled s") {
    const auto d = default_datum();
    std::mt19937_64 rng(0x5EED);
    std::uniform_real_distribution<double> re(0.05, 0.95), im(-12, 12);
    for (const auto& chi : {chr(5, 1, 2), chr(5, 2, 4), chr(5, 3, 2)}) {
        for (int i = 0; i < 20; ++i) {
            const cplx s(re(rng), im(rng));
            const cplx lhs = twisted_L(d, chi, s, l_mode::product).value;
            const cplx rhs = fe_rhs(d, chi, s);
            CHECK(std::abs(lhs - rhs) < 1e-8 * std::max(1.0, std::abs(lhs)));
        }
    }
}

TEST_CASE("progression convolution reproduces every twist") {
    const auto d = default_datum();
    const auto g = build_unit_group(5, 2);
    for (cplx s : {cplx(2.0, 0.0), cplx(-0.5, 0.4), cplx(0.6, 0.3)}) {
        const twisted_family fam = twisted_L_all(d, g, s);
        CHECK(fam.bound < 1e-6);
        for (i64 t = 0; t < g->order(); ++t) {
            const cplx ref = twisted_L(d, dirichlet_character(g, t), s, l_mode::product).value;
            CHECK(std::abs(fam.value[t] - ref) < 1e-9 * std::max(1.0, std::abs(ref)));
            CHECK(std::abs(fam.value[t] - ref) <= fam.bound + 1e-12);
        }
    }
}

}  // TEST_SUITE
