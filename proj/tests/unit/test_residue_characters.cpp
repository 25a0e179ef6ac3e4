#include <doctest.h>

#include <random>

#include "hkv/error.hpp"
#include "hkv/fft.hpp"
#include "hkv/kloosterman.hpp"

using namespace hkv;

TEST_SUITE("residue_characters") {

TEST_CASE("unit group generators and orders") {
    auto g51 = build_unit_group(5, 1);
    CHECK(g51->generator() == 2);
    CHECK(g51->order() == 4);
    auto g52 = build_unit_group(5, 2);
    CHECK(g52->generator() == 2);
    CHECK(g52->order() == 20);
    auto g31 = build_unit_group(3, 1);
    CHECK(g31->generator() == 2);
    CHECK(g31->order() == 2);
    CHECK(build_unit_group(7, 3)->generator() == 3);
    // -1 sits halfway round the cycle
    for (auto [p, b] : {std::pair{5, 3}, {7, 2}, {11, 2}, {13, 1}}) {
        auto g = build_unit_group(p, b);
        CHECK(g->power(g->order() / 2) == g->q() - 1);
    }
}

TEST_CASE("unit group rejects p = 2 and oversized moduli") {
    CHECK_THROWS_AS(build_unit_group(2, 3), hkv::error);
    try {
        build_unit_group(2, 3);
    } catch (const hkv::error& e) {
        CHECK(e.code() == errc::not_cyclic);
    }
    try {
        prime_power_modulus::make(5, 20);
        FAIL("expected overflow");
    } catch (const hkv::error& e) {
        CHECK(e.code() == errc::overflow);
    }
}

TEST_CASE("dlog round trip on random units") {
    auto g = build_unit_group(7, 4);
    std::mt19937_64 rng(0x5EED);
    std::uniform_int_distribution<i64> d(1, g->q() - 1);
    int checked = 0;
    while (checked < 10000) {
        const i64 u = d(rng);
        if (u % 7 == 0) continue;
        CHECK(g->power(g->dlog(u)) == u);
        ++checked;
    }
}

TEST_CASE("character counts") {
    auto g = build_unit_group(5, 3);
    CHECK(list_characters(g, char_filter::primitive).size() == 80);
    CHECK(list_characters(g, char_filter::primitive_even).size() == 40);
    CHECK(list_characters(g, char_filter::all).size() == 100);
    CHECK(list_characters(build_unit_group(5, 1), char_filter::primitive_even).size() == 1);
    CHECK(list_characters(build_unit_group(7, 1), char_filter::primitive_even).size() == 2);
    for (int b = 1; b <= 4; ++b)
        CHECK(static_cast<i64>(list_characters(build_unit_group(7, b), char_filter::primitive_even).size()) ==
              count_primitive_even(7, b));
}

TEST_CASE("characters vanish off units and are unimodular on them") {
    auto g = build_unit_group(5, 2);
    for (const auto& chi : list_characters(g, char_filter::all)) {
        for (i64 x = 0; x < 25; ++x) {
            if (x % 5 == 0)
                CHECK(chi(x) == cplx(0.0));
            else
                CHECK(std::abs(std::abs(chi(x)) - 1.0) < 1e-14);
        }
        CHECK(std::abs(chi(-1) - (chi.even() ? 1.0 : -1.0)) < 1e-14);
    }
}

TEST_CASE("primitivity agrees with conductor test") {
    // chi is imprimitive mod p^b iff it is constant on 1 + p^(b-1) Z
    auto g = build_unit_group(5, 3);
    for (const auto& chi : list_characters(g, char_filter::all)) {
        bool induced = true;
        for (i64 k = 1; k < 5; ++k)
            if (std::abs(chi(1 + 25 * k) - 1.0) > 1e-12) induced = false;
        CHECK(chi.primitive() == !induced);
    }
}

TEST_CASE("gauss sums") {
    auto g = build_unit_group(5, 1);
    dirichlet_character quad(g, 2);
    CHECK(std::abs(gauss_sum(quad) - std::sqrt(5.0)) < 1e-13);
    dirichlet_character triv(g, 0);
    CHECK(std::abs(gauss_sum(triv) + 1.0) < 1e-13);
    auto g2 = build_unit_group(5, 2);
    for (const auto& chi : list_characters(g2, char_filter::primitive)) {
        CHECK(std::abs(std::norm(gauss_sum(chi)) - 25.0) < 1e-10);
        if (chi.even()) CHECK(std::abs(gauss_sum(chi.conj()) - std::conj(gauss_sum(chi))) < 1e-10);
    }
}

TEST_CASE("small Kloosterman values") {
    const auto m25 = prime_power_modulus::make(5, 2);
    for (auto meth : {kl_method::naive, kl_method::dp, kl_method::fft_dp}) {
        CHECK(std::abs(kloosterman({1, 1, m25, meth}) - e_frac(1, 25)) < 1e-13);
        CHECK(std::abs(kloosterman_pm({1, 1, m25, meth}) - 2.0 * std::cos(two_pi / 25)) < 1e-13);
        const auto m5 = prime_power_modulus::make(5, 1);
        CHECK(std::abs(kloosterman({2, 1, m5, meth}) - (2.0 + 2.0 * std::cos(4 * pi / 5))) < 1e-12);
    }
}

TEST_CASE("Kloosterman sums reject c divisible by p") {
    CHECK_THROWS_AS(kloosterman({2, 10, prime_power_modulus::make(5, 2), kl_method::dp}), hkv::error);
}

TEST_CASE("methods agree pairwise") {
    for (auto [p, b, n] : {std::tuple{5, 2, 2}, {5, 3, 3}, {7, 2, 2}, {3, 4, 2}, {5, 1, 4}}) {
        auto g = build_unit_group(p, b);
        const auto a = kl_dlog_table(*g, n, kl_method::naive);
        const auto d = kl_dlog_table(*g, n, kl_method::dp);
        const auto f = kl_dlog_table(*g, n, kl_method::fft_dp);
        const double scale = std::pow(static_cast<double>(g->q()), (n - 1) / 2.0);
        double worst = 0;
        for (std::size_t k = 0; k < a.size(); ++k)
            worst = std::max({worst, std::abs(a[k] - d[k]), std::abs(a[k] - f[k])});
        CHECK(worst < 1e-9 * scale);
    }
}

TEST_CASE("Weil-type bound at prime modulus") {
    for (auto [p, n] : {std::pair{7, 2}, {11, 3}, {13, 2}}) {
        auto g = build_unit_group(p, 1);
        for (const auto& v : kl_dlog_table(*g, n, kl_method::fft_dp))
            CHECK(std::abs(v) <= n * std::pow(static_cast<double>(p), (n - 1) / 2.0) + 1e-9);
    }
}

TEST_CASE("power residues and roots") {
    const auto m5 = prime_power_modulus::make(5, 1);
    const auto m125 = prime_power_modulus::make(5, 3);
    CHECK(power_residue_symbol(1, 3, m125));
    CHECK_FALSE(power_residue_symbol(2, 2, m5));
    CHECK(power_residue_symbol(4, 2, m125));
    CHECK(nth_roots(4, 2, m5) == std::vector<i64>{2, 3});
    CHECK(nth_roots(2, 2, m5).empty());
    CHECK(nth_roots(1, 1, m125) == std::vector<i64>{1});
    const auto m = prime_power_modulus::make(7, 4);
    for (i64 c = 1; c < 200; ++c) {
        if (c % 7 == 0) continue;
        const auto r = nth_roots(c, 3, m);
        CHECK(r.size() == (power_residue_symbol(c, 3, m) ? 3u : 0u));
        for (i64 w : r) CHECK(powmod(w, 3, m.modulus) == c);
    }
}

TEST_CASE("Kloosterman sums vanish off n-th power residues beyond the prime level") {
    for (auto [p, b, n] : {std::tuple{5, 4, 2}, {7, 2, 3}, {7, 3, 2}}) {
        const auto m = prime_power_modulus::make(p, b);
        kl_table t(build_unit_group(m), n);
        const double scale = std::pow(static_cast<double>(m.modulus), (n - 1) / 2.0);
        for (i64 c = 1; c < m.modulus; ++c) {
            if (c % p == 0) continue;
            if (!power_residue_symbol(c, n, m)) CHECK(std::abs(t(c)) < 1e-9 * scale);
        }
    }
}

TEST_CASE("salie calibration") {
    clear_lift_registry();
    const auto m = prime_power_modulus::make(5, 4);
    CHECK_THROWS_AS(kloosterman({2, 3, m, kl_method::salie}), hkv::error);
    const auto r2 = run_salie_calibration(5, 4, 2);
    CHECK(r2.classes.size() == 500);
    CHECK(r2.matches[0]);
    CHECK(r2.matches[1]);
    REQUIRE(r2.selected.has_value());
    CHECK(*r2.selected == lift_convention::C1);
    CHECK(std::abs(kloosterman({2, 3, m, kl_method::salie}) - kloosterman({2, 3, m, kl_method::dp})) < 1e-8);
    const auto r3 = run_salie_calibration(5, 4, 3);
    int matched = 0;
    for (bool b : r3.matches) matched += b;
    CHECK(matched == 1);
    CHECK(r3.matches[1]);
    try {
        run_salie_calibration(5, 3, 2);
        FAIL("odd beta accepted");
    } catch (const hkv::error& e) {
        CHECK(e.code() == errc::salie_unavailable);
    }
}

TEST_CASE("dft matches direct sums for awkward lengths") {
    for (std::size_t n : {1u, 2u, 3u, 7u, 20u, 64u, 100u, 2058u}) {
        std::vector<cplx> x(n);
        std::mt19937_64 rng(n);
        std::normal_distribution<double> d;
        for (auto& v : x) v = {d(rng), d(rng)};
        auto y = x;
        dft_plan plan(n);
        plan.forward(y);
        for (std::size_t k = 0; k < n; k += std::max<std::size_t>(1, n / 13)) {
            cplx ref = 0;
            for (std::size_t j = 0; j < n; ++j) ref += x[j] * e_frac(-static_cast<i64>(j * k % n), static_cast<i64>(n));
            CHECK(std::abs(y[k] - ref) < 1e-10 * std::sqrt(static_cast<double>(n)) * 10);
        }
        plan.inverse(y);
        for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(y[j] - x[j]) < 1e-12);
    }
}

}
