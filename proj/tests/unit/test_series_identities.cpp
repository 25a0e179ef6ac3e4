#include <doctest.h>

#include "hkv/error.hpp"
#include "hkv/kloosterman.hpp"
#include "hkv/series.hpp"

using namespace hkv;

namespace {

dirichlet_character chr(i64 p, int beta, i64 t) { return {build_unit_group(p, beta), t}; }

isobaric_datum default_datum() { return isobaric_datum({chr(7, 1, 2), chr(13, 1, 2)}); }
isobaric_datum cubic7() { return isobaric_datum({chr(7, 1, 2)}); }

series_params gl1(i64 p, int beta, int k, i64 h) { return {series_family::hk_gl1, cubic7(), p, beta, h, k}; }

}  // namespace

TEST_SUITE("series_identities") {

TEST_CASE("GL1 hyper-Kloosterman series: raw against decomposition at s = 3") {
    const auto sp = gl1(5, 2, 2, 3);
    const series_value raw = left_raw(sp, 3.0, 0, 1e-11, 20'000'000);
    const series_value dec = left_by_decomposition(sp, 3.0);
    CHECK(std::abs(raw.value - dec.value) < 1e-9);
    CHECK(std::abs(raw.value - dec.value) <= raw.bound + dec.bound);
}

TEST_CASE("base series follows its two defining branches") {
    for (int beta : {1, 2}) {
        const series_params sp(series_family::hk_gl1_base, cubic7(), 5, beta, 2);
        const auto xi = chr(7, 1, 2);
        const i64 q = sp.q();
        // direct sum of the defining display
        csum direct;
        const double f3 = 2.0 / 2.0;  // 2 / (p - 3) at p = 5
        for (i64 m = 1; m <= 400000; ++m) {
            if (m % 5 == 0) continue;
            const bool pm_top = mod(m - 2, q) == 0 || mod(m + 2, q) == 0;
            double c = 0;
            if (beta >= 2) {
                const bool pm_low = mod(m - 2, q / 5) == 0 || mod(m + 2, q / 5) == 0;
                c = (mod(m - 2, q) == 0 ? 1.0 : 0.0) - ((pm_low && !pm_top) ? 0.2 : 0.0);
            } else {
                c = pm_top ? 1.0 : -f3;
            }
            if (c != 0) direct += c * xi(m) / (double(m) * double(m));
        }
        const series_value dec = left_by_decomposition(sp, 2.0);
        CHECK(std::abs(dec.value - direct.value()) < 1e-5);
        const series_value raw = left_raw(sp, 3.0, 0, 1e-11, 20'000'000);
        CHECK(std::abs(raw.value - left_by_decomposition(sp, 3.0).value) < 1e-9);
    }
}

TEST_CASE("additive twist equals its character decomposition") {
    const auto d = default_datum();
    const series_params sp(series_family::additive_D, d, 5, 2, 3);
    const auto g = sp.group;
    csum acc;
    for (const auto& chi : list_characters(g, char_filter::primitive_even))
        acc += std::conj(chi(sp.h)) * gauss_sum(chi) * twisted_L(d, chi.conj(), 3.0, l_mode::product).value;
    const cplx explicit_form = 2.0 / double(g->order()) * acc.value();
    const series_value raw = left_raw(sp, 3.0, 0, 1e-10, 20'000'000);
    CHECK(std::abs(raw.value - explicit_form) < 1e-9);
    CHECK(std::abs(left_by_decomposition(sp, 3.0).value - explicit_form) < 1e-10);
}

TEST_CASE("degree-n hyper-Kloosterman series equals its character decomposition") {
    const auto d = default_datum();
    const series_params sp(series_family::hk_gln, d, 5, 2, 4);
    const auto g = sp.group;
    const cplx s(0.3, 2.0);
    csum acc;
    for (const auto& chi : list_characters(g, char_filter::primitive_even))
        acc += chi(sp.h) * std::pow(gauss_sum(chi.conj()), 2) * twisted_L(d, chi, s, l_mode::product).value;
    const cplx explicit_form = 2.0 / double(g->order()) * acc.value();
    CHECK(std::abs(left_by_decomposition(sp, s).value - explicit_form) < 1e-9);
}

TEST_CASE("kernel tables reduce to Kloosterman sums") {
    const auto g = build_unit_group(5, 3);
    for (int k = 1; k <= 3; ++k) {
        const auto K = primitive_even_kernel(g, k);
        const auto kl = kl_pm_residues(g, k);
        for (i64 b = 1; b < g->q(); ++b) CHECK(std::abs(K[b] - kl[b]) < 1e-9);
    }
    const auto g1 = build_unit_group(7, 1);
    const auto K = primitive_even_kernel(g1, 2);
    const auto kl = kl_pm_residues(g1, 2);
    for (i64 b = 1; b < 7; ++b) CHECK(std::abs(K[b] - (kl[b] - 2.0 / 6.0)) < 1e-12);
}

TEST_CASE("D(A)(i) two-sided: dual argument is inverted in the literal form") {
    const auto sp = gl1(5, 2, 2, 2);
    const cplx s(-0.7, 0.4);
    const auto lit = verify_functional_identity(sp, s, identity_form::literal);
    const auto cor = verify_functional_identity(sp, s, identity_form::corrected);
    CHECK(cor.relative_residual < 1e-6);
    CHECK(cor.bars_dominate());
    CHECK(lit.relative_residual > 1e-3);
    for (int k : {1, 3})
        for (int beta : {2, 3}) {
            const auto r = verify_functional_identity(gl1(5, beta, k, 2), s, identity_form::corrected);
            CHECK(r.relative_residual < 1e-6);
        }
}

TEST_CASE("AFI(i) and DAFI(A)(i) hold as stated") {
    const auto d = default_datum();
    for (cplx s : {cplx(-0.5, 0.4), cplx(-0.5, -0.4), cplx(-0.7, 0.4)}) {
        for (auto fam : {series_family::additive_D, series_family::hk_gln}) {
            const series_params sp(fam, d, 5, 2, 2);
            const auto r = verify_functional_identity(sp, s, identity_form::literal);
            CHECK_MESSAGE(r.relative_residual < 1e-8, r.check);
            CHECK(r.bars_dominate());
        }
    }
}

TEST_CASE("prime-level branches: corrected forms hold, literal forms do not") {
    const auto d = default_datum();
    const cplx s(-0.5, 0.4);
    for (auto fam : {series_family::additive_D, series_family::hk_gln}) {
        const series_params sp(fam, d, 11, 1, 2);
        const auto cor = verify_functional_identity(sp, s, identity_form::corrected);
        CHECK_MESSAGE(cor.relative_residual < 1e-8, cor.check);
        const auto lit = verify_functional_identity(sp, s, identity_form::literal);
        CHECK_MESSAGE(lit.relative_residual > 1e-4, lit.check);
    }
    const isobaric_datum two({chr(5, 1, 2), chr(13, 1, 2)});
    const series_params sp7(series_family::additive_D, two, 7, 1, 3);
    CHECK(verify_functional_identity(sp7, cplx(-0.5, 0.4), identity_form::corrected).relative_residual < 1e-5);
    for (int k : {1, 2, 3}) {
        const auto r = verify_functional_identity(gl1(11, 1, k, 3), s, identity_form::corrected);
        CHECK(r.relative_residual < 1e-8);
    }
    CHECK_THROWS_AS(series_params(series_family::hk_gln, d, 3, 1, 1), hkv::error);
}

TEST_CASE("h and -h give the same series") {
    const auto d = default_datum();
    const cplx s(0.4, 1.5);
    for (auto fam : {series_family::additive_D, series_family::hk_gln}) {
        const series_params a(fam, d, 5, 2, 3), b(fam, d, 5, 2, -3);
        CHECK(std::abs(left_by_decomposition(a, s).value - left_by_decomposition(b, s).value) < 1e-12);
    }
    CHECK(std::abs(left_by_decomposition(gl1(5, 2, 2, 3), s).value - left_by_decomposition(gl1(5, 2, 2, -3), s).value) <
          1e-12);
    const series_params b1(series_family::hk_gl1_base, cubic7(), 5, 1, 2), b2(series_family::hk_gl1_base, cubic7(), 5, 1, -2);
    CHECK(std::abs(left_by_decomposition(b1, s).value - left_by_decomposition(b2, s).value) < 1e-12);
}

TEST_CASE("decomposed left side is smooth in s") {
    const auto sp = gl1(5, 2, 2, 2);
    const cplx s(-0.3, 0.7);
    const double e = 1e-4, hstep = 1e-2;
    const cplx f0 = left_by_decomposition(sp, s).value;
    const cplx f1 = left_by_decomposition(sp, s + e).value;
    const cplx deriv =
        (left_by_decomposition(sp, s + hstep).value - left_by_decomposition(sp, s - hstep).value) / (2 * hstep);
    CHECK(std::abs(f1 - f0) < 1e-3 * std::max(std::abs(deriv), 1e-12) + 2 * e * std::abs(deriv));
    CHECK(std::abs(f1 - f0 - e * deriv) < 1e-3 * e * std::abs(deriv));
}

TEST_CASE("degree-one identity composed twice returns the input") {
    const auto xi = chr(7, 1, 2);
    const i64 h = 2;
    const series_params sp = gl1(5, 2, 1, h);
    const cplx s(-0.6, 0.3);
    const cplx start = left_by_decomposition(sp, s).value;
    const auto t1 = functional_identity_terms(sp, identity_form::corrected);
    REQUIRE(t1.size() == 1);
    // t1 pairs conj xi against K_0(hq / m) = K_0(m / hq) at 1 - s
    const i64 q = sp.q();
    const i64 h2 = invmod(mod(h * 7, q), q);
    series_params back(series_family::hk_gl1_base, isobaric_datum({xi.conj()}), 5, 2, h2);
    back.corrected_base = true;
    const cplx z = 1.0 - s;
    const cplx mid = left_by_decomposition(back, z).value;
    const cplx mid_fe = right_series(back, functional_identity_terms(back, identity_form::corrected), z, 0, true).value;
    CHECK(std::abs(mid - mid_fe) < 1e-8 * std::abs(mid));
    const cplx pref = t1[0].coeff * std::exp(-s * std::log(t1[0].Y)) * F_ratio(s, sp.datum.gamma());
    CHECK(std::abs(pref * mid_fe - start) < 1e-8 * std::abs(start));
}

TEST_CASE("side legality") {
    const auto sp = gl1(5, 2, 2, 2);
    CHECK_THROWS_AS(eval_series(sp, 0.5, series_side::right), hkv::error);
    series_options o;
    o.method = left_method::raw;
    CHECK_THROWS_AS(eval_series(sp, 0.8, series_side::left, o), hkv::error);
    CHECK_NOTHROW(eval_series(sp, cplx(-0.5, 0.4), series_side::right));
}

TEST_CASE("truncated dual series agrees with the progression form within its bar") {
    const auto sp = gl1(5, 2, 2, 2);
    const cplx s(-1.5, 0.4);
    const auto terms = functional_identity_terms(sp, identity_form::corrected);
    const series_value a = right_series(sp, terms, s);
    const series_value b = right_series(sp, terms, s, 200000);
    CHECK(std::abs(a.value - b.value) <= a.bound + b.bound);
    CHECK(b.bound < 1e-3 * std::abs(a.value));
}

}  // TEST_SUITE
