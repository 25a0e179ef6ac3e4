#include <doctest.h>

#include "hkv/identities.hpp"
#include "hkv/kloosterman.hpp"

using namespace hkv;

namespace {

double qo_value(i64 p, int beta, i64 m) {
    auto g = build_unit_group(p, beta);
    cplx s = 0;
    for (const auto& chi : list_characters(g, char_filter::primitive_even)) s += chi(m);
    CHECK(std::abs(s.imag()) < 1e-12);
    return s.real();
}

}  // namespace

TEST_SUITE("identity_suite") {

TEST_CASE("orthogonality values at hand-picked classes") {
    CHECK(qo_value(5, 2, 1) == doctest::Approx(8.0));
    CHECK(qo_value(5, 2, 24) == doctest::Approx(8.0));
    CHECK(qo_value(5, 2, 26) == doctest::Approx(8.0));
    CHECK(qo_value(5, 2, 6) == doctest::Approx(-2.0));
    CHECK(qo_value(5, 2, 2) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(qo_value(7, 1, 3) == doctest::Approx(-1.0));
    CHECK(qo_value(7, 1, 6) == doctest::Approx(2.0));
}

TEST_CASE("suites pass at beta >= 2") {
    for (auto [p, b, n] : {std::tuple{5, 2, 1}, {5, 2, 2}, {5, 3, 3}, {7, 2, 2}, {3, 3, 2}, {5, 4, 2}}) {
        for (const auto& r : run_identity_suite("all", p, b, n)) {
            INFO(identity_name(r.id), " p=", p, " beta=", b, " n=", n, " residual=", r.max_abs_residual);
            CHECK(r.pass());
            if (!r.skipped) CHECK(r.cases_checked == r.cases_declared);
        }
    }
}

TEST_CASE("prime-level forms") {
    for (i64 p : {5, 7, 11}) {
        for (int n : {1, 2, 3}) {
            CHECK(verify_SOGS(p, 1, n, identity_form::corrected).pass());
            CHECK_FALSE(verify_SOGS(p, 1, n, identity_form::literal).pass());
            CHECK(verify_hK2(p, 1, n, identity_form::corrected).pass());
        }
        CHECK(verify_lcAC(p, 1, identity_form::corrected).pass());
        CHECK_FALSE(verify_lcAC(p, 1, identity_form::literal).pass());
        CHECK(verify_QO(p, 1).pass());
        CHECK(verify_gauss_twist(p, 1).pass());
    }
    CHECK(verify_SOGS(3, 1, 2).skipped);
}

TEST_CASE("prime-level literal form misses exactly one Kloosterman term") {
    const i64 p = 7;
    auto g = build_unit_group(p, 1);
    kl_table kl(g, 2);
    const auto chars = list_characters(g, char_filter::primitive_even);
    for (i64 r = 1; r < p; ++r) {
        cplx lhs = 0;
        for (const auto& chi : chars) {
            const cplx t = gauss_sum(chi);
            lhs += std::conj(chi(r)) * t * t;
        }
        const cplx literal = (3.0 - 1.0) * kl.pm(r) - 1.0;
        CHECK(std::abs(lhs - literal - kl.pm(r)) < 1e-12);
    }
}

TEST_CASE("restricted hK2 sum needs vanishing off power residues") {
    // at the prime level Kl_2 does not vanish on non-squares
    CHECK_FALSE(verify_hK2(7, 1, 2, identity_form::literal).pass());
    CHECK(verify_hK2(7, 2, 2, identity_form::literal).pass());
    // every class is a cube mod 5
    CHECK(verify_hK2(5, 1, 3, identity_form::literal).pass());
}

TEST_CASE("hKsum gate") {
    CHECK(verify_hKsum(5, 3, 2).skipped);
    CHECK(verify_hKsum(5, 4, 1).skipped);
    const auto r = verify_hKsum(5, 4, 3);
    CHECK_FALSE(r.skipped);
    CHECK(r.pass());
}

TEST_CASE("sampling is deterministic and distinct") {
    std::vector<i64> v(5000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<i64>(i);
    const auto a = sample_classes(v, 1000, 0x5EED);
    const auto b = sample_classes(v, 1000, 0x5EED);
    CHECK(a == b);
    CHECK(std::adjacent_find(a.begin(), a.end()) == a.end());
    sweep_config cfg;
    cfg.exhaustive_limit = 100;
    const auto r = verify_QO(7, 4, cfg);
    CHECK_FALSE(r.exhaustive);
    CHECK(r.cases_checked == 1000);
}

}
