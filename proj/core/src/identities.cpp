#include "hkv/identities.hpp"

#include <chrono>
#include <random>

#include "hkv/error.hpp"
#include "hkv/fft.hpp"
#include "hkv/kloosterman.hpp"

namespace hkv {

std::string_view identity_name(identity_id id) {
    switch (id) {
        case identity_id::QO: return "QO";
        case identity_id::SOGS: return "SOGS";
        case identity_id::lcAC: return "lcAC";
        case identity_id::gauss_twist: return "gauss_twist";
        case identity_id::hK2: return "hK2";
        case identity_id::hKsum: return "hKsum";
    }
    return "?";
}

std::vector<i64> sample_classes(std::vector<i64> v, std::size_t k, u64 seed) {
    if (v.size() <= k) return v;
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng() % (v.size() - i));
        std::swap(v[i], v[j]);
    }
    v.resize(k);
    std::sort(v.begin(), v.end());
    return v;
}

namespace {

using clock_type = std::chrono::steady_clock;

struct context {
    prime_power_modulus m;
    unit_group_ptr g;
    std::vector<dirichlet_character> prim_even;
    std::vector<i64> units;

    context(i64 p, int beta)
        : m(prime_power_modulus::make(p, beta)),
          g(build_unit_group(m)),
          prim_even(list_characters(g, char_filter::primitive_even)) {
        for (i64 x = 1; x < m.modulus; ++x)
            if (x % p) units.push_back(x);
    }
};

identity_report start(identity_id id, identity_form form, i64 p, int beta, int n, const sweep_config& cfg) {
    identity_report r;
    r.id = id;
    r.form = form;
    r.p = p;
    r.beta = beta;
    r.n = n;
    r.tolerance = cfg.tolerance;
    return r;
}

std::vector<i64> sweep(const std::vector<i64>& all, identity_report& r, const sweep_config& cfg, i64 modulus) {
    r.exhaustive = modulus <= cfg.exhaustive_limit;
    auto v = r.exhaustive ? all : sample_classes(all, cfg.sample_size, cfg.seed);
    r.cases_declared = v.size();
    return v;
}

void record(identity_report& r, i64 cls, double abs_diff) {
    const double s = abs_diff / r.scale;
    if (r.cases_checked == 0 || s > r.max_abs_residual) {
        r.max_abs_residual = s;
        r.worst_class = cls;
    }
    ++r.cases_checked;
}

void finish(identity_report& r, clock_type::time_point t0) {
    r.runtime_s = std::chrono::duration<double>(clock_type::now() - t0).count();
}

identity_report skipped(identity_report r, std::string why) {
    r.skipped = true;
    r.skip_reason = std::move(why);
    return r;
}

std::vector<cplx> gauss_powers(const context& c, int n) {
    std::vector<cplx> out;
    for (const auto& chi : c.prim_even) {
        const cplx t = gauss_sum(chi);
        cplx v = 1.0;
        for (int j = 0; j < n; ++j) v *= t;
        out.push_back(v);
    }
    return out;
}

// sum over primitive even chi of conj(chi)(r) w_chi
cplx character_sum(const context& c, const std::vector<cplx>& w, i64 r) {
    csum acc;
    const i64 k = c.g->dlog(r);
    if (k < 0) return 0.0;
    for (std::size_t i = 0; i < c.prim_even.size(); ++i) acc += c.g->root(-c.prim_even[i].index() * k) * w[i];
    return acc.value();
}

}  // namespace

identity_report verify_QO(i64 p, int beta, const sweep_config& cfg) {
    const auto t0 = clock_type::now();
    context c(p, beta);
    auto r = start(identity_id::QO, identity_form::literal, p, beta, 0, cfg);
    std::vector<i64> all;
    for (i64 x = 0; x < c.m.modulus; ++x) all.push_back(x);
    const auto cls = sweep(all, r, cfg, c.m.modulus);
    r.scale = std::max<double>(1.0, static_cast<double>(c.prim_even.size()));
    const i64 q = c.m.modulus, q1 = q / p;
    const std::vector<cplx> ones(c.prim_even.size(), 1.0);
    for (i64 m : cls) {
        // sum chi(m) = conj of sum conj(chi)(m)
        const cplx lhs = std::conj(character_sum(c, ones, m));
        double expect;
        const bool pm1 = mod(m - 1, q) == 0 || mod(m + 1, q) == 0;
        if (m % p == 0) {
            expect = 0;
        } else if (beta == 1) {
            expect = pm1 ? static_cast<double>(p - 1) / 2.0 - 1.0 : -1.0;
        } else if (pm1) {
            expect = static_cast<double>(phi_star(p, beta)) / 2.0;
        } else if (mod(m - 1, q1) == 0 || mod(m + 1, q1) == 0) {
            expect = -static_cast<double>(euler_phi_prime_power(p, beta - 1)) / 2.0;
        } else {
            expect = 0;
        }
        record(r, m, std::abs(lhs - expect));
    }
    finish(r, t0);
    return r;
}

identity_report verify_SOGS(i64 p, int beta, int n, identity_form form, const sweep_config& cfg) {
    const auto t0 = clock_type::now();
    auto r = start(identity_id::SOGS, form, p, beta, n, cfg);
    if (beta == 1 && p < 5) return skipped(r, "prime-level formula needs p >= 5");
    context c(p, beta);
    const auto cls = sweep(c.units, r, cfg, c.m.modulus);
    r.scale = std::pow(static_cast<double>(p), beta * (n + 1) / 2.0);
    const auto w = gauss_powers(c, n);
    kl_table kl(c.g, n);
    const double phi = static_cast<double>(c.m.phi());
    const double sign = n % 2 ? -1.0 : 1.0;
    for (i64 x : cls) {
        const cplx lhs = character_sum(c, w, x);
        cplx rhs;
        if (beta >= 2)
            rhs = phi / 2.0 * kl.pm(x);
        else if (form == identity_form::literal)
            rhs = (phi / 2.0 - 1.0) * kl.pm(x) - sign;
        else
            rhs = phi / 2.0 * kl.pm(x) - sign;
        record(r, x, std::abs(lhs - rhs));
    }
    finish(r, t0);
    return r;
}

identity_report verify_lcAC(i64 p, int beta, identity_form form, const sweep_config& cfg) {
    const auto t0 = clock_type::now();
    auto r = start(identity_id::lcAC, form, p, beta, 1, cfg);
    if (beta == 1 && p < 5) return skipped(r, "prime-level formula needs p >= 5");
    context c(p, beta);
    const auto cls = sweep(c.units, r, cfg, c.m.modulus);
    r.scale = 1.0;
    const auto w = gauss_powers(c, 1);
    const double phi = static_cast<double>(c.m.phi());
    const i64 q = c.m.modulus;
    for (i64 m : cls) {
        const cplx lhs = e_frac(m, q) + e_frac(-m, q);
        const cplx s = character_sum(c, w, m);
        cplx rhs;
        if (beta >= 2)
            rhs = 2.0 / phi * s;
        else if (form == identity_form::literal)
            // the (-1)^n term taken at n = 1
            rhs = 2.0 / static_cast<double>(p - 3) * (s + 1.0);
        else
            rhs = 2.0 / static_cast<double>(p - 1) * (s - 1.0);
        record(r, m, std::abs(lhs - rhs));
    }
    finish(r, t0);
    return r;
}

identity_report verify_gauss_twist(i64 p, int beta, const sweep_config& cfg) {
    const auto t0 = clock_type::now();
    context c(p, beta);
    auto r = start(identity_id::gauss_twist, identity_form::literal, p, beta, 0, cfg);
    const auto cls = sweep(c.units, r, cfg, c.m.modulus);
    r.scale = std::pow(static_cast<double>(p), beta / 2.0);
    const auto prim = list_characters(c.g, char_filter::primitive);
    std::vector<cplx> tau_bar;
    for (const auto& chi : prim) tau_bar.push_back(gauss_sum(chi.conj()));
    const i64 q = c.m.modulus, phi = c.g->order();
    dft_plan plan(static_cast<std::size_t>(phi));
    std::vector<cplx> v(static_cast<std::size_t>(phi));
    r.cases_declared *= prim.size();
    for (i64 x : cls) {
        // v_k = e(-x g^k / q); the DFT at t gives sum_h conj(chi_t)(h) e(-xh/q)
        for (i64 k = 0; k < phi; ++k) v[static_cast<std::size_t>(k)] = e_frac(-mulmod(x, c.g->power(k), q), q);
        plan.forward(v);
        for (std::size_t i = 0; i < prim.size(); ++i) {
            const cplx lhs = v[static_cast<std::size_t>(prim[i].index())];
            const cplx rhs = prim[i](-x) * tau_bar[i];
            record(r, x, std::abs(lhs - rhs));
        }
    }
    finish(r, t0);
    return r;
}

identity_report verify_hK2(i64 p, int beta, int n, identity_form form, const sweep_config& cfg) {
    const auto t0 = clock_type::now();
    context c(p, beta);
    auto r = start(identity_id::hK2, form, p, beta, n, cfg);
    std::vector<i64> idx;
    for (std::size_t i = 0; i < c.prim_even.size(); ++i) idx.push_back(static_cast<i64>(i));
    const auto cls = sweep(idx, r, cfg, c.m.modulus);
    r.scale = std::pow(static_cast<double>(p), beta * n / 2.0);
    kl_table kl(c.g, n);
    const auto w = gauss_powers(c, n);
    std::vector<i64> support;
    for (i64 x : c.units)
        if (form == identity_form::corrected || power_residue_symbol(x, n, c.m)) support.push_back(x);
    for (i64 i : cls) {
        const auto& chi = c.prim_even[static_cast<std::size_t>(i)];
        csum acc;
        for (i64 x : support) acc += chi(x) * kl(x);
        record(r, chi.index(), std::abs(acc.value() - w[static_cast<std::size_t>(i)]));
    }
    finish(r, t0);
    return r;
}

identity_report verify_hKsum(i64 p, int beta, int n, const sweep_config& cfg) {
    const auto t0 = clock_type::now();
    auto r = start(identity_id::hKsum, identity_form::literal, p, beta, n, cfg);
    if (beta < 4 || n < 2) return skipped(r, "stated for beta >= 4 and n >= 2");
    context c(p, beta);
    const auto cls = sweep(c.units, r, cfg, c.m.modulus);
    const double pbn = std::pow(static_cast<double>(p), beta * n);
    r.scale = pbn;
    kl_table kl(c.g, n);
    const i64 q = c.m.modulus;
    std::vector<i64> support;
    for (i64 x : c.units)
        if (power_residue_symbol(x, n, c.m)) support.push_back(x);
    const std::vector<cplx> ones(c.prim_even.size(), 1.0);
    const double phi = static_cast<double>(c.m.phi());
    for (i64 m : cls) {
        csum acc;
        for (i64 x : support) acc += kl(x) * kl.pm(mulmod(m, x, q));
        const cplx rhs = pbn * 2.0 / phi * character_sum(c, ones, m);
        record(r, m, std::abs(acc.value() - rhs));
    }
    finish(r, t0);
    return r;
}

std::vector<identity_report> run_identity_suite(std::string_view suite, i64 p, int beta, int n, identity_form form,
                                                const sweep_config& cfg) {
    std::vector<identity_report> out;
    const bool all = suite == "all";
    bool known = all;
    if (all || suite == "qo") {
        out.push_back(verify_QO(p, beta, cfg));
        known = true;
    }
    if (all || suite == "sogs") {
        out.push_back(verify_SOGS(p, beta, n, form, cfg));
        known = true;
    }
    if (all || suite == "lcac") {
        out.push_back(verify_lcAC(p, beta, form, cfg));
        known = true;
    }
    if (all || suite == "gausstwist") {
        out.push_back(verify_gauss_twist(p, beta, cfg));
        known = true;
    }
    if (all || suite == "hk2") {
        out.push_back(verify_hK2(p, beta, n, form, cfg));
        known = true;
    }
    if (all || suite == "hksum") {
        out.push_back(verify_hKsum(p, beta, n, cfg));
        known = true;
    }
    require(known, errc::config_invalid, "unknown suite '" + std::string(suite) + "'");
    return out;
}

}  // namespace hkv
