#include "hkv/kloosterman.hpp"

#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <tuple>

#include "hkv/error.hpp"
#include "hkv/fft.hpp"

namespace hkv {

std::string_view kl_method_name(kl_method m) {
    switch (m) {
        case kl_method::naive: return "naive";
        case kl_method::dp: return "dp";
        case kl_method::fft_dp: return "fft_dp";
        case kl_method::salie: return "salie";
    }
    return "?";
}

kl_method parse_kl_method(std::string_view s) {
    if (s == "naive") return kl_method::naive;
    if (s == "dp") return kl_method::dp;
    if (s == "fft_dp" || s == "fft") return kl_method::fft_dp;
    if (s == "salie") return kl_method::salie;
    raise(errc::config_invalid, "unknown Kloosterman method '" + std::string(s) + "'");
}

std::string_view lift_convention_name(lift_convention c) {
    switch (c) {
        case lift_convention::C1: return "C1";
        case lift_convention::C2: return "C2";
        case lift_convention::C3: return "C3";
    }
    return "?";
}

namespace {

std::vector<cplx> additive_table(i64 q) {
    std::vector<cplx> t(static_cast<std::size_t>(q));
    for (i64 a = 0; a < q; ++a) t[static_cast<std::size_t>(a)] = e_frac(a, q);
    return t;
}

cplx naive_single(const unit_group& g, int n, i64 c, const std::vector<cplx>& eq) {
    const i64 q = g.q();
    if (n == 1) return eq[static_cast<std::size_t>(mod(c, q))];
    const i64 phi = g.order();
    const i64 kc = g.dlog(c);
    std::vector<i64> k(static_cast<std::size_t>(n - 1), 0);
    csum acc;
    for (;;) {
        i64 s = 0, ks = 0;
        for (int j = 0; j < n - 1; ++j) {
            s += g.power(k[static_cast<std::size_t>(j)]);
            ks += k[static_cast<std::size_t>(j)];
        }
        s += g.power(kc - ks);
        acc += eq[static_cast<std::size_t>(s % q)];
        int j = 0;
        while (j < n - 1 && ++k[static_cast<std::size_t>(j)] == phi) k[static_cast<std::size_t>(j++)] = 0;
        if (j == n - 1) break;
    }
    return acc.value();
}

std::vector<cplx> base_vector(const unit_group& g) {
    std::vector<cplx> e(static_cast<std::size_t>(g.order()));
    for (i64 k = 0; k < g.order(); ++k) e[static_cast<std::size_t>(k)] = e_frac(g.power(k), g.q());
    return e;
}

std::vector<cplx> dp_table(const unit_group& g, int n) {
    const auto e = base_vector(g);
    const std::size_t phi = e.size();
    auto f = e;
    for (int step = 1; step < n; ++step) {
        std::vector<cplx> next(phi);
        for (std::size_t k = 0; k < phi; ++k) {
            csum acc;
            for (std::size_t i = 0; i < phi; ++i) acc += f[(k + phi - i) % phi] * e[i];
            next[k] = acc.value();
        }
        f.swap(next);
    }
    return f;
}

std::vector<cplx> fft_table(const unit_group& g, int n) {
    auto e = base_vector(g);
    dft_plan plan(e.size());
    plan.forward(e);
    for (auto& v : e) {
        const cplx b = v;
        for (int j = 1; j < n; ++j) v *= b;
    }
    plan.inverse(e);
    return e;
}

struct lift_key {
    i64 p;
    int beta, n;
    auto operator<=>(const lift_key&) const = default;
};

std::mutex& registry_mutex() {
    static std::mutex m;
    return m;
}

std::map<lift_key, lift_convention>& registry() {
    static std::map<lift_key, lift_convention> r;
    return r;
}

}  // namespace

void require_salie_hypotheses(const prime_power_modulus& m, int n) {
    require(m.beta % 2 == 0 && m.beta >= 4 && n % m.p != 0, errc::salie_unavailable,
            "closed form needs beta even >= 4 and p not dividing n");
}

cplx salie_closed_form(i64 c, int n, const prime_power_modulus& m, lift_convention conv) {
    require_salie_hypotheses(m, n);
    const i64 q = m.modulus;
    const int alpha = *m.alpha;
    const double scale = std::pow(static_cast<double>(m.p), alpha * (n - 1));
    csum acc;
    if (conv == lift_convention::C3) {
        for (i64 w : nth_roots(c, n, m, true)) {
            const i64 ph = mod((n - 1) * w + mulmod(c, invmod(w, q), q), q);
            acc += e_frac(ph, q);
        }
    } else {
        for (i64 w : nth_roots(c, n, m, false)) {
            const i64 ph = conv == lift_convention::C1 ? mod((n - 1) * w + mulmod(c, invmod(w, q), q), q)
                                                       : mulmod(n, w, q);
            acc += e_frac(ph, q);
        }
    }
    return scale * acc.value();
}

std::optional<lift_convention> registered_lift(i64 p, int beta, int n) {
    std::lock_guard lock(registry_mutex());
    auto it = registry().find({p, beta, n});
    if (it == registry().end()) return std::nullopt;
    return it->second;
}

void clear_lift_registry() {
    std::lock_guard lock(registry_mutex());
    registry().clear();
}

std::vector<cplx> kl_dlog_table(const unit_group& g, int n, kl_method m) {
    require(n >= 1, errc::invalid_argument, "n must be >= 1");
    switch (m) {
        case kl_method::dp: return dp_table(g, n);
        case kl_method::fft_dp: return fft_table(g, n);
        case kl_method::naive: {
            const auto eq = additive_table(g.q());
            std::vector<cplx> out(static_cast<std::size_t>(g.order()));
            for (i64 k = 0; k < g.order(); ++k) out[static_cast<std::size_t>(k)] = naive_single(g, n, g.power(k), eq);
            return out;
        }
        case kl_method::salie: {
            const auto& mm = g.modulus();
            require_salie_hypotheses(mm, n);
            auto conv = registered_lift(mm.p, mm.beta, n);
            require(conv.has_value(), errc::lift_convention_uncalibrated, "run the Salie calibration first");
            std::vector<cplx> out(static_cast<std::size_t>(g.order()));
            for (i64 k = 0; k < g.order(); ++k)
                out[static_cast<std::size_t>(k)] = salie_closed_form(g.power(k), n, mm, *conv);
            return out;
        }
    }
    return {};
}

cplx kloosterman(const kloosterman_query& q) {
    const auto& m = q.modulus;
    require(gcd(q.c, m.p) == 1, errc::invalid_argument, "c must be coprime to p");
    require(q.n >= 1, errc::invalid_argument, "n must be >= 1");
    if (q.method == kl_method::salie) {
        require_salie_hypotheses(m, q.n);
        auto conv = registered_lift(m.p, m.beta, q.n);
        require(conv.has_value(), errc::lift_convention_uncalibrated, "run the Salie calibration first");
        return salie_closed_form(q.c, q.n, m, *conv);
    }
    const auto g = build_unit_group(m);
    if (q.method == kl_method::naive) return naive_single(*g, q.n, q.c, additive_table(g->q()));
    const auto t = kl_dlog_table(*g, q.n, q.method);
    return t[static_cast<std::size_t>(g->dlog(q.c))];
}

cplx kloosterman_pm(const kloosterman_query& q) {
    auto r = q;
    r.c = -q.c;
    return kloosterman(q) + kloosterman(r);
}

kl_table::kl_table(const unit_group_ptr& g, int n, kl_method m) : n_(n), q_(g->q()) {
    const auto t = kl_dlog_table(*g, n, m);
    v_.assign(static_cast<std::size_t>(q_), 0.0);
    for (i64 k = 0; k < g->order(); ++k) v_[static_cast<std::size_t>(g->power(k))] = t[static_cast<std::size_t>(k)];
}

bool power_residue_symbol(i64 c, int n, const prime_power_modulus& m) {
    require(gcd(c, m.p) == 1, errc::invalid_argument, "c must be coprime to p");
    const i64 d = std::gcd(static_cast<i64>(n), m.p - 1);
    return powmod(c, static_cast<u64>((m.p - 1) / d), m.p) == 1;
}

std::vector<i64> nth_roots(i64 c, int n, const prime_power_modulus& m, bool mod_alpha) {
    require(gcd(c, m.p) == 1, errc::invalid_argument, "c must be coprime to p");
    prime_power_modulus target = m;
    if (mod_alpha) {
        require(m.alpha.has_value(), errc::invalid_argument, "alpha undefined for odd beta");
        target = prime_power_modulus::make(m.p, *m.alpha);
    }
    const auto g = build_unit_group(target);
    const i64 phi = g->order();
    const i64 kc = g->dlog(c);
    const i64 d = std::gcd(static_cast<i64>(n), phi);
    std::vector<i64> out;
    if (kc % d != 0) return out;
    // n j = kc mod phi
    const i64 nd = n / d, phid = phi / d;
    const i64 j0 = mulmod(kc / d, phid == 1 ? 0 : invmod(nd, phid), phid);
    for (i64 k = 0; k < d; ++k) out.push_back(g->power(j0 + k * phid));
    std::sort(out.begin(), out.end());
    return out;
}

salie_calibration_report run_salie_calibration(i64 p, int beta, int n, kl_method oracle) {
    require(oracle != kl_method::salie, errc::invalid_argument, "oracle must be a brute-force method");
    const auto m = prime_power_modulus::make(p, beta);
    require_salie_hypotheses(m, n);
    salie_calibration_report rep;
    rep.p = p;
    rep.beta = beta;
    rep.n = n;
    rep.oracle = oracle;
    const auto g = build_unit_group(m);
    const auto truth = kl_dlog_table(*g, n, oracle);
    for (i64 c = 1; c < m.modulus; ++c) {
        if (c % p == 0) continue;
        rep.classes.push_back(c);
        const cplx ref = truth[static_cast<std::size_t>(g->dlog(c))];
        for (int j = 0; j < 3; ++j) {
            const double r = std::abs(salie_closed_form(c, n, m, static_cast<lift_convention>(j)) - ref);
            rep.residuals[j].push_back(r);
            rep.max_residual[j] = std::max(rep.max_residual[j], r);
        }
    }
    for (int j = 0; j < 3; ++j) {
        rep.matches[j] = rep.max_residual[j] < rep.tolerance;
        if (rep.matches[j] && !rep.selected) rep.selected = static_cast<lift_convention>(j);
    }
    if (rep.selected) {
        std::lock_guard lock(registry_mutex());
        registry()[{p, beta, n}] = *rep.selected;
    }
    return rep;
}

lift_convention calibrate_salie_lift(i64 p, int beta, int n, kl_method oracle) {
    const auto rep = run_salie_calibration(p, beta, n, oracle);
    if (!rep.selected) {
        std::ostringstream os;
        os << "no lift convention matches at p=" << p << " beta=" << beta << " n=" << n << ":";
        for (int j = 0; j < 3; ++j) os << " C" << (j + 1) << " max residual " << rep.max_residual[j];
        raise(errc::no_convention_matches, os.str());
    }
    return *rep.selected;
}

}  // namespace hkv
