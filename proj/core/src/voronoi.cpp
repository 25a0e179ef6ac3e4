#include "hkv/voronoi.hpp"

#include <chrono>
#include <cstdio>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>

#include "hkv/error.hpp"
#include "voronoi_detail.hpp"

namespace hkv {

namespace detail {

double tail_model::log_bound(double M) const {
    double best = HUGE_VAL;
    for (std::size_t i = 0; i < c.size(); ++i) best = std::min(best, log_maj[i] + shape(c[i], M));
    return best;
}

tail_model cutoff_tail_model(const cutoff_function& f, const std::vector<double>& grid) {
    tail_model t;
    for (double c : grid) {
        try {
            const double m = cutoff_majorant(f, c);
            if (std::isfinite(m) && m > 0) {
                t.c.push_back(c);
                t.log_maj.push_back(std::log(m));
            }
        } catch (const error&) {
        }
    }
    require(!t.c.empty(), errc::tail_bound_exceeds_tolerance, "no admissible majorant contour");
    return t;
}

i64 pick_length(const tail_model& t, double goal, double start, i64 cap, const char* what) {
    double M = std::max(start, 8.0);
    while (t.log_bound(M) > goal) {
        M *= 1.15;
        if (M > static_cast<double>(cap))
            raise(errc::tail_bound_exceeds_tolerance, std::string(what) + ": truncation exceeds the term cap");
    }
    return static_cast<i64>(std::ceil(M));
}

character_L primitive_even_L(const isobaric_datum& d, const unit_group_ptr& g, cplx s) {
    static std::mutex mu;
    static std::map<std::string, character_L> cache;
    std::ostringstream key;
    key.precision(17);
    for (const auto& x : d.components()) key << x.q() << ':' << x.index() << ',';
    key << '|' << g->q() << '|' << s.real() << ',' << s.imag();
    {
        std::lock_guard<std::mutex> lk(mu);
        const auto it = cache.find(key.str());
        if (it != cache.end()) return it->second;
    }
    character_L out;
    out.chars = list_characters(g, char_filter::primitive_even);
    out.L.reserve(out.chars.size());
    for (const auto& chi : out.chars) {
        const l_value v = twisted_L(d, chi, s, l_mode::product);
        out.L.push_back(v.value);
        out.bound = std::max(out.bound, v.bound);
    }
    std::lock_guard<std::mutex> lk(mu);
    cache.emplace(key.str(), out);
    return out;
}

bounded_value untwisted_L(const isobaric_datum& d, cplx s) {
    cplx v = 1.0;
    double mag = 1.0, exact = 1.0;
    for (const auto& x : d.components()) {
        const bounded_value b = dirichlet_L(x, s);
        v *= b.value;
        mag *= std::abs(b.value) + b.bound;
        exact *= std::abs(b.value);
    }
    return {v, mag - exact + 1e-15 * mag};
}

}  // namespace detail

namespace {

constexpr voronoi_theorem all_theorems[] = {
    voronoi_theorem::VSF_i,    voronoi_theorem::VSF_ii,    voronoi_theorem::VSF2_i,
    voronoi_theorem::VSF2_ii,  voronoi_theorem::DAFI_B_i,  voronoi_theorem::DAFI_B_ii,
    voronoi_theorem::D_B_i,    voronoi_theorem::D_B_ii,    voronoi_theorem::VSFK,
};

bool prime_level(voronoi_theorem t) {
    return t == voronoi_theorem::VSF_ii || t == voronoi_theorem::VSF2_ii || t == voronoi_theorem::DAFI_B_ii ||
           t == voronoi_theorem::D_B_ii;
}

bool is_vsf2(voronoi_theorem t) { return t == voronoi_theorem::VSF2_i || t == voronoi_theorem::VSF2_ii; }

double pw(i64 p, double e) { return std::pow(static_cast<double>(p), e); }

std::vector<cplx> dilate(const std::vector<cplx>& t, i64 c, i64 q) {
    std::vector<cplx> w(t.size(), 0.0);
    for (i64 b = 0; b < q; ++b)
        if (gcd(b, q) == 1) w[static_cast<std::size_t>(b)] = t[static_cast<std::size_t>(mod(b * c, q))];
    return w;
}

series_params make_series(const voronoi_params& vp, i64 h) {
    const std::string name(voronoi_theorem_name(vp.theorem));
    const bool prime = prime_level(vp.theorem);
    require(prime == (vp.beta == 1), errc::config_invalid,
            name + (prime ? " is the prime-level form (beta = 1)" : " needs beta >= 2"));
    switch (vp.theorem) {
        case voronoi_theorem::VSF_i:
        case voronoi_theorem::VSF_ii: return {series_family::additive_D, vp.datum, vp.p, vp.beta, h};
        case voronoi_theorem::VSF2_i:
        case voronoi_theorem::VSF2_ii: return {series_family::additive_D, vp.datum.dual(), vp.p, vp.beta, h};
        case voronoi_theorem::DAFI_B_i:
        case voronoi_theorem::DAFI_B_ii: return {series_family::hk_gln, vp.datum, vp.p, vp.beta, h};
        case voronoi_theorem::VSFK: return {series_family::hk_gln, vp.datum.dual(), vp.p, vp.beta, h};
        case voronoi_theorem::D_B_i:
        case voronoi_theorem::D_B_ii:
            require(vp.datum.n() == 1, errc::config_invalid, name + " takes a single character");
            require(vp.kl_order >= 2, errc::config_invalid, name + " needs a Kloosterman order >= 2");
            return {series_family::hk_gl1, vp.datum, vp.p, vp.beta, h, vp.kl_order};
    }
    raise(errc::config_invalid, "unknown theorem");
}

series_params lhs_series(const voronoi_params& vp) {
    const series_params sp = make_series(vp, vp.h);
    if (vp.form == identity_form::literal && is_vsf2(vp.theorem)) {
        const i64 q = sp.q();
        return make_series(vp, invmod(mod(vp.datum.N() * vp.h, q), q));
    }
    return sp;
}

// additive twist at prime level, dual side as displayed
std::vector<dual_term> prime_additive_literal(const series_params& sp) {
    const auto& d = sp.datum;
    const auto& g = sp.group;
    const i64 p = sp.p, q = sp.q(), N = d.N();
    const int n = d.n();
    const double f3 = 2.0 / static_cast<double>(p - 3);
    const double sgn_n = (n % 2 == 0) ? 1.0 : -1.0;
    dual_term t;
    t.label = "Kl_{n-1}(m/hN) + eps";
    t.Y = static_cast<double>(N) * pw(p, n);
    t.coeff = d.W() * d.omega(q) * std::sqrt(static_cast<double>(N)) * static_cast<double>(p);
    t.weight = dilate(kl_pm_residues(g, n - 1), invmod(mod(sp.h * N, q), q), q);
    for (i64 b = 0; b < q; ++b)
        if (g->dlog(b) >= 0) t.weight[static_cast<std::size_t>(b)] += sgn_n * f3;
    dual_term e;
    e.label = "eps_p, all m";
    e.Y = static_cast<double>(N);
    e.coeff = -t.coeff * sgn_n * f3 / static_cast<double>(p);
    e.all_m = true;
    e.euler = true;
    return {t, e};
}

double max_abs(const std::vector<cplx>& w) {
    double m = 0;
    for (const cplx& x : w) m = std::max(m, std::abs(x));
    return m;
}

cutoff_function dual_kernel(const voronoi_params& vp, const series_params& sp, const dual_term& t) {
    cutoff_function f;
    f.p = vp.p;
    f.k = vp.k;
    f.delta = vp.delta;
    f.u = vp.u;
    f.gamma = sp.datum.gamma();
    f.weight = vp.weight;
    f.euler_alpha = sp.datum.satake(vp.p);
    if (voronoi_weight(vp.theorem) == weight_kind::phi_infinity) {
        f.kind = t.euler ? cutoff_kind::Phi_tilde_u : cutoff_kind::Phi_u;
    } else if (sp.family == series_family::hk_gl1) {
        f.kind = t.euler ? cutoff_kind::Phi_tilde_gl1 : cutoff_kind::Phi_gl1;
    } else {
        f.kind = t.euler ? cutoff_kind::Phi_tilde_gln : cutoff_kind::Phi_gln;
    }
    return f;
}

const std::vector<double>& dual_grid() {
    static const std::vector<double> g = {-0.25, -0.5, -1, -1.5, -2, -3, -4, -5, -6, -8, -10, -12, -16};
    return g;
}

}  // namespace

std::string_view voronoi_theorem_name(voronoi_theorem t) {
    switch (t) {
        case voronoi_theorem::VSF_i: return "VSF_i";
        case voronoi_theorem::VSF_ii: return "VSF_ii";
        case voronoi_theorem::VSF2_i: return "VSF2_i";
        case voronoi_theorem::VSF2_ii: return "VSF2_ii";
        case voronoi_theorem::DAFI_B_i: return "DAFI_B_i";
        case voronoi_theorem::DAFI_B_ii: return "DAFI_B_ii";
        case voronoi_theorem::D_B_i: return "D_B_i";
        case voronoi_theorem::D_B_ii: return "D_B_ii";
        case voronoi_theorem::VSFK: return "VSFK";
    }
    return "?";
}

voronoi_theorem parse_voronoi_theorem(std::string_view s) {
    for (auto t : all_theorems)
        if (voronoi_theorem_name(t) == s) return t;
    raise(errc::config_invalid, "unknown theorem '" + std::string(s) + "'");
}

weight_kind voronoi_weight(voronoi_theorem t) {
    return (is_vsf2(t) || t == voronoi_theorem::VSFK) ? weight_kind::phi_infinity : weight_kind::log_gaussian;
}

voronoi_params::voronoi_params(voronoi_theorem t, isobaric_datum d, i64 p_, int beta_, i64 h_, int kl)
    : theorem(t), datum(std::move(d)), p(p_), beta(beta_), h(h_), kl_order(kl) {}

series_params voronoi_series(const voronoi_params& vp) { return make_series(vp, vp.h); }

std::vector<dual_term> voronoi_terms(const voronoi_params& vp) {
    const series_params sp = voronoi_series(vp);
    if (vp.form == identity_form::corrected) return functional_identity_terms(sp, identity_form::corrected);
    if (sp.family == series_family::additive_D && sp.beta == 1) return prime_additive_literal(sp);
    if (vp.theorem == voronoi_theorem::DAFI_B_i) {
        // the second progression set is empty as displayed
        const i64 q = sp.q();
        const i64 hN = mod(sp.h * sp.datum.N(), q);
        dual_term t;
        t.label = "progression +-hN";
        t.Y = static_cast<double>(sp.datum.N()) * pw(sp.p, double(sp.beta) * sp.n());
        t.coeff = sp.datum.W() * sp.datum.omega(q) * std::sqrt(static_cast<double>(sp.datum.N())) *
                  pw(sp.p, double(sp.beta) * sp.n());
        t.weight = pm_indicator(sp.group, hN, sp.beta);
        for (cplx& x : t.weight) x *= double(sp.p - 1) / double(sp.p);
        return {t};
    }
    return functional_identity_terms(sp, identity_form::literal);
}

weighted_sum voronoi_lhs(const voronoi_params& vp) {
    const series_params sp = lhs_series(vp);
    const auto w = family_weight(sp);
    const double wmax = std::max(max_abs(w), 1e-300);
    const int n = sp.n();
    const i64 q = sp.q(), p = sp.p;
    const double goal = std::log(vp.tail_target * std::max(wmax, 1.0));
    const bool gaussian = voronoi_weight(vp.theorem) == weight_kind::log_gaussian;
    const double L0 = std::log(vp.weight.y0);
    const double f = static_cast<double>(vp.datum.N()) * pw(p, double(n) * vp.beta - vp.u);
    const double lf = std::log(f);
    const double sd = vp.delta.real();

    detail::tail_model tm;
    std::optional<tabulated_cutoff> v2;
    i64 M = 0;
    if (gaussian) {
        // exp(-(t - L0)^2) <= exp(c L0 + c^2 / 4) e^{-c t}
        for (double c = 1.25; c <= 60; c += 0.25) {
            tm.c.push_back(c);
            tm.log_maj.push_back(c * L0 + c * c / 4);
        }
        tm.shape = [n, wmax](double c, double m) { return std::log(wmax) + dn_tail_rankin_log(n, c, m); };
        M = detail::pick_length(tm, goal, vp.weight.y0, vp.cap, "weighted sum");
    } else {
        cutoff_function k2;
        k2.kind = cutoff_kind::V2;
        k2.gamma = vp.datum.gamma();
        k2.k = vp.k;
        k2.delta = vp.delta;
        tm = detail::cutoff_tail_model(k2, {1, 1.5, 2, 3, 4, 5, 6, 8, 10, 12, 14, 16, 20, 24});
        tm.shape = [n, wmax, lf, sd](double c, double m) {
            if (c <= sd) return HUGE_VAL;
            return std::log(wmax) + c * lf + dn_tail_rankin_log(n, c + 1 - sd, m);
        };
        M = detail::pick_length(tm, goal, f, vp.cap, "phi_infinity sum");
        v2.emplace(k2, 1.0 / f, static_cast<double>(M) / f);
    }

    csum acc;
    neumaier mass, err;
    const double terr = v2 ? v2->error_bound() : 0.0;
    coefficient_sieve(sp.datum, M).run([&](i64 m0, const cplx* a, const double* dn, std::size_t len) {
        for (std::size_t i = 0; i < len; ++i) {
            const i64 m = m0 + static_cast<i64>(i);
            if (m % p == 0 || a[i] == 0.0) continue;
            const cplx x = w[static_cast<std::size_t>(m % q)];
            if (x == 0.0) continue;
            const double lm = std::log(static_cast<double>(m));
            cplx phi;
            if (gaussian) {
                phi = std::exp(-(lm - L0) * (lm - L0));
            } else {
                const cplx pwr = std::exp((vp.delta - 1.0) * lm);
                phi = pwr * (*v2)(static_cast<double>(m) / f);
                err.add(dn[i] * std::abs(x) * std::abs(pwr) * terr);
            }
            const cplx t = a[i] * x * phi;
            acc += t;
            mass.add(std::abs(t));
        }
    });
    weighted_sum out;
    out.value = acc.value();
    out.mass = mass.value();
    out.bound = std::exp(tm.log_bound(static_cast<double>(M))) + err.value() + 1e-15 * out.mass;
    out.terms = M;
    return out;
}

bounded_complex voronoi_residue_oracle(const voronoi_params& vp) {
    require(voronoi_weight(vp.theorem) == weight_kind::phi_infinity, errc::invalid_argument,
            "only the phi_infinity theorems carry a residue");
    const series_params sp = voronoi_series(vp);
    const auto& pi = vp.datum;
    const auto& g = sp.group;
    const i64 p = vp.p, q = sp.q();
    const int n = pi.n(), beta = vp.beta;
    const cplx d = vp.delta;
    const double lN = std::log(static_cast<double>(pi.N()));
    const double lp = std::log(static_cast<double>(p));
    const isobaric_datum dual = pi.dual();
    const cplx Wt = dual.W(), omt = dual.omega(q);
    const cplx Nd = std::exp((d - 0.5) * lN);
    const detail::character_L CL = detail::primitive_even_L(pi, g, d);
    const i64 hN = mod(vp.h * pi.N(), q);

    csum acc;
    double mag = 0;
    bounded_complex out;
    if (vp.theorem == voronoi_theorem::VSFK) {
        for (std::size_t i = 0; i < CL.chars.size(); ++i) {
            const cplx c = std::conj(CL.chars[i](hN));
            acc += c * CL.L[i];
            mag += std::abs(c);
        }
        const cplx pref = 2.0 / double(g->order()) * Wt * omt * Nd * std::exp(double(beta * n) * d * lp);
        out.value = pref * acc.value();
        out.bound = std::abs(pref) * mag * CL.bound;
        return out;
    }
    for (std::size_t i = 0; i < CL.chars.size(); ++i) {
        const auto& chi = CL.chars[i];
        const cplx c = std::conj(chi(hN)) * std::pow(gauss_sum(chi.conj()), n - 1);
        acc += c * CL.L[i];
        mag += std::abs(c);
    }
    const cplx base = Wt * omt * Nd * std::exp(double(beta) * (1.0 - double(n) * (1.0 - d)) * lp) * acc.value();
    const double base_bound = std::abs(Wt * omt * Nd * std::exp(double(beta) * (1.0 - double(n) * (1.0 - d)) * lp)) *
                              mag * CL.bound;
    if (beta >= 2) {
        const double c = 2.0 / double(g->order());
        out.value = c * base;
        out.bound = c * base_bound;
        return out;
    }
    const bounded_value Lpi = detail::untwisted_L(pi, d);
    const bool lit = vp.form == identity_form::literal;
    const double c = lit ? 2.0 / double(p - 3) : 2.0 / double(p - 1);
    const cplx eps = lit ? pi.euler_inverse(p, 1.0 - d) : pi.euler_inverse_dual(p, 1.0 - d);
    out.value = c * (base - eps * Wt * Nd * Lpi.value);
    out.bound = c * (base_bound + std::abs(eps * Wt * Nd) * Lpi.bound);
    return out;
}

voronoi_rhs voronoi_right(const voronoi_params& vp, double scale) {
    const series_params sp = voronoi_series(vp);
    const auto terms = voronoi_terms(vp);
    const bool phi_inf = voronoi_weight(vp.theorem) == weight_kind::phi_infinity;
    const int n = sp.n();
    const i64 p = sp.p, q = sp.q();
    const double Nn = static_cast<double>(sp.datum.N());
    const double f = Nn * pw(p, double(n) * vp.beta - vp.u);
    const double goal = std::log(vp.tail_target * std::max(scale, 1.0));

    voronoi_rhs out;
    csum total;
    double bound = 0;
    if (phi_inf) {
        const series_value S = left_by_decomposition(sp, 1.0 - vp.delta);
        const cplx Fd = F_ratio(vp.delta, vp.datum.gamma());
        out.residue = S.value * Fd;
        out.residue_bound = S.bound * std::abs(Fd);
        const bounded_complex o = voronoi_residue_oracle(vp);
        out.residue_oracle = o.value;
        out.residue_oracle_bound = o.bound;
        const bool lit = vp.form == identity_form::literal;
        total += lit ? o.value : out.residue;
        bound += lit ? o.bound : out.residue_bound;
    }

    struct plan {
        cutoff_function f;
        cplx factor;
        double rho;
        i64 M;
        std::optional<tabulated_cutoff> tab;
        detail::tail_model tm;
    };
    std::vector<plan> plans(terms.size());
    i64 Mmax = 1;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto& t = terms[i];
        plan& P = plans[i];
        P.f = dual_kernel(vp, sp, t);
        P.rho = phi_inf ? Nn * pw(p, double(n) * vp.beta) / t.Y : 1.0 / t.Y;
        P.factor = t.coeff * (phi_inf ? std::exp((vp.delta - 1.0) * std::log(f)) : cplx(1.0));
        const double sc = phi_inf ? pw(p, -vp.u) : 1.0;
        const double wmax = t.all_m ? 1.0 : std::max(max_abs(t.weight), 1e-300);
        const double lfac = std::log(std::max(std::abs(P.factor) * wmax, 1e-300));
        const double lrho = std::log(P.rho * sc);
        P.tm = detail::cutoff_tail_model(P.f, dual_grid());
        P.tm.shape = [n, lfac, lrho](double c, double m) { return lfac + c * lrho + dn_tail_rankin_log(n, 1 - c, m); };
        P.M = detail::pick_length(P.tm, goal, 8, vp.cap, "dual sum");
        P.tab.emplace(P.f, P.rho, P.rho * static_cast<double>(P.M));
        Mmax = std::max(Mmax, P.M);
    }

    std::vector<csum> acc(terms.size());
    std::vector<neumaier> err(terms.size()), mag(terms.size());
    coefficient_sieve(sp.datum.dual(), Mmax).run([&](i64 m0, const cplx* a, const double* dn, std::size_t len) {
        for (std::size_t i = 0; i < len; ++i) {
            const i64 m = m0 + static_cast<i64>(i);
            if (a[i] == 0.0) continue;
            const double md = static_cast<double>(m);
            const cplx v = a[i] / md;
            const bool unit = m % p != 0;
            for (std::size_t j = 0; j < terms.size(); ++j) {
                if (m > plans[j].M) continue;
                cplx x = 1.0;
                if (!terms[j].all_m) {
                    if (!unit) continue;
                    x = terms[j].weight[static_cast<std::size_t>(m % q)];
                    if (x == 0.0) continue;
                }
                const cplx val = v * x * (*plans[j].tab)(plans[j].rho * md);
                acc[j] += val;
                mag[j].add(std::abs(val));
                err[j].add(dn[i] / md * std::abs(x) * plans[j].tab->error_bound());
            }
        }
    });
    for (std::size_t j = 0; j < terms.size(); ++j) {
        const plan& P = plans[j];
        const cplx v = P.factor * acc[j].value();
        const double b = std::exp(P.tm.log_bound(static_cast<double>(P.M))) +
                         std::abs(P.factor) * (err[j].value() + 1e-15 * mag[j].value());
        out.duals.push_back({terms[j].label + " [M=" + std::to_string(P.M) + "]", v, b});
        total += v;
        bound += b;
    }
    out.value = total.value();
    out.bound = bound;
    return out;
}

verification_report voronoi_check(const voronoi_params& vp, double tolerance) {
    const auto t0 = std::chrono::steady_clock::now();
    const series_params sp = voronoi_series(vp);
    verification_report r;
    r.check = std::string(voronoi_theorem_name(vp.theorem));
    r.form = vp.form == identity_form::literal ? "literal" : "corrected";
    r.param("family", std::string(series_family_name(sp.family)));
    r.param("p", std::to_string(vp.p));
    r.param("beta", std::to_string(vp.beta));
    r.param("n", std::to_string(vp.datum.n()));
    r.param("N", std::to_string(vp.datum.N()));
    r.param("h", std::to_string(vp.h));
    if (sp.family == series_family::hk_gl1) r.param("k", std::to_string(vp.kl_order));
    const bool phi_inf = voronoi_weight(vp.theorem) == weight_kind::phi_infinity;
    if (phi_inf) {
        r.param("weight", "phi_infinity");
        r.param("delta", format_complex(vp.delta));
        r.param("u", std::to_string(vp.u));
    } else {
        r.param("weight", "log_gaussian");
        r.param("y0", std::to_string(vp.weight.y0));
    }

    const weighted_sum L = voronoi_lhs(vp);
    const voronoi_rhs R = voronoi_right(vp, L.mass);
    r.lhs = L.value;
    r.lhs_bound = L.bound;
    r.rhs = R.value;
    r.rhs_bound = R.bound;
    if (phi_inf) {
        r.terms.push_back({"residue (decomposition)", R.residue, R.residue_bound});
        r.terms.push_back({"residue (L-values)", R.residue_oracle, R.residue_oracle_bound});
        const double dev = std::abs(R.residue - R.residue_oracle);
        char buf[96];
        std::snprintf(buf, sizeof buf, "residue deviation between decomposition and L-values: %.3e", dev);
        r.notes.emplace_back(buf);
    }
    for (const auto& t : R.duals) r.terms.push_back(t);
    r.notes.push_back("left terms: " + std::to_string(L.terms));
    r.scale = std::max({L.mass, std::abs(L.value), std::abs(R.value), 1e-300});
    r.finish(tolerance);
    r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace hkv
