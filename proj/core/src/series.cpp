#include "hkv/series.hpp"

#include <chrono>

#include "hkv/error.hpp"
#include "hkv/kernels.hpp"
#include "hkv/kloosterman.hpp"

namespace hkv {

std::string_view series_family_name(series_family f) {
    switch (f) {
        case series_family::additive_D: return "additive_D";
        case series_family::hk_gln: return "hk_gln";
        case series_family::hk_gl1: return "hk_gl1";
        case series_family::hk_gl1_base: return "hk_gl1_base";
    }
    return "?";
}

series_family parse_series_family(std::string_view s) {
    for (auto f : {series_family::additive_D, series_family::hk_gln, series_family::hk_gl1, series_family::hk_gl1_base})
        if (s == series_family_name(f)) return f;
    raise(errc::config_invalid, "unknown series family: " + std::string(s));
}

std::string_view series_side_name(series_side s) { return s == series_side::left ? "left" : "right"; }

series_side parse_series_side(std::string_view s) {
    if (s == "left") return series_side::left;
    if (s == "right") return series_side::right;
    raise(errc::config_invalid, "unknown side: " + std::string(s));
}

series_params::series_params(series_family f, isobaric_datum d, i64 p_, int beta_, i64 h_, int k)
    : family(f), datum(std::move(d)), p(p_), beta(beta_), h(h_), kl_order(k) {
    require(is_prime(p) && beta >= 1, errc::config_invalid, "modulus must be a prime power");
    require(gcd(datum.N(), p) == 1, errc::config_invalid, "p divides the conductor");
    require(!(beta == 1 && p < 5), errc::config_invalid, "beta = 1 formulas need p >= 5");
    group = build_unit_group(p, beta);
    h = mod(h, group->q());
    require(gcd(h, p) == 1, errc::config_invalid, "h must be a unit mod p^beta");
    switch (family) {
        case series_family::additive_D: kl_order = 1; break;
        case series_family::hk_gln: kl_order = datum.n(); break;
        case series_family::hk_gl1:
            require(datum.n() == 1, errc::config_invalid, "GL1 family takes a single character");
            require(kl_order >= 1, errc::config_invalid, "Kl order must be positive");
            break;
        case series_family::hk_gl1_base:
            require(datum.n() == 1, errc::config_invalid, "GL1 family takes a single character");
            kl_order = 0;
            break;
    }
}

std::string series_params::identity_label() const {
    const bool prime = beta == 1;
    switch (family) {
        case series_family::additive_D: return prime ? "AFI(ii)" : "AFI(i)";
        case series_family::hk_gln: return prime ? "DAFI(A)(ii)" : "DAFI(A)(i)";
        case series_family::hk_gl1: return prime ? "D(A)(ii)" : "D(A)(i)";
        case series_family::hk_gl1_base: return "K0";
    }
    return "?";
}

// ---- residue tables ----

std::vector<cplx> pm_indicator(const unit_group_ptr& g, i64 c, int level) {
    const i64 q = g->q();
    const i64 r = ipow(g->modulus().p, level);
    std::vector<cplx> w(static_cast<std::size_t>(q), 0.0);
    for (i64 b = 0; b < q; ++b) {
        if (g->dlog(b) < 0) continue;
        if (mod(b - c, r) == 0 || mod(b + c, r) == 0) w[static_cast<std::size_t>(b)] = 1.0;
    }
    return w;
}

std::vector<cplx> kl_pm_residues(const unit_group_ptr& g, int k) {
    require(k >= 0, errc::invalid_argument, "negative Kloosterman order");
    if (k == 0) return pm_indicator(g, 1, g->modulus().beta);
    const kl_table t(g, k);
    std::vector<cplx> w(static_cast<std::size_t>(g->q()), 0.0);
    for (i64 b = 0; b < g->q(); ++b)
        if (g->dlog(b) >= 0) w[static_cast<std::size_t>(b)] = t.pm(b);
    return w;
}

std::vector<cplx> primitive_even_kernel(const unit_group_ptr& g, int k) {
    const i64 q = g->q();
    std::vector<csum> acc(static_cast<std::size_t>(q));
    for (const auto& chi : list_characters(g, char_filter::primitive_even)) {
        const cplx t = std::pow(gauss_sum(chi.conj()), k);
        for (i64 b = 0; b < q; ++b)
            if (g->dlog(b) >= 0) acc[static_cast<std::size_t>(b)] += chi(b) * t;
    }
    std::vector<cplx> w(static_cast<std::size_t>(q));
    const double f = 2.0 / static_cast<double>(g->order());
    for (std::size_t b = 0; b < w.size(); ++b) w[b] = f * acc[b].value();
    return w;
}

namespace {

// w'(b) = t(c b)
std::vector<cplx> dilate(const std::vector<cplx>& t, i64 c, i64 q) {
    std::vector<cplx> w(t.size(), 0.0);
    for (i64 b = 0; b < q; ++b)
        if (gcd(b, q) == 1) w[static_cast<std::size_t>(b)] = t[static_cast<std::size_t>(mod(b * c, q))];
    return w;
}

// w'(b) = t(c / b)
std::vector<cplx> dilate_inverse(const std::vector<cplx>& t, i64 c, i64 q) {
    std::vector<cplx> w(t.size(), 0.0);
    for (i64 b = 1; b < q; ++b)
        if (gcd(b, q) == 1) w[static_cast<std::size_t>(b)] = t[static_cast<std::size_t>(mod(c * invmod(b, q), q))];
    return w;
}

// [m = +-c mod p^{beta-1}] - [m = +-c mod p^beta]
std::vector<cplx> ring_indicator(const unit_group_ptr& g, i64 c) {
    const int beta = g->modulus().beta;
    auto a = pm_indicator(g, c, beta - 1);
    const auto b = pm_indicator(g, c, beta);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}

std::vector<cplx> units_weight(const unit_group_ptr& g, cplx v = 1.0) {
    std::vector<cplx> w(static_cast<std::size_t>(g->q()), 0.0);
    for (i64 b = 0; b < g->q(); ++b)
        if (g->dlog(b) >= 0) w[static_cast<std::size_t>(b)] = v;
    return w;
}

// The base-case weight as defined for the k = 0 series at the class c.
std::vector<cplx> base_weight_literal(const unit_group_ptr& g, i64 c) {
    const i64 p = g->modulus().p;
    const i64 q = g->q();
    std::vector<cplx> w(static_cast<std::size_t>(q), 0.0);
    if (g->modulus().beta >= 2) {
        const auto ring = ring_indicator(g, c);
        for (i64 b = 0; b < q; ++b) {
            if (g->dlog(b) < 0) continue;
            w[static_cast<std::size_t>(b)] = (mod(b - c, q) == 0 ? 1.0 : 0.0) - ring[static_cast<std::size_t>(b)] / double(p);
        }
    } else {
        const auto in = pm_indicator(g, c, 1);
        const double f = 2.0 / static_cast<double>(p - 3);
        for (i64 b = 0; b < q; ++b) {
            if (g->dlog(b) < 0) continue;
            const cplx x = in[static_cast<std::size_t>(b)];
            w[static_cast<std::size_t>(b)] = x - f * (1.0 - x);
        }
    }
    return w;
}

double pw(i64 p, double e) { return std::pow(static_cast<double>(p), e); }

}  // namespace

std::vector<cplx> family_weight(const series_params& sp) {
    const auto& g = sp.group;
    const i64 q = sp.q();
    switch (sp.family) {
        case series_family::additive_D: {
            std::vector<cplx> w(static_cast<std::size_t>(q), 0.0);
            for (i64 b = 0; b < q; ++b)
                if (g->dlog(b) >= 0) w[static_cast<std::size_t>(b)] = e_frac(b * sp.h, q) + e_frac(-b * sp.h, q);
            return w;
        }
        case series_family::hk_gln:
        case series_family::hk_gl1: return dilate(kl_pm_residues(g, sp.kl_order), sp.h, q);
        case series_family::hk_gl1_base:
            if (sp.corrected_base) return dilate(primitive_even_kernel(g, 0), sp.h, q);
            return base_weight_literal(g, sp.h);
    }
    return {};
}

std::vector<dual_term> functional_identity_terms(const series_params& sp, identity_form form) {
    require(sp.family != series_family::hk_gl1_base || (sp.corrected_base && form == identity_form::corrected),
            errc::invalid_argument, "the defining base series has no functional identity of its own");
    require(sp.family != series_family::hk_gl1_base || sp.beta >= 2, errc::invalid_argument,
            "the K_0 kernel identity needs beta >= 2");
    const auto& d = sp.datum;
    const auto& g = sp.group;
    const i64 p = sp.p, q = sp.q(), N = d.N();
    const int n = d.n(), k = sp.kl_order, beta = sp.beta;
    const cplx W = d.W();
    const cplx om = d.omega(q);
    const double sqN = std::sqrt(static_cast<double>(N));
    const double Y = static_cast<double>(N) * pw(p, double(beta) * n);
    const i64 hN = mod(sp.h * N, q);
    const i64 hN_inv = invmod(hN, q);
    std::vector<dual_term> out;
    const double sgn = (k % 2 == 0) ? 1.0 : -1.0;

    if (form == identity_form::corrected) {
        dual_term t;
        t.Y = Y;
        if (k <= n) {
            t.label = "K_" + std::to_string(n - k) + "(m/hN) main";
            t.coeff = W * om * sqN * pw(p, double(beta) * k);
            t.weight = dilate(primitive_even_kernel(g, n - k), hN_inv, q);
        } else {
            t.label = "K_" + std::to_string(k - n) + "(hN/m) main";
            t.coeff = W * om * sqN * pw(p, double(beta) * n);
            t.weight = dilate_inverse(primitive_even_kernel(g, k - n), hN, q);
        }
        out.push_back(std::move(t));
        if (beta == 1) {
            dual_term e;
            e.label = "trivial character";
            e.coeff = (2.0 / double(p - 1)) * sgn * W * sqN;
            e.Y = static_cast<double>(N);
            e.all_m = true;
            e.euler = true;
            out.push_back(std::move(e));
        }
        return out;
    }

    const double f3 = 2.0 / static_cast<double>(p - 3);
    const double sgn_n = (n % 2 == 0) ? 1.0 : -1.0;
    switch (sp.family) {
        case series_family::additive_D: {
            dual_term t;
            t.label = "Kl_{n-1}(m/hN)";
            t.Y = Y;
            t.coeff = W * om * sqN * pw(p, beta);
            t.weight = dilate(kl_pm_residues(g, n - 1), hN_inv, q);
            if (beta >= 2) {
                out.push_back(std::move(t));
                break;
            }
            for (i64 b = 0; b < q; ++b)
                if (g->dlog(b) >= 0) t.weight[static_cast<std::size_t>(b)] += sgn_n * f3;
            dual_term e;
            e.label = "eps bracket";
            e.Y = Y;
            e.coeff = -t.coeff * sgn_n * f3;
            e.weight = units_weight(g);
            const isobaric_datum dd = d;
            e.extra = [dd, p, n](cplx s) {
                return dd.euler_inverse(p, s) * dd.euler_inverse_dual(p, 1.0 - s) /
                       std::exp((1.0 - double(n) * s) * std::log(double(p)));
            };
            out.push_back(std::move(t));
            out.push_back(std::move(e));
            break;
        }
        case series_family::hk_gln: {
            dual_term t;
            t.Y = Y;
            if (beta >= 2) {
                t.label = "progressions +-hN";
                t.coeff = W * om * sqN * pw(p, double(beta) * n);
                const auto in = pm_indicator(g, hN, beta);
                const auto ring = ring_indicator(g, hN);
                t.weight.resize(in.size());
                const double ph = double(p - 1) / double(p);
                for (std::size_t b = 0; b < in.size(); ++b) t.weight[b] = ph * in[b] - ring[b] / double(p);
                out.push_back(std::move(t));
                break;
            }
            t.label = "progressions +-hN";
            t.coeff = W * om * sqN * pw(p, n);
            const auto in = pm_indicator(g, hN, 1);
            t.weight.assign(in.size(), 0.0);
            for (i64 b = 0; b < q; ++b)
                if (g->dlog(b) >= 0)
                    t.weight[static_cast<std::size_t>(b)] =
                        in[static_cast<std::size_t>(b)] - f3 * (1.0 - in[static_cast<std::size_t>(b)]);
            dual_term e;
            e.label = "L(1-s, dual)";
            e.Y = static_cast<double>(N);
            e.coeff = f3 * sgn_n * W * sqN;
            e.all_m = true;
            out.push_back(std::move(t));
            out.push_back(std::move(e));
            break;
        }
        case series_family::hk_gl1: {
            // N = q_xi, n = 1, W om sqrt(q_xi) = xi(p^beta) tau(xi)
            const i64 hq_inv = hN_inv;
            dual_term t;
            t.label = "K^0_{k-1}(conj xi, 1/hq)";
            t.Y = Y;
            t.coeff = W * om * sqN * pw(p, beta);
            t.weight = k >= 2 ? dilate(kl_pm_residues(g, k - 1), hq_inv, q) : base_weight_literal(g, hq_inv);
            out.push_back(std::move(t));
            if (beta >= 2) break;
            const double sk = (k % 2 == 0) ? 1.0 : -1.0;
            dual_term a;
            a.label = "L^(p)(1-s, conj xi)";
            a.Y = static_cast<double>(N);
            a.coeff = sk * W * sqN;
            a.weight = units_weight(g);
            dual_term b = a;
            b.label = "eps_p L^(p)(1-s, conj xi)";
            b.coeff = sk * f3 * W * sqN;
            b.euler = true;
            out.push_back(std::move(a));
            out.push_back(std::move(b));
            break;
        }
        case series_family::hk_gl1_base: break;
    }
    return out;
}

// ---- evaluation ----

series_value left_by_decomposition(const series_params& sp, cplx s) {
    const auto& g = sp.group;
    const auto w = family_weight(sp);
    const twisted_family fam = twisted_L_all(sp.datum, g, s);
    const i64 phi = g->order();
    csum acc;
    double bound = 0, mag = 0;
    for (i64 t = 0; t < phi; ++t) {
        // hat w(chi_t) = (1/phi) sum_j w(g^j) e(-t j / phi)
        csum c;
        for (i64 j = 0; j < phi; ++j) {
            const cplx x = w[static_cast<std::size_t>(g->power(j))];
            if (x != 0.0) c += x * g->root(-t * j);
        }
        const cplx wt = c.value() / static_cast<double>(phi);
        if (std::abs(wt) < 1e-300) continue;
        const cplx term = wt * fam.value[static_cast<std::size_t>(t)];
        acc += term;
        bound += std::abs(wt) * fam.bound;
        mag += std::abs(term);
    }
    series_value out;
    out.value = acc.value();
    out.bound = bound + 1e-15 * mag;
    out.terms = phi;
    out.method = "decomposition";
    return out;
}

series_value left_raw(const series_params& sp, cplx s, i64 M, double target, i64 cap) {
    require(s.real() > 1.0, errc::side_illegal_at_s, "raw left series needs Re s > 1");
    const int n = sp.n();
    const auto w = family_weight(sp);
    double wmax = 0;
    for (const cplx& x : w) wmax = std::max(wmax, std::abs(x));
    const bool auto_M = M <= 0;
    if (auto_M) {
        const double goal = std::log(target / std::max(wmax, 1e-300));
        double m = 1000;
        while (m < static_cast<double>(cap) && dn_tail_rankin_log(n, s.real(), m) > goal) m *= 1.5;
        M = static_cast<i64>(std::min(m, static_cast<double>(cap)));
    }
    const i64 q = sp.q();
    csum acc;
    neumaier partial;
    coefficient_sieve(sp.datum, M).run([&](i64 m0, const cplx* a, const double* dn, std::size_t len) {
        for (std::size_t i = 0; i < len; ++i) {
            const i64 m = m0 + static_cast<i64>(i);
            const double lm = std::log(static_cast<double>(m));
            partial.add(dn[i] * std::exp(-s.real() * lm));
            const cplx x = w[static_cast<std::size_t>(m % q)];
            if (x == 0.0 || a[i] == 0.0) continue;
            acc += a[i] * x * std::exp(-s * lm);
        }
    });
    series_value out;
    out.value = acc.value();
    out.bound = wmax * dn_tail(n, s.real(), partial.value()) + 1e-15 * partial.value() * wmax;
    out.terms = M;
    out.method = "raw";
    if (auto_M)
        require(out.bound <= std::max(10 * target, 1e-300), errc::tail_bound_exceeds_tolerance,
                "raw series cap too small for the requested tail");
    return out;
}

series_value right_series(const series_params& sp, const std::vector<dual_term>& terms, cplx s, i64 M,
                          bool continuation) {
    require(s.real() < 0.0 || (continuation && M <= 0), errc::side_illegal_at_s, "dual series needs Re s < 0");
    const auto& d = sp.datum;
    const auto& g = sp.group;
    const i64 q = sp.q();
    const cplx Fs = F_ratio(s, d.gamma());
    const isobaric_datum dual = d.dual();
    const cplx eb = d.euler_inverse_dual(sp.p, 1.0 - s);

    std::vector<cplx> R(terms.size());
    std::vector<double> Rb(terms.size(), 0.0);
    i64 used = 0;
    if (M <= 0) {
        const progression_table P = progression_series(dual.components(), g, 1.0 - s);
        for (std::size_t i = 0; i < terms.size(); ++i) {
            csum acc;
            double wb = 0;
            for (i64 b = 0; b < q; ++b) {
                const cplx x = terms[i].all_m ? (g->dlog(b) >= 0 ? cplx(1.0) : cplx(0.0))
                                              : terms[i].weight[static_cast<std::size_t>(b)];
                if (x == 0.0) continue;
                acc += x * P.value[static_cast<std::size_t>(b)];
                wb += std::abs(x);
            }
            R[i] = acc.value();
            Rb[i] = wb * P.bound;
            if (terms[i].all_m) {
                R[i] /= eb;
                Rb[i] /= std::abs(eb);
            }
        }
        used = q;
    } else {
        const int n = d.n();
        std::vector<csum> acc(terms.size());
        neumaier partial;
        coefficient_sieve(dual, M).run([&](i64 m0, const cplx* a, const double* dn, std::size_t len) {
            for (std::size_t i = 0; i < len; ++i) {
                const i64 m = m0 + static_cast<i64>(i);
                const double lm = std::log(static_cast<double>(m));
                partial.add(dn[i] * std::exp((s.real() - 1.0) * lm));
                if (a[i] == 0.0) continue;
                const cplx v = a[i] * std::exp((s - 1.0) * lm);
                const bool unit = m % sp.p != 0;
                for (std::size_t t = 0; t < terms.size(); ++t) {
                    if (terms[t].all_m) {
                        acc[t] += v;
                    } else if (unit) {
                        acc[t] += v * terms[t].weight[static_cast<std::size_t>(m % q)];
                    }
                }
            }
        });
        const double tail = dn_tail(n, 1.0 - s.real(), partial.value());
        for (std::size_t t = 0; t < terms.size(); ++t) {
            double wmax = 1.0;
            if (!terms[t].all_m) {
                wmax = 0;
                for (const cplx& x : terms[t].weight) wmax = std::max(wmax, std::abs(x));
            }
            R[t] = acc[t].value();
            Rb[t] = wmax * tail;
        }
        used = M;
    }

    series_value out;
    csum total;
    double bound = 0, mag = 0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto& t = terms[i];
        cplx f = t.coeff * std::exp(-s * std::log(t.Y)) * Fs;
        if (t.euler) f *= d.euler_inverse(sp.p, s);
        if (t.extra) f *= t.extra(s);
        const cplx v = f * R[i];
        total += v;
        const double b = std::abs(f) * Rb[i];
        bound += b;
        mag += std::abs(v);
        out.parts.push_back({t.label, v, b});
    }
    out.value = total.value();
    out.bound = bound + 1e-15 * mag;
    out.terms = used;
    out.method = M <= 0 ? "progression" : "truncated";
    return out;
}

series_value eval_series(const series_params& sp, cplx s, series_side side, const series_options& opt) {
    if (side == series_side::left) {
        left_method m = opt.method;
        if (m == left_method::automatic) m = left_method::decomposition;
        if (m == left_method::raw) return left_raw(sp, s, opt.M, opt.raw_target, opt.raw_cap);
        return left_by_decomposition(sp, s);
    }
    return right_series(sp, functional_identity_terms(sp, opt.form), s, opt.M);
}

verification_report verify_functional_identity(const series_params& sp, cplx s, identity_form form, double tolerance) {
    const auto t0 = std::chrono::steady_clock::now();
    verification_report r;
    r.check = sp.identity_label();
    r.form = form == identity_form::literal ? "literal" : "corrected";
    r.param("family", std::string(series_family_name(sp.family)));
    r.param("p", std::to_string(sp.p));
    r.param("beta", std::to_string(sp.beta));
    r.param("n", std::to_string(sp.n()));
    r.param("k", std::to_string(sp.kl_order));
    r.param("h", std::to_string(sp.h));
    r.param("N", std::to_string(sp.datum.N()));
    r.param("s", format_complex(s));
    const series_value L = left_by_decomposition(sp, s);
    const series_value R = right_series(sp, functional_identity_terms(sp, form), s);
    r.lhs = L.value;
    r.lhs_bound = L.bound;
    r.rhs = R.value;
    r.rhs_bound = R.bound;
    r.terms = R.parts;
    r.scale = std::max({std::abs(L.value), std::abs(R.value), 1e-300});
    r.finish(tolerance);
    r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace hkv
