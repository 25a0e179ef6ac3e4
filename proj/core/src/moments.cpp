#include <chrono>
#include <cstdio>
#include <optional>

#include "hkv/error.hpp"
#include "hkv/kloosterman.hpp"
#include "hkv/voronoi.hpp"
#include "voronoi_detail.hpp"

namespace hkv {

namespace {

double pw(i64 p, double e) { return std::pow(static_cast<double>(p), e); }

// (2 / phi*) sum over primitive even chi of chi(m) on residues mod p^beta
std::vector<cplx> average_weight(const unit_group_ptr& g) {
    const i64 p = g->modulus().p;
    const int beta = g->modulus().beta;
    const auto top = pm_indicator(g, 1, beta);
    const auto low = pm_indicator(g, 1, beta - 1);
    std::vector<cplx> w(top.size());
    for (std::size_t b = 0; b < w.size(); ++b) w[b] = top[b] - (low[b] - top[b]) / double(p - 1);
    return w;
}

const std::vector<double>& phi_u_grid() {
    static const std::vector<double> g = {-0.25, -0.5, -1, -1.5, -2, -3, -4, -5, -6, -8, -10, -12, -16};
    return g;
}

cutoff_function phi_u_kernel(const moment_query& q, bool tilde) {
    cutoff_function f;
    f.kind = tilde ? cutoff_kind::Phi_tilde_u : cutoff_kind::Phi_u;
    f.k = q.k;
    f.delta = q.delta;
    f.u = q.u;
    f.p = q.p;
    f.gamma = q.datum.gamma();
    f.euler_alpha = q.datum.satake(q.p);
    return f;
}

// Sums over (m, p) = 1 of a(m)/m * weight(m) * Phi(rho m) for several (kernel, rho, residue weight) triples.
struct phi_sum_plan {
    cutoff_function f;
    double rho = 1;
    i64 modulus = 1;
    std::vector<cplx> weight;  // indexed by m mod modulus; empty means 1
    bool by_class = false;     // keep per-class sums mod p^beta instead of one total
};

struct phi_sum_result {
    cplx total;
    std::vector<cplx> classes;
    double bound = 0;
    i64 M = 0;
};

std::vector<phi_sum_result> phi_sums(const moment_query& q, const std::vector<phi_sum_plan>& plans) {
    const int n = q.n();
    const i64 p = q.p, Q = q.q();
    const double lpu = -q.u * std::log(static_cast<double>(p));
    std::vector<phi_sum_result> out(plans.size());
    std::vector<std::optional<tabulated_cutoff>> tabs(plans.size());
    std::vector<detail::tail_model> tms(plans.size());
    i64 Mmax = 1;
    for (std::size_t i = 0; i < plans.size(); ++i) {
        const auto& s = plans[i];
        double wmax = 1;
        if (!s.weight.empty()) {
            wmax = 0;
            for (const cplx& x : s.weight) wmax = std::max(wmax, std::abs(x));
        }
        const double lw = std::log(std::max(wmax, 1e-300));
        const double lr = std::log(s.rho) + lpu;
        tms[i] = detail::cutoff_tail_model(s.f, phi_u_grid());
        tms[i].shape = [n, lw, lr](double c, double m) { return lw + c * lr + dn_tail_rankin_log(n, 1 - c, m); };
        out[i].M = detail::pick_length(tms[i], std::log(q.target), 8, 200'000'000, "Phi_u progression");
        tabs[i].emplace(s.f, s.rho, s.rho * static_cast<double>(out[i].M));
        if (s.by_class) out[i].classes.assign(static_cast<std::size_t>(Q), 0.0);
        Mmax = std::max(Mmax, out[i].M);
    }
    std::vector<csum> acc(plans.size());
    std::vector<std::vector<csum>> cls(plans.size());
    for (std::size_t i = 0; i < plans.size(); ++i)
        if (plans[i].by_class) cls[i].resize(static_cast<std::size_t>(Q));
    std::vector<neumaier> err(plans.size());
    coefficient_sieve(q.datum, Mmax).run([&](i64 m0, const cplx* a, const double* dn, std::size_t len) {
        for (std::size_t k = 0; k < len; ++k) {
            const i64 m = m0 + static_cast<i64>(k);
            if (m % p == 0 || a[k] == 0.0) continue;
            const double md = static_cast<double>(m);
            for (std::size_t i = 0; i < plans.size(); ++i) {
                if (m > out[i].M) continue;
                const auto& s = plans[i];
                cplx x = 1.0;
                if (!s.weight.empty()) {
                    x = s.weight[static_cast<std::size_t>(m % s.modulus)];
                    if (x == 0.0) continue;
                }
                const cplx v = a[k] / md * x * (*tabs[i])(s.rho * md);
                if (s.by_class)
                    cls[i][static_cast<std::size_t>(m % Q)] += v;
                else
                    acc[i] += v;
                err[i].add(dn[k] / md * std::abs(x) * tabs[i]->error_bound());
            }
        }
    });
    for (std::size_t i = 0; i < plans.size(); ++i) {
        if (plans[i].by_class) {
            csum t;
            for (std::size_t b = 0; b < cls[i].size(); ++b) {
                out[i].classes[b] = cls[i][b].value();
                t += out[i].classes[b];
            }
            out[i].total = t.value();
        } else {
            out[i].total = acc[i].value();
        }
        out[i].bound = std::exp(tms[i].log_bound(static_cast<double>(out[i].M))) + err[i].value();
    }
    return out;
}

voronoi_params x2_params(const moment_query& q) {
    const i64 Q = q.q();
    voronoi_params vp(voronoi_theorem::VSFK, q.datum, q.p, q.beta, invmod(mod(q.datum.N(), Q), Q));
    vp.form = identity_form::corrected;
    vp.delta = q.delta;
    vp.u = q.u;
    vp.k = q.k;
    vp.cap = 400'000'000;
    return vp;
}

}  // namespace

moment_query::moment_query(isobaric_datum d, i64 p_, int beta_, cplx delta_, double u_)
    : datum(std::move(d)), p(p_), beta(beta_), delta(delta_), u(u_) {
    require(beta >= 2, errc::config_invalid, "the moment path needs beta >= 2");
    for (const auto& x : datum.components())
        require(gcd(x.q(), p) == 1, errc::invalid_argument, "p must not divide the conductor");
    require(datum.n() % p != 0, errc::invalid_argument, "p must not divide the dimension");
    require(delta.real() > 0 && delta.real() < 1, errc::invalid_argument, "delta must lie in the open critical strip");
    require(u > 0 && u < beta - 1, errc::invalid_argument, "u must satisfy 0 < u < beta - 1");
    group = build_unit_group(p, beta);
}

double moment_query::Z() const { return pw(p, u); }

double moment_query::f_beta() const { return static_cast<double>(datum.N()) * pw(p, double(beta) * n() - u); }

cplx moment_query::x2_prefactor() const {
    const double lY = std::log(static_cast<double>(datum.N())) + double(beta * n()) * std::log(static_cast<double>(p));
    return double(p) / double(p - 1) * datum.W() * datum.omega(q()) * std::exp((0.5 - delta) * lY) *
           pw(p, -0.5 * beta * n());
}

bounded_complex moment_direct(const moment_query& q) {
    const detail::character_L CL = detail::primitive_even_L(q.datum, q.group, q.delta);
    csum acc;
    for (const cplx& L : CL.L) acc += L;
    const double c = 2.0 / static_cast<double>(phi_star(q.p, q.beta));
    return {c * acc.value(), c * static_cast<double>(CL.L.size()) * CL.bound};
}

moment_split moment_decomposition(const moment_query& q) {
    const int n = q.n();
    const i64 p = q.p, Q = q.q();
    const double Z = q.Z();
    const double sd = q.delta.real();
    moment_split out;

    cutoff_function v1;
    v1.kind = cutoff_kind::V1;
    v1.k = q.k;
    detail::tail_model tm = detail::cutoff_tail_model(v1, {1, 1.5, 2, 3, 4, 5, 6, 8, 10, 12, 16, 20});
    const double lZ = std::log(Z);
    tm.shape = [n, sd, lZ](double c, double m) {
        if (c + sd <= 1) return HUGE_VAL;
        return c * lZ + dn_tail_rankin_log(n, c + sd, m);
    };
    const i64 M1 = detail::pick_length(tm, std::log(q.target), Z, 200'000'000, "X1");
    const tabulated_cutoff tab(v1, 1.0 / Z, static_cast<double>(M1) / Z);
    const auto w1 = average_weight(q.group);
    csum acc;
    neumaier err;
    coefficient_sieve(q.datum, M1).run([&](i64 m0, const cplx* a, const double* dn, std::size_t len) {
        for (std::size_t i = 0; i < len; ++i) {
            const i64 m = m0 + static_cast<i64>(i);
            if (m % p == 0 || a[i] == 0.0) continue;
            const cplx x = w1[static_cast<std::size_t>(m % Q)];
            if (x == 0.0) continue;
            const double md = static_cast<double>(m);
            const double pwr = std::pow(md, -sd);
            acc += a[i] * x * std::exp(-q.delta * std::log(md)) * tab(md / Z);
            err.add(dn[i] * std::abs(x) * pwr * tab.error_bound());
        }
    });
    out.X1 = {acc.value(), std::exp(tm.log_bound(static_cast<double>(M1))) + err.value()};
    out.x1_terms = M1;
    out.m1_term = tab(1.0 / Z);

    const cplx pref = q.x2_prefactor();
    voronoi_params vp = x2_params(q);
    // |Kl_n(+-x)| <= 2 n p^{beta(n-1)/2}
    const double wmax = 2.0 * n * pw(p, 0.5 * q.beta * (n - 1));
    vp.tail_target = q.target / (std::abs(pref) * wmax);
    const weighted_sum S = voronoi_lhs(vp);
    out.X2 = {pref * S.value, std::abs(pref) * S.bound};
    out.x2_terms = S.terms;

    const double N = static_cast<double>(q.datum.N());
    const double Y = N * pw(p, double(q.beta) * n);
    out.x2_envelope = pw(p, -0.5 * q.beta) * std::pow(Y, 1.5) * std::pow(N, sd) * std::pow(Z, -(1 + sd));
    return out;
}

bounded_complex phi_u_progression(const moment_query& q) {
    phi_sum_plan s;
    s.f = phi_u_kernel(q, false);
    s.modulus = q.q();
    s.weight = average_weight(q.group);
    const auto r = phi_sums(q, {s});
    const cplx pu = std::exp(q.u * (1.0 - q.delta) * std::log(static_cast<double>(q.p)));
    return {-pu * r[0].total, std::abs(pu) * r[0].bound};
}

twisted_sum_decomposition twisted_sum_voronoi(const moment_query& q) {
    const int n = q.n(), beta = q.beta;
    const i64 p = q.p, Q = q.q();
    require(beta >= 4 && beta % 2 == 0, errc::config_invalid, "the twisted-sum formula needs even beta >= 4");
    require(n >= 2, errc::config_invalid, "the twisted-sum formula needs n >= 2");
    require(p >= 5, errc::config_invalid, "the twisted-sum formula needs p >= 5");
    const prime_power_modulus& mod_q = q.group->modulus();
    const auto conv = registered_lift(p, beta, n);
    require(conv.has_value(), errc::salie_unavailable, "no calibrated root-lift convention is registered");

    const auto& g = q.group;
    const auto& d = q.datum;
    const cplx dl = q.delta;
    const double lp = std::log(static_cast<double>(p));
    const double f3 = 2.0 / static_cast<double>(p - 3);
    const double sgn_n = (n % 2 == 0) ? 1.0 : -1.0;
    const double pp = double(p) / double(p - 1);
    const cplx pu = std::exp(q.u * (1.0 - dl) * lp);

    // coefficient blocks shared by every x
    const detail::character_L C0 = detail::primitive_even_L(d, g, dl);
    std::vector<cplx> c0(C0.chars.size());
    for (std::size_t i = 0; i < c0.size(); ++i) c0[i] = std::pow(gauss_sum(C0.chars[i].conj()), n) * C0.L[i];
    const double a0_scale = 2.0 / static_cast<double>(phi_star(p, beta));
    const double a0_bound = a0_scale * static_cast<double>(c0.size()) * pw(p, 0.5 * beta * n) * C0.bound;

    struct level {
        int y;
        cplx residue;  // x-independent factor of the residue block
        double residue_bound;
        cplx sum;  // x-independent Phi_u sum
        double sum_bound;
        cplx lead;  // omega(p^y) / p^y, times p/phi(p) at the boundary
    };
    std::vector<level> levels;
    std::vector<phi_sum_plan> plans;
    {
        phi_sum_plan s1;
        s1.f = phi_u_kernel(q, false);
        s1.modulus = Q;
        s1.by_class = true;
        plans.push_back(s1);
    }
    for (int y = 1; y <= beta - 1; ++y) {
        const auto gy = build_unit_group(p, beta - y);
        const detail::character_L Cy = detail::primitive_even_L(d, gy, dl);
        csum acc;
        double mag = 0;
        for (std::size_t i = 0; i < Cy.chars.size(); ++i) {
            const cplx c = std::pow(gauss_sum(Cy.chars[i].conj()), n - 1);
            acc += c * Cy.L[i];
            mag += std::abs(c);
        }
        level lv;
        lv.y = y;
        lv.lead = d.omega(static_cast<i64>(std::llround(pw(p, y)))) / pw(p, y);
        if (y <= beta - 2) {
            const double c = 2.0 / static_cast<double>(phi_star(p, beta - y));
            const cplx e = std::exp(double(n * y) * (1.0 - dl) * lp);
            lv.residue = e * c * acc.value();
            lv.residue_bound = std::abs(e) * c * mag * Cy.bound;
        } else {
            const bounded_value Lpi = detail::untwisted_L(d, dl);
            const cplx eb = d.euler_inverse_dual(p, 1.0 - dl);
            const cplx e = std::exp(double(n) * dl * lp);
            lv.residue = pp * f3 * (e * acc.value() - pw(p, n - 1) * eb * Lpi.value);
            lv.residue_bound = pp * f3 * (std::abs(e) * mag * Cy.bound + pw(p, n - 1) * std::abs(eb) * Lpi.bound);
        }
        levels.push_back(lv);
        const auto kly = kl_pm_residues(gy, n - 1);
        phi_sum_plan s;
        s.f = phi_u_kernel(q, false);
        s.rho = pw(p, double(n * y));
        s.modulus = gy->q();
        s.weight = kly;
        if (y == beta - 1)
            for (i64 b = 0; b < s.modulus; ++b)
                if (gy->dlog(b) >= 0) s.weight[static_cast<std::size_t>(b)] += sgn_n * f3;
        plans.push_back(s);
    }
    {
        phi_sum_plan s;
        s.f = phi_u_kernel(q, true);
        s.rho = pw(p, double(n * beta));
        plans.push_back(s);
    }
    const auto sums = phi_sums(q, plans);
    for (std::size_t j = 0; j < levels.size(); ++j) {
        levels[j].sum = sums[j + 1].total;
        levels[j].sum_bound = sums[j + 1].bound;
    }
    const cplx eps_sum = sums.back().total;
    const double eps_bound = sums.back().bound;
    // boundary bracket: first sum minus (1/p)(-1)^n 2/(p-3) times the tilde sum
    levels.back().sum -= sgn_n * f3 / double(p) * eps_sum;
    levels.back().sum_bound += f3 / double(p) * eps_bound;
    const auto& P1 = sums[0].classes;
    const double P1_bound = sums[0].bound;

    const kl_table kl(g, n, kl_method::fft_dp);
    const double pre3 = pw(p, beta * (1.0 - 0.5 * n)) / pw(p, 1.5 * beta);
    const double pre4 = pw(p, -double(beta) * n);
    const double root_scale = pw(p, 0.5 * beta * (n - 1));
    double klmax = 0;
    for (const cplx& v : kl.values()) klmax = std::max(klmax, 2 * std::abs(v));

    twisted_sum_decomposition out;
    out.convention = std::string(lift_convention_name(*conv));
    out.S2_blocks.assign(static_cast<std::size_t>(beta - 2), 0.0);
    csum r0, r1, r2, s1, s2, s3, tot3, tot4;
    std::vector<csum> s2y(static_cast<std::size_t>(beta - 2));
    csum s2b;
    double bound = 0;
    std::vector<i64> units;
    for (i64 b = 1; b < Q; ++b)
        if (g->dlog(b) >= 0) units.push_back(b);
    for (const i64 x : units) {
        if (!power_residue_symbol(x, n, mod_q)) continue;
        ++out.classes;
        const cplx R = salie_closed_form(x, n, mod_q, *conv) / root_scale;
        const cplx K = kl(x);
        // y = 0 block
        csum a0;
        for (std::size_t i = 0; i < c0.size(); ++i) a0 += C0.chars[i](-x) * c0[i];
        const cplx A0 = a0_scale * a0.value();
        // frak S_1
        csum f1;
        for (const i64 b : units) {
            const cplx v = P1[static_cast<std::size_t>(b)];
            if (v != 0.0) f1 += v * kl.pm(mod(b * x, Q));
        }
        const cplx S1 = pp * f1.value();
        cplx Ay = 0.0, S2 = 0.0, Ab = 0.0, S3 = 0.0;
        double lb = a0_bound + std::abs(pu) * pp * P1_bound * klmax * static_cast<double>(units.size());
        for (std::size_t j = 0; j < levels.size(); ++j) {
            const auto& lv = levels[j];
            const i64 py = static_cast<i64>(std::llround(pw(p, lv.y)));
            const cplx psi = e_frac(-py * x, Q);
            const cplx res = lv.lead * psi * lv.residue;
            const cplx frak = pp * lv.lead * psi * lv.sum;
            lb += std::abs(lv.lead) * (lv.residue_bound + std::abs(pu) * pp * lv.sum_bound);
            if (lv.y <= beta - 2) {
                Ay += res;
                S2 += frak;
                s2y[j] += pre3 * R * (res + pu * frak);
            } else {
                Ab = res;
                S3 = frak;
                s2b += pre3 * R * (res + pu * frak);
            }
        }
        const cplx brace = A0 + Ay + Ab + pu * (S1 + S2 + S3);
        r0 += pre3 * R * A0;
        r1 += pre3 * R * Ay;
        r2 += pre3 * R * Ab;
        s1 += pre3 * R * pu * S1;
        s2 += pre3 * R * pu * S2;
        s3 += pre3 * R * pu * S3;
        tot3 += pre3 * R * brace;
        tot4 += pre4 * K * brace;
        bound += pre3 * std::abs(R) * lb;
    }
    out.residue_block[0] = r0.value();
    out.residue_block[1] = r1.value();
    out.residue_block[2] = r2.value();
    out.S1_block = s1.value();
    for (std::size_t j = 0; j < s2y.size(); ++j) out.S2_blocks[j] = s2y[j].value();
    out.S2_boundary = s2b.value();
    out.frak_S[0] = s1.value();
    out.frak_S[1] = s2.value();
    out.frak_S[2] = s3.value();
    out.total = tot3.value();
    out.total_vsf4 = tot4.value();
    out.bound = bound + 1e-14 * std::abs(out.total);
    return out;
}

recursion_routes moment_routes(const moment_query& q) {
    recursion_routes r;
    r.direct = moment_direct(q);
    const moment_split ms = moment_decomposition(q);
    r.decomposition = {ms.X1.value + ms.X2.value, ms.X1.bound + ms.X2.bound};

    const voronoi_params vp = x2_params(q);
    const voronoi_rhs R = voronoi_right(vp, 1.0 / std::abs(q.x2_prefactor()));
    const cplx pref = q.x2_prefactor();
    r.vsfk = {ms.X1.value + pref * R.value, ms.X1.bound + std::abs(pref) * R.bound};

    if (q.beta >= 4 && q.beta % 2 == 0 && q.p >= 5) {
        if (!registered_lift(q.p, q.beta, q.n())) {
            try {
                calibrate_salie_lift(q.p, q.beta, q.n());
            } catch (const error&) {
            }
        }
        if (registered_lift(q.p, q.beta, q.n())) {
            const auto T = twisted_sum_voronoi(q);
            const bounded_complex P = phi_u_progression(q);
            r.vsfts = {P.value + T.total, P.bound + T.bound};
            r.vsfts_available = true;
        }
    }
    r.twisted_bound_remainder = r.direct.value - 1.0 - ms.X2.value;
    const double sd = q.delta.real(), lp = std::log(static_cast<double>(q.p));
    r.twisted_bound_order =
        std::exp(q.u * (1 - sd + 1) * lp + double(q.beta) * (ramanujan_theta - (1 - sd) - 1) * lp);
    return r;
}

verification_report moment_recursion(const moment_query& q, double tolerance) {
    const auto t0 = std::chrono::steady_clock::now();
    verification_report r;
    r.check = "moment recursion";
    r.form = "literal";
    r.param("p", std::to_string(q.p));
    r.param("beta", std::to_string(q.beta));
    r.param("n", std::to_string(q.n()));
    r.param("N", std::to_string(q.datum.N()));
    r.param("delta", format_complex(q.delta));
    r.param("u", std::to_string(q.u));
    const recursion_routes rt = moment_routes(q);
    r.lhs = rt.direct.value;
    r.lhs_bound = rt.direct.bound;
    const bounded_complex& main = rt.vsfts_available ? rt.vsfts : rt.vsfk;
    r.rhs = main.value;
    r.rhs_bound = main.bound;
    r.terms.push_back({"direct", rt.direct.value, rt.direct.bound});
    r.terms.push_back({"X1 + X2", rt.decomposition.value, rt.decomposition.bound});
    if (rt.vsfts_available) r.terms.push_back({"VSFts", rt.vsfts.value, rt.vsfts.bound});
    r.terms.push_back({"VSFK", rt.vsfk.value, rt.vsfk.bound});
    r.terms.push_back({"X_beta - 1 - X2", rt.twisted_bound_remainder, rt.twisted_bound_order});
    if (!rt.vsfts_available) r.notes.emplace_back("twisted-sum route unavailable for these parameters");
    char buf[128];
    std::snprintf(buf, sizeof buf, "|X_beta - 1 - X2| = %.3e against predicted order %.3e",
                  std::abs(rt.twisted_bound_remainder), rt.twisted_bound_order);
    r.notes.emplace_back(buf);
    r.scale = std::max(std::abs(rt.direct.value), 1.0);
    r.finish(tolerance);
    double dev = std::abs(rt.direct.value - rt.decomposition.value);
    dev = std::max(dev, std::abs(rt.direct.value - rt.vsfk.value));
    if (rt.vsfts_available) dev = std::max(dev, std::abs(rt.direct.value - rt.vsfts.value));
    r.residual = dev;
    r.relative_residual = dev / r.scale;
    r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace hkv
