#include "hkv/ldata.hpp"

#include <charconv>
#include <string>

#include "hkv/error.hpp"
#include "hkv/fft.hpp"

namespace hkv {

namespace {

prime_power_modulus factor_prime_power(i64 q) {
    require(q >= 3, errc::config_invalid, "conductor must be an odd prime power");
    i64 p = 0;
    for (i64 d = 2; d * d <= q; ++d)
        if (q % d == 0) {
            p = d;
            break;
        }
    if (p == 0) p = q;
    int beta = 0;
    i64 r = q;
    while (r % p == 0) {
        r /= p;
        ++beta;
    }
    require(r == 1, errc::config_invalid, "conductor must be a prime power");
    return prime_power_modulus::make(p, beta);
}

cplx char_at(const std::vector<cplx>& tab, i64 m) {
    return tab[static_cast<std::size_t>(m % static_cast<i64>(tab.size()))];
}

}  // namespace

// ---- datum ----

isobaric_datum::isobaric_datum(std::vector<dirichlet_character> components, bool allow_trivial)
    : xi_(std::move(components)) {
    require(!xi_.empty(), errc::invalid_argument, "isobaric datum needs at least one component");
    for (const auto& x : xi_) {
        require(x.even(), errc::config_invalid, "components must be even");
        if (x.trivial())
            require(allow_trivial, errc::trivial_character, "trivial component not admitted");
        else
            require(x.primitive(), errc::config_invalid, "components must be primitive");
        N_ *= x.q();
        W_ *= gauss_sum(x) / std::sqrt(static_cast<double>(x.q()));
    }
    gamma_ = gamma_data::trivial(n());
}

cplx isobaric_datum::omega(i64 m) const {
    cplx r = 1.0;
    for (const auto& x : xi_) r *= x(m);
    return r;
}

isobaric_datum isobaric_datum::dual() const {
    std::vector<dirichlet_character> c;
    bool has_trivial = false;
    for (const auto& x : xi_) {
        c.push_back(x.conj());
        has_trivial |= x.trivial();
    }
    return isobaric_datum(std::move(c), has_trivial);
}

std::vector<cplx> complete_homogeneous(const std::vector<cplx>& x, int K) {
    std::vector<cplx> h(static_cast<std::size_t>(K) + 1, 0.0);
    h[0] = 1.0;
    for (const cplx& xi : x)
        for (int k = 1; k <= K; ++k) h[k] += xi * h[k - 1];
    return h;
}

double divisor_power_count(int n, int k) {
    double c = 1;
    for (int i = 1; i < n; ++i) c = c * (k + i) / i;
    return c;
}

std::vector<cplx> isobaric_datum::satake(i64 p) const {
    std::vector<cplx> a;
    for (const auto& x : xi_) a.push_back(x(p));
    return a;
}

cplx isobaric_datum::coeff(i64 m) const {
    require(m >= 1, errc::invalid_argument, "coefficient index must be positive");
    cplx r = 1.0;
    for (i64 l = 2; l * l <= m; ++l) {
        if (m % l) continue;
        int k = 0;
        while (m % l == 0) {
            m /= l;
            ++k;
        }
        r *= complete_homogeneous(satake(l), k)[k];
    }
    if (m > 1) r *= complete_homogeneous(satake(m), 1)[1];
    return r;
}

std::vector<cplx> isobaric_datum::coeff_range(i64 M) const {
    std::vector<cplx> a(static_cast<std::size_t>(M) + 1, 0.0);
    coefficient_sieve(*this, M).run([&](i64 m0, const cplx* v, const double*, std::size_t len) {
        std::copy(v, v + len, a.begin() + m0);
    });
    return a;
}

cplx isobaric_datum::euler_inverse(i64 p, cplx s) const {
    const cplx ps = std::exp(-s * std::log(static_cast<double>(p)));
    cplx r = 1.0;
    for (const cplx& a : satake(p)) r *= 1.0 - a * ps;
    return r;
}

cplx isobaric_datum::euler_inverse_dual(i64 p, cplx s) const {
    const cplx ps = std::exp(-s * std::log(static_cast<double>(p)));
    cplx r = 1.0;
    for (const cplx& a : satake(p)) r *= 1.0 - std::conj(a) * ps;
    return r;
}

isobaric_datum parse_components(std::string_view text) {
    std::vector<dirichlet_character> c;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find(',', pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view item = text.substr(pos, end - pos);
        const std::size_t colon = item.find(':');
        require(colon != std::string_view::npos, errc::config_invalid, "component must read q:t");
        i64 q = 0, t = 0;
        const auto r1 = std::from_chars(item.data(), item.data() + colon, q);
        const auto r2 = std::from_chars(item.data() + colon + 1, item.data() + item.size(), t);
        require(r1.ec == std::errc() && r2.ec == std::errc(), errc::config_invalid,
                "bad component: " + std::string(item));
        c.emplace_back(build_unit_group(factor_prime_power(q)), t);
        pos = end + 1;
    }
    return isobaric_datum(std::move(c));
}

// ---- sieve ----

coefficient_sieve::coefficient_sieve(const isobaric_datum& d, i64 M, std::size_t block)
    : n_(d.n()), M_(M), block_(block) {
    require(M >= 1, errc::invalid_argument, "sieve bound must be positive");
    for (const auto& x : d.components()) {
        xi_tables_.push_back(x.table());
        xi_mod_.push_back(x.q());
    }
    i64 r = 1;
    while ((r + 1) * (r + 1) <= M) ++r;
    primes_ = primes_up_to(r);
    for (i64 l : primes_) {
        int K = 0;
        for (i64 v = l; v <= M; v *= l) {
            ++K;
            if (v > M / l) break;
        }
        std::vector<cplx> x;
        for (const auto& t : xi_tables_) x.push_back(char_at(t, l));
        hk_.push_back(complete_homogeneous(x, K));
    }
}

void coefficient_sieve::run(const block_fn& fn) const {
    std::vector<i64> rem(block_);
    std::vector<cplx> a(block_);
    std::vector<double> dn(block_);
    std::vector<double> dcount(64);
    for (int k = 0; k < 64; ++k) dcount[k] = divisor_power_count(n_, k);
    for (i64 lo = 1; lo <= M_; lo += static_cast<i64>(block_)) {
        const auto len = static_cast<std::size_t>(std::min<i64>(static_cast<i64>(block_), M_ - lo + 1));
        const i64 hi = lo + static_cast<i64>(len);
        for (std::size_t i = 0; i < len; ++i) {
            rem[i] = lo + static_cast<i64>(i);
            a[i] = 1.0;
            dn[i] = 1.0;
        }
        for (std::size_t j = 0; j < primes_.size(); ++j) {
            const i64 l = primes_[j];
            if (l * l >= hi) break;
            const std::vector<cplx>& h = hk_[j];
            for (i64 m = ((lo + l - 1) / l) * l; m < hi; m += l) {
                const auto i = static_cast<std::size_t>(m - lo);
                int k = 0;
                do {
                    rem[i] /= l;
                    ++k;
                } while (rem[i] % l == 0);
                a[i] *= h[k];
                dn[i] *= dcount[k];
            }
        }
        for (std::size_t i = 0; i < len; ++i)
            if (rem[i] > 1) {
                cplx s = 0.0;
                for (const auto& t : xi_tables_) s += char_at(t, rem[i]);
                a[i] *= s;
                dn[i] *= n_;
            }
        fn(lo, a.data(), dn.data(), len);
    }
}

double dn_tail(int n, double alpha, double partial) {
    require(alpha > 1, errc::invalid_argument, "divisor tail needs alpha > 1");
    const double z = std::real(hurwitz_zeta(alpha, 1.0).value);
    const double full = std::pow(z, n);
    return std::max(0.0, full - partial) + 1e-15 * full;
}

double dn_tail_rankin_log(int n, double alpha, double M) {
    require(alpha > 1 && M >= 1, errc::invalid_argument, "Rankin bound needs alpha > 1");
    // sum_{m > M} d_n(m) m^{-alpha} <= M^{a0 - alpha} zeta(a0)^n, zeta(x) < 1 + 1/(x-1)
    double best = HUGE_VAL;
    const double lM = std::log(M);
    for (double t = 1e-4; t < alpha - 1; t *= 1.2) {
        const double a0 = 1 + t;
        best = std::min(best, (a0 - alpha) * lM + n * std::log1p(1.0 / t));
    }
    return best;
}

// ---- Dirichlet L ----

bounded_value dirichlet_L(const dirichlet_character& xi, cplx s) {
    require(!xi.trivial(), errc::trivial_character, "pole of the trivial character not handled");
    return periodic_L(xi.table(), s);
}

bounded_value dirichlet_L(const dirichlet_character& xi, const dirichlet_character& chi, cplx s) {
    require(!(xi.trivial() && chi.trivial()), errc::trivial_character, "pole of the trivial character not handled");
    const i64 Q = xi.q() * chi.q();
    std::vector<cplx> c(static_cast<std::size_t>(Q));
    for (i64 a = 0; a < Q; ++a) c[a] = xi(a) * chi(a);
    return periodic_L(c, s);
}

// ---- progression series ----

progression_table progression_series(const std::vector<dirichlet_character>& psi, const unit_group_ptr& g, cplx w) {
    require(!psi.empty(), errc::invalid_argument, "progression series needs at least one character");
    const i64 q = g->q();
    const auto phi = static_cast<std::size_t>(g->order());
    std::vector<cplx> T;
    double eT = 0;
    for (std::size_t idx = 0; idx < psi.size(); ++idx) {
        const auto& x = psi[idx];
        require(gcd(x.q(), q) == 1, errc::invalid_argument, "character modulus must be coprime to q");
        const i64 Q = x.q() * q;
        const hurwitz_table Z(Q, w);
        std::vector<csum> acc(phi);
        std::vector<double> eb(phi, 0.0);
        for (i64 a = 0; a < Q; ++a) {
            const std::int32_t k = g->dlog(a % q);
            if (k < 0) continue;
            const cplx v = x(a % x.q());
            if (v == 0.0) continue;
            acc[k] += v * Z[a];
            eb[k] += Z.bound(a);
        }
        std::vector<cplx> S(phi);
        double eS = 0, sumS = 0, maxS = 0;
        for (std::size_t k = 0; k < phi; ++k) {
            S[k] = acc[k].value();
            eS = std::max(eS, eb[k]);
            sumS += std::abs(S[k]);
            maxS = std::max(maxS, std::abs(S[k]));
        }
        if (idx == 0) {
            T = std::move(S);
            eT = eS + 1e-16 * maxS;
            continue;
        }
        double sumT = 0;
        for (const cplx& t : T) sumT += std::abs(t);
        T = cyclic_convolution(T, S);
        eT = sumS * eT + eS * sumT + 1e-15 * sumS * sumT / std::sqrt(static_cast<double>(phi)) * 4;
    }
    progression_table out;
    out.q = q;
    out.value.assign(static_cast<std::size_t>(q), 0.0);
    for (std::size_t k = 0; k < phi; ++k) out.value[static_cast<std::size_t>(g->power(static_cast<i64>(k)))] = T[k];
    out.bound = eT;
    return out;
}

twisted_family twisted_L_all(const isobaric_datum& d, const unit_group_ptr& g, cplx s) {
    const progression_table P = progression_series(d.components(), g, s);
    const std::size_t phi = static_cast<std::size_t>(g->order());
    std::vector<cplx> v(phi);
    double mag = 0;
    for (std::size_t k = 0; k < phi; ++k) {
        v[k] = P.value[static_cast<std::size_t>(g->power(static_cast<i64>(k)))];
        mag += std::abs(v[k]);
    }
    // L_j = sum_k e(jk/phi) P(g^k)
    dft_plan(phi).inverse(v);
    for (cplx& x : v) x *= static_cast<double>(phi);
    return {std::move(v), static_cast<double>(phi) * P.bound + 1e-14 * mag};
}

// ---- twisted L ----

std::string_view l_mode_name(l_mode m) {
    switch (m) {
        case l_mode::series: return "series";
        case l_mode::product: return "product";
        case l_mode::afe: return "afe";
    }
    return "?";
}

l_mode parse_l_mode(std::string_view s) {
    if (s == "series") return l_mode::series;
    if (s == "product") return l_mode::product;
    if (s == "afe") return l_mode::afe;
    raise(errc::config_invalid, "unknown L mode: " + std::string(s));
}

namespace {

l_value L_product(const isobaric_datum& d, const dirichlet_character& chi, cplx s) {
    cplx v = 1.0;
    double mag = 1.0, exact = 1.0;
    for (const auto& x : d.components()) {
        const bounded_value b = dirichlet_L(x, chi, s);
        v *= b.value;
        mag *= std::abs(b.value) + b.bound;
        exact *= std::abs(b.value);
    }
    return {v, mag - exact + 1e-15 * mag, 0};
}

l_value L_series(const isobaric_datum& d, const dirichlet_character& chi, cplx s, const l_options& opt) {
    const double sig = s.real();
    require(sig > 1.05, errc::mode_unavailable, "series mode needs Re s > 1.05");
    const int n = d.n();
    // smallest M whose divisor-majorant tail estimate meets the target
    auto estimate = [&](double M) {
        double lf = 1;
        for (int i = 1; i < n; ++i) lf *= i;
        return std::pow(std::log(M) + n, n - 1) / lf * std::pow(M, 1 - sig) / (sig - 1);
    };
    double M = 1000;
    while (estimate(M) > opt.series_target && M < static_cast<double>(opt.series_cap)) M *= 1.25;
    const auto Mi = static_cast<i64>(std::min(M, static_cast<double>(opt.series_cap)));
    const std::vector<cplx> ct = chi.table();
    csum acc;
    neumaier dsum;
    coefficient_sieve(d, Mi).run([&](i64 m0, const cplx* a, const double* dn, std::size_t len) {
        for (std::size_t i = 0; i < len; ++i) {
            const i64 m = m0 + static_cast<i64>(i);
            const double lm = std::log(static_cast<double>(m));
            dsum.add(dn[i] * std::exp(-sig * lm));
            const cplx c = char_at(ct, m);
            if (c == 0.0 || a[i] == 0.0) continue;
            acc += a[i] * c * std::exp(-s * lm);
        }
    });
    const double tail = dn_tail(n, sig, dsum.value());
    require(tail < 1e-6, errc::tail_bound_exceeds_tolerance, "series tail too large at the term cap");
    return {acc.value(), tail + 1e-15 * dsum.value(), Mi};
}

l_value L_afe(const isobaric_datum& d, const dirichlet_character& chi, cplx delta, const l_options& opt) {
    require(delta.real() > 0 && delta.real() < 1, errc::mode_unavailable, "afe mode needs 0 < Re delta < 1");
    require(chi.primitive() && !chi.trivial(), errc::mode_unavailable, "afe mode needs a primitive twist");
    const int n = d.n();
    const double q = static_cast<double>(chi.q()), N = static_cast<double>(d.N());
    require(gcd(d.N(), chi.q()) == 1, errc::mode_unavailable, "twist modulus must be coprime to N");
    const double cond = N * std::pow(q, n);
    const double Z = opt.afe_Z > 0 ? opt.afe_Z : std::sqrt(cond);
    const double sig = delta.real();
    const cplx tq = gauss_sum(chi) / std::sqrt(q);
    const cplx pref = d.W() * d.omega(chi.q()) * chi(d.N()) * std::pow(tq, n) * std::exp((0.5 - delta) * std::log(cond));

    cutoff_function v1;
    v1.kind = cutoff_kind::V1;
    v1.k = test_function_k::for_gamma(d.gamma());
    cutoff_function v2 = v1;
    v2.kind = cutoff_kind::V2;
    v2.gamma = d.gamma();
    v2.delta = delta;
    const double kappa = v1.k.kappa;
    const double c_lo = v2.legal_strip().first;

    // contour near the saddle of e^{kappa c^2} Y^{-c}
    auto contour = [&](double Y) { return std::clamp(std::log(Y) / (2.0 * kappa), 3.0, 60.0); };
    auto tail1_at = [&](double Y) {
        const double c = contour(Y);
        return std::exp(std::log(cutoff_majorant(v1, c)) + c * std::log(Z) +
                        dn_tail_rankin_log(n, sig + c, std::ceil(Z * Y)));
    };
    auto tail2_at = [&](double Y) {
        const double c2 = c_lo + contour(Y);
        return std::abs(pref) * std::exp(std::log(cutoff_majorant(v2, c2)) + c2 * std::log(cond / Z) +
                                          dn_tail_rankin_log(n, 1 - sig + c2, std::ceil(cond / Z * Y)));
    };
    double Y1 = 4, Y2 = 4;
    while (tail1_at(Y1) > 0.5 * opt.afe_target && Y1 < 1e4) Y1 *= 1.25;
    while (tail2_at(Y2) > 0.5 * opt.afe_target && Y2 < 1e4) Y2 *= 1.25;
    const double tail1 = tail1_at(Y1), tail2 = tail2_at(Y2);
    require(tail1 + tail2 < 1e-6, errc::tail_bound_exceeds_tolerance, "afe tails do not converge");

    const auto M1 = static_cast<i64>(std::ceil(Z * Y1));
    const auto M2 = static_cast<i64>(std::ceil(cond / Z * Y2));
    const i64 M = std::max(M1, M2);
    quadrature_options qo;
    qo.tail_target = 1e-15;
    const tabulated_cutoff t1(v1, 0.5 / Z, M1 / Z, qo);
    const tabulated_cutoff t2(v2, 0.5 * Z / cond, M2 * Z / cond, qo);
    const std::vector<cplx> ct = chi.table();
    csum s1, s2;
    double w1 = 0, w2 = 0;
    coefficient_sieve(d, M).run([&](i64 m0, const cplx* a, const double*, std::size_t len) {
        for (std::size_t i = 0; i < len; ++i) {
            const i64 m = m0 + static_cast<i64>(i);
            const cplx cm = char_at(ct, m);
            if (cm == 0.0 || a[i] == 0.0) continue;
            const double lm = std::log(static_cast<double>(m));
            if (m <= M1) {
                const cplx t = a[i] * cm * std::exp(-delta * lm);
                s1 += t * t1(m / Z);
                w1 += std::abs(t);
            }
            if (m <= M2) {
                const cplx t = std::conj(a[i] * cm) * std::exp((delta - 1.0) * lm);
                s2 += t * t2(m * Z / cond);
                w2 += std::abs(t);
            }
        }
    });
    const double bar = tail1 + tail2 + w1 * t1.error_bound() + std::abs(pref) * w2 * t2.error_bound() +
                       1e-15 * (w1 + std::abs(pref) * w2);
    return {s1.value() + pref * s2.value(), bar, M};
}

}  // namespace

l_value twisted_L(const isobaric_datum& d, const dirichlet_character& chi, cplx s, l_mode mode,
                  const l_options& opt) {
    for (const auto& x : d.components())
        require(gcd(x.q(), chi.q()) == 1, errc::invalid_argument, "twist modulus must be coprime to the components");
    switch (mode) {
        case l_mode::series: return L_series(d, chi, s, opt);
        case l_mode::product: return L_product(d, chi, s);
        case l_mode::afe: return L_afe(d, chi, s, opt);
    }
    raise(errc::mode_unavailable, "unknown mode");
}

}  // namespace hkv
