#include "hkv/kernels.hpp"

#include <cmath>

#include "hkv/error.hpp"
#include "hkv/special.hpp"

namespace hkv {

namespace {

cplx log_F(cplx s, const std::vector<cplx>& mu, const std::vector<cplx>& mu_bar, bool reflect, bool& zero) {
    const auto lg = reflect ? log_gamma_reflect : log_gamma;
    const double n = static_cast<double>(mu.size());
    cplx acc = std::log(pi) * (-n / 2.0 + n * s);
    zero = false;
    for (const cplx& mb : mu_bar) {
        const cplx a = (1.0 - s - mb) / 2.0;
        require(!is_non_positive_integer(a, 1e-12), errc::pole_hit, "F(s) evaluated at a gamma pole");
        acc += lg(a);
    }
    for (const cplx& m : mu) {
        const cplx b = (s - m) / 2.0;
        if (is_non_positive_integer(b, 1e-12)) {
            zero = true;
            continue;
        }
        acc -= lg(b);
    }
    return acc;
}

cplx F_generic(cplx s, const std::vector<cplx>& mu, const std::vector<cplx>& mu_bar, bool reflect) {
    bool zero = false;
    const cplx l = log_F(s, mu, mu_bar, reflect, zero);
    return zero ? cplx(0.0) : std::exp(l);
}

cplx euler_product(const std::vector<cplx>& alpha, i64 p, cplx s) {
    cplx r = 1.0;
    const cplx ps = std::exp(-s * std::log(static_cast<double>(p)));
    for (const cplx& a : alpha) r *= 1.0 - a * ps;
    return r;
}

}  // namespace

// ---- gamma data ----

gamma_data gamma_data::trivial(int n) {
    require(n >= 1, errc::invalid_argument, "degree must be positive");
    gamma_data g;
    g.n = n;
    g.mu.assign(n, 0.0);
    g.mu_bar.assign(n, 0.0);
    g.delta0 = 0;
    return g;
}

gamma_data gamma_data::make(std::vector<cplx> mu, std::optional<std::vector<cplx>> mu_bar) {
    require(!mu.empty(), errc::invalid_argument, "gamma data needs at least one parameter");
    gamma_data g;
    g.n = static_cast<int>(mu.size());
    if (mu_bar) {
        require(mu_bar->size() == mu.size(), errc::invalid_argument, "mu and mu_bar lengths differ");
        g.mu_bar = *mu_bar;
    } else {
        for (const cplx& m : mu) g.mu_bar.push_back(std::conj(m));
    }
    g.mu = std::move(mu);
    const double bound = 0.5 - 1.0 / (g.n * g.n + 1.0);
    for (const cplx& m : g.mu)
        require(std::fabs(m.real()) <= bound + 1e-15, errc::config_invalid, "|Re mu_j| exceeds 1/2 - 1/(n^2+1)");
    g.delta0 = -1e300;
    for (const cplx& m : g.mu_bar) g.delta0 = std::max(g.delta0, m.real());
    return g;
}

gamma_data gamma_data::dual() const {
    gamma_data g = *this;
    std::swap(g.mu, g.mu_bar);
    g.delta0 = -1e300;
    for (const cplx& m : g.mu_bar) g.delta0 = std::max(g.delta0, m.real());
    return g;
}

bool gamma_data::all_zero() const {
    for (const cplx& m : mu)
        if (m != 0.0) return false;
    for (const cplx& m : mu_bar)
        if (m != 0.0) return false;
    return true;
}

cplx F_ratio(cplx s, const gamma_data& g) { return F_generic(s, g.mu, g.mu_bar, false); }
cplx Fbar_ratio(cplx s, const gamma_data& g) { return F_generic(s, g.mu_bar, g.mu, false); }
cplx F_ratio_reflect(cplx s, const gamma_data& g) { return F_generic(s, g.mu, g.mu_bar, true); }

double F_stirling_magnitude(cplx s, const gamma_data& g) {
    const double sig = s.real(), t = std::fabs(s.imag());
    double e = 0;
    for (const cplx& mb : g.mu_bar) e += (1.0 - sig - mb.real()) / 2.0;
    for (const cplx& m : g.mu) e -= (sig - m.real()) / 2.0;
    return std::pow(pi, -g.n / 2.0 + g.n * sig) * std::pow(t / 2.0, e);
}

// ---- test function ----

test_function_k test_function_k::for_gamma(const gamma_data& g, double kappa) {
    test_function_k k;
    k.kappa = kappa;
    if (!g.all_zero()) {
        k.kind = k_kind::vanishing_at_mu;
        k.zeros = g.mu_bar;
    }
    return k;
}

cplx test_function_k::operator()(cplx s) const {
    cplx v = std::exp(kappa * s * s);
    if (kind == k_kind::vanishing_at_mu)
        for (const cplx& z : zeros)
            if (z != 0.0) v *= 1.0 - s / z;
    return v;
}

int test_function_k::poly_degree() const {
    if (kind != k_kind::vanishing_at_mu) return 0;
    int d = 0;
    for (const cplx& z : zeros) d += (z != 0.0);
    return d;
}

// ---- quadrature ----

line_quadrature::line_quadrature(line_integrand f, double c, const quadrature_options& opt, double scale)
    : f_(std::move(f)), c_(c), h_(opt.h) {
    require(h_ > 0, errc::invalid_argument, "quadrature step must be positive");
    for (const cplx& pole : f_.poles)
        require(std::fabs(pole.real() - c_) >= 0.1, errc::invalid_argument, "contour within 0.1 of a pole");
    if (opt.T) {
        T_ = *opt.T;
        tail_ = tail_coefficient(T_);
    } else {
        T_ = 4;
        for (;;) {
            tail_ = tail_coefficient(T_);
            if (tail_ * scale < opt.tail_target) break;
            T_ += 1;
            require(T_ <= 800, errc::tail_bound_exceeds_tolerance, "no truncation height meets the tail target");
        }
    }
    const auto m = static_cast<std::size_t>(std::ceil(T_ / h_));
    T_ = static_cast<double>(m) * h_;
    w_.resize(2 * m + 1);
    for (std::size_t j = 0; j < w_.size(); ++j) {
        const double t = -T_ + static_cast<double>(j) * h_;
        double wt = h_ / two_pi;
        if (j == 0 || j + 1 == w_.size()) wt *= 0.5;
        w_[j] = wt * f_.G(cplx(c_, t));
    }
}

double line_quadrature::tail_coefficient(double T) const {
    const double te = T - f_.imag_offset;
    if (te <= 1) return HUGE_VAL;
    const double rate = 2.0 * f_.gauss_rate * te - std::max(f_.growth, 0.0) / te;
    if (rate <= 0.5) return HUGE_VAL;
    const double g = std::abs(f_.G(cplx(c_, T))) + std::abs(f_.G(cplx(c_, -T)));
    if (!std::isfinite(g)) return HUGE_VAL;
    // factor 2 absorbs the gap between |G| and its Stirling majorant
    return 2.0 * g / rate / two_pi;
}

double line_quadrature::tail_bound(double y) const {
    return tail_ * std::exp(f_.direction * c_ * std::log(y));
}

double line_quadrature::abs_mass() const {
    double m = 0;
    for (const cplx& w : w_) m += std::abs(w);
    return m + tail_;
}

kernel_value line_quadrature::operator()(double y) const {
    require(y > 0, errc::invalid_argument, "cutoff argument must be positive");
    const double L = f_.direction * std::log(y);
    const cplx step = std::exp(cplx(0.0, h_ * L));
    csum acc;
    cplx z;
    for (std::size_t j = 0; j < w_.size(); ++j) {
        if (j % 32 == 0)
            z = std::exp(cplx(0.0, (-T_ + static_cast<double>(j) * h_) * L));
        else
            z *= step;
        acc += w_[j] * z;
    }
    return {acc.value() * std::exp(c_ * L), tail_bound(y)};
}

// ---- cutoffs ----

std::string_view cutoff_kind_name(cutoff_kind k) {
    switch (k) {
        case cutoff_kind::V1: return "V1";
        case cutoff_kind::V2: return "V2";
        case cutoff_kind::Phi_u: return "Phi_u";
        case cutoff_kind::Phi_tilde_u: return "Phi_tilde_u";
        case cutoff_kind::Phi_gl1: return "Phi_gl1";
        case cutoff_kind::Phi_tilde_gl1: return "Phi_tilde_gl1";
        case cutoff_kind::Phi_gln: return "Phi_gln";
        case cutoff_kind::Phi_tilde_gln: return "Phi_tilde_gln";
    }
    return "?";
}

cutoff_kind parse_cutoff_kind(std::string_view s) {
    for (int i = 0; i <= static_cast<int>(cutoff_kind::Phi_tilde_gln); ++i) {
        const auto k = static_cast<cutoff_kind>(i);
        if (cutoff_kind_name(k) == s) return k;
    }
    raise(errc::config_invalid, "unknown cutoff kind: " + std::string(s));
}

double log_gaussian_weight::operator()(double y) const {
    const double d = std::log(y / y0);
    return std::exp(-d * d);
}

cplx log_gaussian_weight::mellin(cplx s) const {
    return std::sqrt(pi) * std::exp(s * std::log(y0) + s * s / 4.0);
}

bool cutoff_function::tilde() const {
    return kind == cutoff_kind::Phi_tilde_u || kind == cutoff_kind::Phi_tilde_gl1 ||
           kind == cutoff_kind::Phi_tilde_gln;
}

double cutoff_function::crossing_point() const { return 1.0 - delta.real(); }

std::pair<double, double> cutoff_function::legal_strip() const {
    switch (kind) {
        case cutoff_kind::V1: return {0.0, HUGE_VAL};
        case cutoff_kind::V2:
            return {std::max(0.0, gamma.delta0 - (1.0 - delta.real())), HUGE_VAL};
        case cutoff_kind::Phi_u:
        case cutoff_kind::Phi_tilde_u: return {-HUGE_VAL, 1.0 - delta.real()};
        default: return {-HUGE_VAL, 1.0 - gamma.delta0};
    }
}

double cutoff_function::default_sigma(double y) const {
    switch (kind) {
        case cutoff_kind::V1: return y < 1 ? 0.5 : 2.0;
        case cutoff_kind::V2: return legal_strip().first + (y < 1 ? 0.3 : 2.0);
        case cutoff_kind::Phi_u:
        case cutoff_kind::Phi_tilde_u: return -1.5;
        default: return y < 1 ? legal_strip().second - 0.5 : -1.5;
    }
}

line_integrand cutoff_function::integrand() const {
    line_integrand f;
    const test_function_k kk = k;
    const int deg = kk.poly_degree();
    const cplx d = delta;
    const gamma_data g = gamma;
    switch (kind) {
        case cutoff_kind::V1:
            f.G = [kk](cplx s) { return kk(s) / s; };
            f.direction = -1;
            f.gauss_rate = kk.kappa;
            f.growth = deg - 1;
            f.poles = {0.0};
            break;
        case cutoff_kind::V2:
            f.G = [kk, d, g](cplx s) { return kk(-s) * F_ratio(d - s, g) / s; };
            f.direction = -1;
            f.gauss_rate = kk.kappa;
            f.imag_offset = std::fabs(d.imag());
            f.poles = {0.0};
            for (const cplx& mb : g.mu_bar)
                for (int j = 0; j < 4; ++j) f.poles.push_back(d - 1.0 + mb - 2.0 * j);
            break;
        case cutoff_kind::Phi_u:
        case cutoff_kind::Phi_tilde_u: {
            const bool t = tilde();
            const auto alpha = euler_alpha;
            const i64 pp = p;
            f.G = [kk, d, t, alpha, pp](cplx s) {
                cplx v = kk(1.0 - d - s) / (s - (1.0 - d));
                if (t) v *= euler_product(alpha, pp, s);
                return v;
            };
            f.direction = 1;
            f.gauss_rate = kk.kappa;
            f.growth = deg - 1;
            f.imag_offset = std::fabs(d.imag());
            f.poles = {1.0 - d};
            break;
        }
        default: {
            const bool t = tilde();
            const auto alpha = euler_alpha;
            const i64 pp = p;
            const auto w = weight;
            const gamma_data gg =
                (kind == cutoff_kind::Phi_gl1 || kind == cutoff_kind::Phi_tilde_gl1) ? gamma_data::trivial(1) : g;
            f.G = [w, gg, t, alpha, pp](cplx s) {
                cplx v = w.mellin(s) * F_ratio(s, gg);
                if (t) v *= euler_product(alpha, pp, s);
                return v;
            };
            f.direction = 1;
            f.gauss_rate = log_gaussian_weight::gauss_rate;
            for (const cplx& mb : gg.mu_bar)
                for (int j = 0; j < 4; ++j) f.poles.push_back(1.0 - mb + 2.0 * j);
            break;
        }
    }
    return f;
}

cplx cutoff_function::crossed_residue(double y) const {
    const double x = y / std::pow(static_cast<double>(p), u);
    const cplx s0 = 1.0 - delta;
    cplx r = std::exp(s0 * std::log(x));  // k(0) = 1
    if (tilde()) r *= euler_product(euler_alpha, p, s0);
    return r;
}

namespace {

double argument_scale(const cutoff_function& f) {
    if (f.kind == cutoff_kind::Phi_u || f.kind == cutoff_kind::Phi_tilde_u)
        return 1.0 / std::pow(static_cast<double>(f.p), f.u);
    return 1.0;
}

line_integrand integrand_at(const cutoff_function& f, double c) {
    line_integrand li = f.integrand();
    // Stirling growth of the gamma ratio on Re s = c
    if (f.kind == cutoff_kind::V2) {
        li.growth = f.gamma.n * (0.5 - (f.delta.real() - c)) - 1 + f.k.poly_degree();
    } else if (f.kind != cutoff_kind::V1 && f.kind != cutoff_kind::Phi_u && f.kind != cutoff_kind::Phi_tilde_u) {
        const int n = (f.kind == cutoff_kind::Phi_gl1 || f.kind == cutoff_kind::Phi_tilde_gl1) ? 1 : f.gamma.n;
        li.growth = n * (0.5 - c);
    }
    return li;
}

}  // namespace

cutoff_evaluator::cutoff_evaluator(const cutoff_function& f, double ymin, double ymax, const quadrature_options& opt)
    : f_(f) {
    require(ymin > 0 && ymax >= ymin, errc::invalid_argument, "bad cutoff range");
    const double sc = argument_scale(f);
    const bool is_phi_u = f.kind == cutoff_kind::Phi_u || f.kind == cutoff_kind::Phi_tilde_u;
    auto make_region = [&](double lo, double hi, double c) {
        const line_integrand li = integrand_at(f, c);
        const double d = li.direction;
        const double scale = std::max(std::exp(d * c * std::log(lo * sc)), std::exp(d * c * std::log(hi * sc)));
        const bool crossed = is_phi_u && c > f.crossing_point();
        regions_.push_back({hi, line_quadrature(li, c, opt, scale), crossed});
    };
    if (opt.sigma) {
        make_region(ymin, ymax, *opt.sigma);
        return;
    }
    const double split = 1.0 / sc;
    const double c_lo = f.default_sigma(0.5 * split), c_hi = f.default_sigma(2.0 * split);
    if (c_lo == c_hi || ymax < split || ymin >= split) {
        make_region(ymin, ymax, f.default_sigma(ymin < split ? ymin : ymax));
        return;
    }
    make_region(ymin, split, c_lo);
    make_region(split, ymax, c_hi);
}

kernel_value cutoff_evaluator::operator()(double y) const {
    const double sc = argument_scale(f_);
    const region* r = &regions_.back();
    for (const region& rg : regions_)
        if (y <= rg.ymax) {
            r = &rg;
            break;
        }
    kernel_value v = r->q(y * sc);
    if (r->subtract_residue) v.value -= f_.crossed_residue(y);
    return v;
}

double cutoff_majorant(const cutoff_function& f, double c) {
    quadrature_options opt;
    opt.tail_target = 1e-16;
    return line_quadrature(integrand_at(f, c), c, opt).abs_mass();
}

kernel_value eval_cutoff(const cutoff_function& f, double y, const quadrature_options& opt) {
    const kernel_value v = cutoff_evaluator(f, y, y, opt)(y);
    if (opt.T)
        require(v.tail_bound < 1e-10, errc::tail_bound_exceeds_tolerance, "truncation height too small for 1e-10");
    return v;
}

// ---- phi_infinity ----

double phi_infinity::strip_lo() const { return std::max(gamma.delta0, 1.0 - delta.real()); }
double phi_infinity::strip_hi() const { return 3.0 - delta.real(); }

kernel_value phi_infinity::value(double x, const quadrature_options& opt) const {
    cutoff_function v2;
    v2.kind = cutoff_kind::V2;
    v2.gamma = gamma;
    v2.k = k;
    v2.delta = delta;
    const kernel_value r = eval_cutoff(v2, x / fbeta, opt);
    const cplx pw = std::exp((delta - 1.0) * std::log(x));
    return {pw * r.value, std::abs(pw) * r.tail_bound};
}

cplx phi_infinity::mellin(cplx s) const {
    const cplx w = s - (1.0 - delta);
    return std::exp(w * std::log(fbeta)) * k(-w) * F_ratio(1.0 - s, gamma) / w;
}

kernel_value phi_infinity::mellin_inverse(double x, double c, const quadrature_options& opt) const {
    line_integrand li;
    const phi_infinity self = *this;
    li.G = [self](cplx s) { return self.mellin(s); };
    li.direction = -1;
    li.gauss_rate = k.kappa;
    li.growth = gamma.n * (c - 0.5) - 1 + k.poly_degree();
    li.imag_offset = std::fabs(delta.imag());
    li.poles = {1.0 - delta, 0.0};
    const double scale = std::exp(-c * std::log(x));
    return line_quadrature(li, c, opt, scale)(x);
}

// ---- decay profiles ----

namespace {

// Phi_u-type integral on the contour minimizing a majorant of |G(c)| x^c
kernel_value saddle_value(const cutoff_function& f, double y, bool right_of_pole) {
    const double x = y / std::pow(static_cast<double>(f.p), f.u);
    const double cross = f.crossing_point();
    const double lp = std::log(static_cast<double>(f.p));
    auto log_majorant = [&](double c) {
        double m = std::log(std::abs(f.k(cplx(1.0 - f.delta.real() - c, 0.0)))) - std::log(std::fabs(c - cross)) +
                   c * std::log(x);
        if (f.tilde())
            for (const cplx& a : f.euler_alpha) m += std::log1p(std::abs(a) * std::exp(-c * lp));
        return m;
    };
    double best = right_of_pole ? cross + 0.5 : cross - 0.5, best_m = log_majorant(best);
    for (double step = 0.25; step <= 200; step += 0.25) {
        const double c = right_of_pole ? cross + 0.5 + step : cross - 0.5 - step;
        const double m = log_majorant(c);
        if (m < best_m) {
            best = c;
            best_m = m;
        }
    }
    const line_integrand li = f.integrand();
    quadrature_options opt;
    opt.tail_target = 1e-13 * std::exp(best_m) / two_pi;
    return line_quadrature(li, best, opt, std::exp(best * std::log(x)))(x);
}

}  // namespace

kernel_value phi_u_right_contour(const cutoff_function& f, double y) {
    kernel_value v = saddle_value(f, y, true);
    v.value -= f.crossed_residue(y);
    return v;
}

decay_fit decay_profile(const cutoff_function& f, decay_side side, int points) {
    require(f.kind == cutoff_kind::Phi_u || f.kind == cutoff_kind::Phi_tilde_u, errc::invalid_argument,
            "decay profiles are defined for Phi_u kinds");
    require(points >= 3, errc::fit_failed, "too few sample points");
    const double pu = std::pow(static_cast<double>(f.p), f.u);
    const double lo = side == decay_side::small_y ? 1e-3 : 10.0;
    const double hi = side == decay_side::small_y ? 1e-1 : 1e3;
    decay_fit fit;
    for (int i = 0; i < points; ++i) {
        const double y = pu * lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
        // small_y: the right contour integral is Phi_u + residue with no cancellation
        const kernel_value v = saddle_value(f, y, side == decay_side::small_y);
        const double a = std::abs(v.value);
        require(std::isfinite(a) && a > 0 && a > 4 * v.tail_bound, errc::fit_failed,
                "residual is not resolved above its error bar");
        fit.y.push_back(y);
        fit.log_abs.push_back(std::log(a));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < points; ++i) {
        const double lx = std::log(fit.y[i]);
        sx += lx;
        sy += fit.log_abs[i];
        sxx += lx * lx;
        sxy += lx * fit.log_abs[i];
    }
    const double np = points;
    fit.slope = (np * sxy - sx * sy) / (np * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / np;
    const auto [mn, mx] = std::minmax_element(fit.log_abs.begin(), fit.log_abs.end());
    require(*mx - *mn > 1.0, errc::fit_failed, "insufficient dynamic range for a decay fit");
    return fit;
}

// ---- Chebyshev tables ----

chebyshev_table::chebyshev_table(const std::function<cplx(double)>& fn, double a, double b, double segment,
                                 int degree)
    : a_(a), b_(b), seg_(segment), deg_(degree) {
    require(b > a && segment > 0 && degree >= 2, errc::invalid_argument, "bad Chebyshev table");
    nseg_ = static_cast<std::size_t>(std::ceil((b - a) / segment));
    seg_ = (b - a) / static_cast<double>(nseg_);
    const int m = deg_ + 1;
    coef_.assign(nseg_ * m, 0.0);
    std::vector<cplx> vals(m);
    for (std::size_t k = 0; k < nseg_; ++k) {
        const double lo = a_ + k * seg_;
        for (int j = 0; j < m; ++j) {
            const double x = std::cos(pi * (j + 0.5) / m);
            vals[j] = fn(lo + (x + 1.0) * 0.5 * seg_);
        }
        for (int i = 0; i < m; ++i) {
            cplx c = 0.0;
            for (int j = 0; j < m; ++j) c += vals[j] * std::cos(pi * i * (j + 0.5) / m);
            coef_[k * m + i] = c * (2.0 / m);
        }
        coef_[k * m] *= 0.5;
    }
    // validation at points between nodes of a few segments
    for (std::size_t k = 0; k < nseg_; k += std::max<std::size_t>(1, nseg_ / 8)) {
        const double lo = a_ + k * seg_;
        for (double frac : {0.013, 0.37, 0.71, 0.994}) {
            const double t = lo + frac * seg_;
            err_ = std::max(err_, std::abs((*this)(t)-fn(t)));
        }
    }
}

cplx chebyshev_table::operator()(double t) const {
    require(t >= a_ - 1e-12 && t <= b_ + 1e-12, errc::invalid_argument, "Chebyshev table queried out of range");
    auto k = static_cast<std::size_t>((t - a_) / seg_);
    if (k >= nseg_) k = nseg_ - 1;
    const double x = 2.0 * (t - (a_ + k * seg_)) / seg_ - 1.0;
    const cplx* c = &coef_[k * (deg_ + 1)];
    cplx b1 = 0.0, b2 = 0.0;
    for (int i = deg_; i >= 1; --i) {
        const cplx b0 = 2.0 * x * b1 - b2 + c[i];
        b2 = b1;
        b1 = b0;
    }
    return x * b1 - b2 + c[0];
}

namespace {

chebyshev_table build_cutoff_table(const cutoff_function& f, double ymin, double ymax, const quadrature_options& opt,
                                   double& tail) {
    const double a = std::log(ymin), b = std::log(ymax);
    const cutoff_evaluator ev(f, ymin, ymax, opt);
    tail = 0;
    auto fn = [&](double t) {
        const kernel_value v = ev(std::exp(std::clamp(t, a, b)));
        tail = std::max(tail, v.tail_bound);
        return v.value;
    };
    return chebyshev_table(fn, a, b > a ? b : a + 1e-9);
}

}  // namespace

tabulated_cutoff::tabulated_cutoff(const cutoff_function& f, double ymin, double ymax, const quadrature_options& opt)
    : table_(build_cutoff_table(f, ymin, ymax, opt, err_)) {
    err_ += table_.validation_error();
}

}  // namespace hkv
