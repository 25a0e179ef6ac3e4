#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "hkv/numeric.hpp"

namespace hkv {

struct gamma_data {
    int n = 1;
    std::vector<cplx> mu;
    std::vector<cplx> mu_bar;
    double delta0 = 0;  // max Re mu_bar

    // all mu_j = 0
    static gamma_data trivial(int n);
    // mu_bar defaults to the complex conjugates; checks the sanity bound on Re mu
    static gamma_data make(std::vector<cplx> mu, std::optional<std::vector<cplx>> mu_bar = std::nullopt);
    gamma_data dual() const;
    bool all_zero() const;
};

// pi^{-n/2+ns} prod Gamma((1-s-mubar_j)/2) / prod Gamma((s-mu_j)/2). Throws pole_hit.
cplx F_ratio(cplx s, const gamma_data& g);
// the same with mu and mu_bar exchanged
cplx Fbar_ratio(cplx s, const gamma_data& g);
// F_ratio through the reflection-formula log-gamma path
cplx F_ratio_reflect(cplx s, const gamma_data& g);
// leading Stirling magnitude of |F(sigma+it)|
double F_stirling_magnitude(cplx s, const gamma_data& g);

enum class k_kind { gaussian_surrogate, vanishing_at_mu };

struct test_function_k {
    k_kind kind = k_kind::gaussian_surrogate;
    double kappa = 1.0 / 16.0;
    std::vector<cplx> zeros;  // used by vanishing_at_mu; zero entries are ignored

    static test_function_k for_gamma(const gamma_data& g, double kappa = 1.0 / 16.0);
    cplx operator()(cplx s) const;
    int poly_degree() const;
};

// Integrand G(s) of (1/2 pi i) int_{(c)} G(s) y^{dir s} ds.
struct line_integrand {
    std::function<cplx(cplx)> G;
    int direction = 1;
    double gauss_rate = 0;   // |G(c+it)| ~ exp(-gauss_rate t^2) |t|^growth
    double growth = 0;
    double imag_offset = 0;  // centre of the Gaussian is within this of t = 0
    std::vector<cplx> poles;
};

struct quadrature_options {
    std::optional<double> sigma;  // real part of the contour
    std::optional<double> T;
    double h = 0.05;
    double tail_target = 1e-12;
};

struct kernel_value {
    cplx value;
    double tail_bound = 0;
};

class line_quadrature {
public:
    // scale: largest y^{dir c} the caller will use; auto T makes the tail < target at that scale
    line_quadrature(line_integrand f, double c, const quadrature_options& opt, double scale = 1.0);

    kernel_value operator()(double y) const;
    double tail_bound(double y) const;
    double abscissa() const { return c_; }
    double T() const { return T_; }
    std::size_t nodes() const { return w_.size(); }
    // (1/2 pi) int |G(c+it)| dt, so |I(y)| <= abs_mass() * y^{dir c}
    double abs_mass() const;

private:
    double tail_coefficient(double T) const;

    line_integrand f_;
    double c_;
    double h_;
    double T_ = 0;
    std::vector<cplx> w_;
    double tail_ = 0;
};

enum class cutoff_kind { V1, V2, Phi_u, Phi_tilde_u, Phi_gl1, Phi_tilde_gl1, Phi_gln, Phi_tilde_gln };

std::string_view cutoff_kind_name(cutoff_kind k);
cutoff_kind parse_cutoff_kind(std::string_view s);

// phi(y) = exp(-(log y - log y0)^2), phi*(s) = sqrt(pi) y0^s exp(s^2/4)
struct log_gaussian_weight {
    double y0 = 50;

    double operator()(double y) const;
    cplx mellin(cplx s) const;
    static constexpr double gauss_rate = 0.25;
};

struct cutoff_function {
    cutoff_kind kind = cutoff_kind::V1;
    gamma_data gamma = gamma_data::trivial(1);
    test_function_k k;
    cplx delta = {0.6, 0.3};
    double u = 1.5;
    i64 p = 5;
    // Satake data at p; the tilde kinds multiply by prod (1 - alpha_j p^{-s})
    std::vector<cplx> euler_alpha;
    log_gaussian_weight weight;

    bool tilde() const;
    line_integrand integrand() const;
    // open interval of legal contours that need no residue bookkeeping
    std::pair<double, double> legal_strip() const;
    double default_sigma(double y) const;
    // residue crossed when the contour is moved right of 1 - delta (Phi_u kinds)
    cplx crossed_residue(double y) const;
    double crossing_point() const;
};

// Evaluates a cutoff on a y range with one or two contours.
class cutoff_evaluator {
public:
    cutoff_evaluator(const cutoff_function& f, double ymin, double ymax, const quadrature_options& opt = {});
    kernel_value operator()(double y) const;

private:
    struct region {
        double ymax;
        line_quadrature q;
        bool subtract_residue;
    };
    cutoff_function f_;
    std::vector<region> regions_;
};

// Certified truncation error must stay below 1e-10 when T is given.
kernel_value eval_cutoff(const cutoff_function& f, double y, const quadrature_options& opt = {});

// M with |f(y)| <= M x^{dir c}, x the integrand argument (y, or y/p^u for Phi_u kinds)
double cutoff_majorant(const cutoff_function& f, double c);

// phi_inf(x) = x^{delta-1} V2(x / fbeta)
struct phi_infinity {
    gamma_data gamma = gamma_data::trivial(1);
    test_function_k k;
    cplx delta = {0.6, 0.3};
    double fbeta = 1;

    double strip_lo() const;
    double strip_hi() const;
    kernel_value value(double x, const quadrature_options& opt = {}) const;
    cplx mellin(cplx s) const;
    // inverse Mellin transform of mellin() along Re s = c
    kernel_value mellin_inverse(double x, double c, const quadrature_options& opt = {}) const;
};

enum class decay_side { small_y, large_y };

struct decay_fit {
    double slope = 0;
    double intercept = 0;
    std::vector<double> y;
    std::vector<double> log_abs;
};

// Least-squares slope of log|residual| against log y; small_y uses
// Phi + (leading power), large_y uses Phi itself. Throws fit_failed.
decay_fit decay_profile(const cutoff_function& f, decay_side side, int points = 13);

// Phi_u at y through the contour right of the pole with residue removed.
kernel_value phi_u_right_contour(const cutoff_function& f, double y);

// Piecewise Chebyshev interpolant of a complex function of t on [a, b].
class chebyshev_table {
public:
    chebyshev_table(const std::function<cplx(double)>& fn, double a, double b, double segment = 0.5,
                    int degree = 24);
    cplx operator()(double t) const;
    double a() const { return a_; }
    double b() const { return b_; }
    // max deviation at segment midpoints between nodes
    double validation_error() const { return err_; }

private:
    double a_, b_, seg_;
    int deg_;
    std::size_t nseg_;
    std::vector<cplx> coef_;
    double err_ = 0;
};

// Cutoff tabulated in t = log y.
class tabulated_cutoff {
public:
    tabulated_cutoff(const cutoff_function& f, double ymin, double ymax, const quadrature_options& opt = {});
    cplx operator()(double y) const { return table_(std::log(y)); }
    double error_bound() const { return err_; }

private:
    chebyshev_table table_;
    double err_;
};

}  // namespace hkv
