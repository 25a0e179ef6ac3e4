#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hkv/series.hpp"

namespace hkv {

enum class voronoi_theorem { VSF_i, VSF_ii, VSF2_i, VSF2_ii, DAFI_B_i, DAFI_B_ii, D_B_i, D_B_ii, VSFK };
std::string_view voronoi_theorem_name(voronoi_theorem t);
voronoi_theorem parse_voronoi_theorem(std::string_view s);

enum class weight_kind { log_gaussian, phi_infinity };
weight_kind voronoi_weight(voronoi_theorem t);

struct voronoi_params {
    voronoi_params(voronoi_theorem theorem, isobaric_datum datum, i64 p, int beta, i64 h, int kl_order = 2);

    voronoi_theorem theorem;
    isobaric_datum datum;  // pi; one character xi for D(B)
    i64 p;
    int beta;
    i64 h;
    int kl_order;  // Kl_n on the left of D(B)
    identity_form form = identity_form::corrected;
    log_gaussian_weight weight;
    cplx delta = {0.6, 0.3};
    double u = 1.5;
    test_function_k k;
    // absolute truncation target per unit of the largest weight
    double tail_target = 1e-12;
    i64 cap = 60'000'000;
};

// The Dirichlet series whose Mellin integral produces the left side.
series_params voronoi_series(const voronoi_params& vp);
// Dual expansion used on the right (never carries an extra factor).
std::vector<dual_term> voronoi_terms(const voronoi_params& vp);

struct bounded_complex {
    cplx value;
    double bound = 0;
};

struct weighted_sum {
    cplx value;
    double bound = 0;  // truncation plus kernel tabulation
    double mass = 0;   // sum of absolute values of the summands
    i64 terms = 0;
};

// sum_{(m,p)=1} c(m) w(m) phi(m), c the coefficients of sp.datum
weighted_sum voronoi_lhs(const voronoi_params& vp);

// residue of the phi_infinity theorems from L(delta, pi (x) chi) directly
bounded_complex voronoi_residue_oracle(const voronoi_params& vp);

struct voronoi_rhs {
    cplx residue;  // phi_infinity weights only
    double residue_bound = 0;
    cplx residue_oracle;  // the same block from L(delta, pi (x) chi)
    double residue_oracle_bound = 0;
    std::vector<report_term> duals;
    cplx value;
    double bound = 0;
};
// scale sets the absolute truncation target of the dual sums (tail_target * scale)
voronoi_rhs voronoi_right(const voronoi_params& vp, double scale = 1.0);

verification_report voronoi_check(const voronoi_params& vp, double tolerance = 1e-6);

// ---- moments ----

// theta for character-built data; 7/64 is the best bound known for GL2 cusp forms
inline constexpr double ramanujan_theta = 0.0;
inline constexpr double ramanujan_theta_gl2_record = 7.0 / 64.0;

struct moment_query {
    moment_query(isobaric_datum datum, i64 p, int beta, cplx delta, double u);

    isobaric_datum datum;
    i64 p;
    int beta;
    cplx delta;
    double u;
    test_function_k k;
    unit_group_ptr group;

    double Z() const;
    i64 q() const { return group->q(); }
    int n() const { return datum.n(); }
    // (p / phi(p)) W omega(p^beta) (N p^{beta n})^{1/2 - delta} p^{-beta n / 2}
    cplx x2_prefactor() const;
    // N p^{beta n - u}
    double f_beta() const;
    // absolute accuracy goal of the truncated sums
    double target = 1e-10;
};

// (2 / phi*(p^beta)) sum over primitive even chi of L(delta, pi (x) chi)
bounded_complex moment_direct(const moment_query& q);

struct moment_split {
    bounded_complex X1;
    bounded_complex X2;
    cplx m1_term;        // V1(1/Z)
    double x2_envelope;  // p^{-beta/2} (N p^{beta n})^{3/2} N^{Re delta} Z^{-(1 + Re delta)}
    i64 x1_terms = 0;
    i64 x2_terms = 0;
};
moment_split moment_decomposition(const moment_query& q);

struct twisted_sum_decomposition {
    // L-average blocks after the x-sum: y = 0, y = 1..beta-2 combined, y = beta-1
    cplx residue_block[3];
    cplx S1_block;
    std::vector<cplx> S2_blocks;  // y = 1..beta-2, residue plus frak_S_2 part
    cplx S2_boundary;             // y = beta-1
    // x-averaged p^{u(1-delta)} frak_S_{i,x} contributions
    cplx frak_S[3];
    cplx total;       // root-phase form
    cplx total_vsf4;  // Kl_n(x) / p^{beta(n-1)/2} form
    double bound = 0;
    i64 classes = 0;
    std::string convention;
};
twisted_sum_decomposition twisted_sum_voronoi(const moment_query& q);

// -p^{u(1-delta)} times the Phi_u progression sums
bounded_complex phi_u_progression(const moment_query& q);

struct recursion_routes {
    bounded_complex direct;
    bounded_complex decomposition;  // X1 + X2
    bounded_complex vsfts;          // Phi_u progressions + X2 from the twisted-sum formula
    bounded_complex vsfk;           // X1 + prefactor * (residue + dual) of the hyper-Kloosterman route
    bool vsfts_available = false;
    cplx twisted_bound_remainder;  // X_beta - 1 - X2
    // p^{u(1 - Re delta + C)} p^{beta(theta - (1 - Re delta) - C)} at C = 1
    double twisted_bound_order = 0;
};
recursion_routes moment_routes(const moment_query& q);
verification_report moment_recursion(const moment_query& q, double tolerance = 1e-5);

}  // namespace hkv
