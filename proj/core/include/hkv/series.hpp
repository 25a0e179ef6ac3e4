#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "hkv/identities.hpp"
#include "hkv/ldata.hpp"
#include "hkv/report.hpp"

namespace hkv {

// D: additive twist e(+-mh/p^beta); hk_gln: Kl_n(+-mh) against the degree-n datum;
// hk_gl1: Kl_k(+-mh) against one character xi; hk_gl1_base: the k = 0 progression series.
enum class series_family { additive_D, hk_gln, hk_gl1, hk_gl1_base };
std::string_view series_family_name(series_family f);
series_family parse_series_family(std::string_view s);

enum class series_side { left, right };
std::string_view series_side_name(series_side s);
series_side parse_series_side(std::string_view s);

struct series_params {
    series_params(series_family family, isobaric_datum datum, i64 p, int beta, i64 h, int kl_order = 0);

    series_family family;
    isobaric_datum datum;  // one component for the GL1 families
    i64 p;
    int beta;
    i64 h;
    int kl_order;  // k in Kl_k on the left
    unit_group_ptr group;
    // hk_gl1_base only: use the primitive-even kernel K_0 instead of the defining progressions
    bool corrected_base = false;

    i64 q() const { return group->q(); }
    int n() const { return datum.n(); }
    // AFI(i), DAFI(A)(ii), ...
    std::string identity_label() const;
};

// Weight on residues mod p^beta (zero on non-units) of the left-hand series.
std::vector<cplx> family_weight(const series_params& sp);

// (2 / phi(q)) sum over primitive even chi of chi(x) tau(conj chi)^k, as a residue table.
std::vector<cplx> primitive_even_kernel(const unit_group_ptr& g, int k);
// Kl_k(x) + Kl_k(-x) as a residue table; k = 0 gives the indicator of x = +-1.
std::vector<cplx> kl_pm_residues(const unit_group_ptr& g, int k);
// indicator of m = +-c modulo p^level on units mod p^beta
std::vector<cplx> pm_indicator(const unit_group_ptr& g, i64 c, int level);

// One summand of a dual expansion:
//   coeff * Y^{-s} * F(s) * [eps_p(s)] * [extra(s)] * R(s),
// R(s) = sum_{(m,p)=1} conj a(m) m^{s-1} weight(m), or over all m >= 1 when all_m.
struct dual_term {
    std::string label;
    cplx coeff = 1.0;
    double Y = 1;
    bool all_m = false;
    bool euler = false;  // eps_p(s) = prod (1 - alpha_j p^{-s}), alpha the Satake data of the datum
    std::vector<cplx> weight;
    std::function<cplx(cplx)> extra;
};

// Right-hand side of the family's functional identity.
std::vector<dual_term> functional_identity_terms(const series_params& sp, identity_form form);

enum class left_method { automatic, raw, decomposition };

struct series_options {
    left_method method = left_method::automatic;
    i64 M = 0;                // raw truncation; 0 picks one from raw_target
    double raw_target = 1e-10;
    i64 raw_cap = 20'000'000;
    identity_form form = identity_form::corrected;
};

struct series_value {
    cplx value;
    double bound = 0;
    i64 terms = 0;
    std::string method;
    std::vector<report_term> parts;
};

// Left: raw series (Re s > 1) or the finite character decomposition (any s).
// Right: prefactor times the dual progression series (Re s < 0); M > 0 truncates it.
series_value eval_series(const series_params& sp, cplx s, series_side side, const series_options& opt = {});

// Sum over characters mod p^beta of hat w(chi) L^{(p)}(s, pi (x) chi).
series_value left_by_decomposition(const series_params& sp, cplx s);
series_value left_raw(const series_params& sp, cplx s, i64 M, double target, i64 cap);
// continuation = true evaluates the progression form at any s (the Hurwitz continuation).
series_value right_series(const series_params& sp, const std::vector<dual_term>& terms, cplx s, i64 M = 0,
                          bool continuation = false);

verification_report verify_functional_identity(const series_params& sp, cplx s,
                                               identity_form form = identity_form::literal,
                                               double tolerance = 1e-6);

}  // namespace hkv
