#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hkv/characters.hpp"

namespace hkv {

enum class kl_method { naive, dp, fft_dp, salie };

std::string_view kl_method_name(kl_method m);
kl_method parse_kl_method(std::string_view s);

struct kloosterman_query {
    int n = 1;
    i64 c = 1;
    prime_power_modulus modulus;
    kl_method method = kl_method::fft_dp;
};

cplx kloosterman(const kloosterman_query& q);
// Kl_n(c) + Kl_n(-c)
cplx kloosterman_pm(const kloosterman_query& q);

// Kl_n(g^k) for k in [0, phi), g the group generator.
std::vector<cplx> kl_dlog_table(const unit_group& g, int n, kl_method m);

// Residue-indexed Kl_n(., q) table; zero on non-units.
class kl_table {
public:
    kl_table() = default;
    kl_table(const unit_group_ptr& g, int n, kl_method m = kl_method::fft_dp);

    int n() const { return n_; }
    i64 q() const { return q_; }
    cplx operator()(i64 c) const { return v_[static_cast<std::size_t>(mod(c, q_))]; }
    cplx pm(i64 c) const { return (*this)(c) + (*this)(-c); }
    const std::vector<cplx>& values() const { return v_; }

private:
    int n_ = 0;
    i64 q_ = 1;
    std::vector<cplx> v_;
};

// n-th power residue indicator, decided mod p.
bool power_residue_symbol(i64 c, int n, const prime_power_modulus& m);
// All w with w^n = c modulo p^beta, or modulo p^alpha when mod_alpha is set.
std::vector<i64> nth_roots(i64 c, int n, const prime_power_modulus& m, bool mod_alpha = false);

enum class lift_convention { C1, C2, C3 };
std::string_view lift_convention_name(lift_convention c);

struct salie_calibration_report {
    i64 p = 0;
    int beta = 0;
    int n = 0;
    kl_method oracle = kl_method::dp;
    double tolerance = 1e-8;
    // indexed by convention C1, C2, C3
    double max_residual[3] = {0, 0, 0};
    bool matches[3] = {false, false, false};
    std::vector<i64> classes;
    std::vector<double> residuals[3];
    std::optional<lift_convention> selected;
};

void require_salie_hypotheses(const prime_power_modulus& m, int n);
// Closed-form evaluation under an explicit convention; ignores the registry.
cplx salie_closed_form(i64 c, int n, const prime_power_modulus& m, lift_convention conv);

// Tests every convention against the oracle on all coprime classes and
// registers the first match. Never throws for a mismatch.
salie_calibration_report run_salie_calibration(i64 p, int beta, int n, kl_method oracle = kl_method::dp);
// As above, but throws no_convention_matches when no candidate agrees.
lift_convention calibrate_salie_lift(i64 p, int beta, int n, kl_method oracle = kl_method::dp);

std::optional<lift_convention> registered_lift(i64 p, int beta, int n);
void clear_lift_registry();

}  // namespace hkv
