#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "hkv/characters.hpp"
#include "hkv/hurwitz.hpp"
#include "hkv/kernels.hpp"

namespace hkv {

// Isobaric sum of primitive even Dirichlet characters xi_1, ..., xi_n:
// a(m) = sum_{m_1...m_n = m} prod xi_i(m_i).
class isobaric_datum {
public:
    explicit isobaric_datum(std::vector<dirichlet_character> components, bool allow_trivial = false);

    int n() const { return static_cast<int>(xi_.size()); }
    i64 N() const { return N_; }
    cplx W() const { return W_; }
    const gamma_data& gamma() const { return gamma_; }
    const std::vector<dirichlet_character>& components() const { return xi_; }
    cplx omega(i64 m) const;
    isobaric_datum dual() const;

    cplx coeff(i64 m) const;
    // a[0..M] with a[0] = 0
    std::vector<cplx> coeff_range(i64 M) const;
    // xi_i(p)
    std::vector<cplx> satake(i64 p) const;
    // prod (1 - xi_i(p) p^{-s}), the inverse of the Euler factor
    cplx euler_inverse(i64 p, cplx s) const;
    cplx euler_inverse_dual(i64 p, cplx s) const;

private:
    std::vector<dirichlet_character> xi_;
    i64 N_ = 1;
    cplx W_ = 1.0;
    gamma_data gamma_;
};

// Parses "q1:t1,q2:t2" into primitive even components.
isobaric_datum parse_components(std::string_view text);

// Complete homogeneous symmetric polynomials h_0..h_K of x.
std::vector<cplx> complete_homogeneous(const std::vector<cplx>& x, int K);

// C(k + n - 1, n - 1)
double divisor_power_count(int n, int k);

// Segmented multiplicative sieve for a(m) and d_n(m).
class coefficient_sieve {
public:
    using block_fn = std::function<void(i64 m0, const cplx* a, const double* dn, std::size_t len)>;

    coefficient_sieve(const isobaric_datum& d, i64 M, std::size_t block = 1 << 18);
    // Visits [1, M] in increasing blocks; a[i] = a(m0 + i).
    void run(const block_fn& fn) const;

private:
    std::vector<std::vector<cplx>> xi_tables_;
    std::vector<i64> xi_mod_;
    int n_;
    i64 M_;
    std::size_t block_;
    std::vector<i64> primes_;
    std::vector<std::vector<cplx>> hk_;
};

// sum_{m > M} d_n(m) m^{-alpha} from the partial sum up to M (alpha > 1).
double dn_tail(int n, double alpha, double partial);
// log of a Rankin bound for sum_{m > M} d_n(m) m^{-alpha}
double dn_tail_rankin_log(int n, double alpha, double M);

// L(s, xi) for a primitive nontrivial character.
bounded_value dirichlet_L(const dirichlet_character& xi, cplx s);
// L(s, xi chi) with xi, chi on coprime moduli.
bounded_value dirichlet_L(const dirichlet_character& xi, const dirichlet_character& chi, cplx s);

// P[b] = sum_{m = b mod q} c(m) m^{-w}, c = psi_1 * ... * psi_k, for units b mod q
// (zero elsewhere); every psi_i has modulus coprime to q.
struct progression_table {
    i64 q = 1;
    std::vector<cplx> value;
    double bound = 0;  // uniform error bar per entry
};
progression_table progression_series(const std::vector<dirichlet_character>& psi, const unit_group_ptr& g, cplx w);

// L(s, pi (x) chi_j) for every character index j of g, from one progression table.
struct twisted_family {
    std::vector<cplx> value;  // by character index
    double bound = 0;
};
twisted_family twisted_L_all(const isobaric_datum& d, const unit_group_ptr& g, cplx s);

enum class l_mode { series, product, afe };
std::string_view l_mode_name(l_mode m);
l_mode parse_l_mode(std::string_view s);

struct l_options {
    double series_target = 1e-11;
    i64 series_cap = 20'000'000;
    double afe_Z = 0;  // 0 selects sqrt of the analytic conductor
    double afe_target = 1e-9;
};

struct l_value {
    cplx value;
    double bound = 0;
    i64 terms = 0;
};

l_value twisted_L(const isobaric_datum& d, const dirichlet_character& chi, cplx s, l_mode mode,
                  const l_options& opt = {});

}  // namespace hkv
