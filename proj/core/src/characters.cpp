#include "hkv/characters.hpp"

#include <string>

#include "hkv/error.hpp"

namespace hkv {

namespace {

i64 multiplicative_order(i64 a, i64 q, i64 phi, const std::vector<i64>& phi_primes) {
    i64 ord = phi;
    for (i64 l : phi_primes) {
        while (ord % l == 0 && powmod(a, static_cast<u64>(ord / l), q) == 1) ord /= l;
    }
    return ord;
}

std::vector<i64> prime_factors(i64 n) {
    std::vector<i64> out;
    for (i64 d = 2; d * d <= n; ++d) {
        if (n % d) continue;
        out.push_back(d);
        while (n % d == 0) n /= d;
    }
    if (n > 1) out.push_back(n);
    return out;
}

}  // namespace

unit_group::unit_group(prime_power_modulus m) : m_(m) {
    const i64 q = m_.modulus;
    phi_ = m_.phi();
    // smallest primitive root mod p (beta = 1) or mod p^2, which generates every p^beta
    const i64 p = m_.p;
    const i64 base = m_.beta == 1 ? p : p * p;
    const i64 base_phi = m_.beta == 1 ? p - 1 : p * (p - 1);
    const auto fac = prime_factors(base_phi);
    for (i64 a = 2;; ++a) {
        if (a % p == 0) continue;
        if (multiplicative_order(a, base, base_phi, fac) == base_phi) {
            g_ = a;
            break;
        }
    }
    dlog_.assign(static_cast<std::size_t>(q), -1);
    pow_.resize(static_cast<std::size_t>(phi_));
    roots_.resize(static_cast<std::size_t>(phi_));
    i64 x = 1;
    for (i64 k = 0; k < phi_; ++k) {
        pow_[static_cast<std::size_t>(k)] = x;
        require(dlog_[static_cast<std::size_t>(x)] < 0, errc::not_cyclic, "generator order too small");
        dlog_[static_cast<std::size_t>(x)] = static_cast<std::int32_t>(k);
        roots_[static_cast<std::size_t>(k)] = e_frac(k, phi_);
        x = mulmod(x, g_, q);
    }
    require(x == 1, errc::not_cyclic, "generator order mismatch");
}

unit_group_ptr build_unit_group(const prime_power_modulus& m) { return std::make_shared<const unit_group>(m); }

unit_group_ptr build_unit_group(i64 p, int beta) { return build_unit_group(prime_power_modulus::make(p, beta)); }

dirichlet_character::dirichlet_character(unit_group_ptr g, i64 index) : g_(std::move(g)), t_(mod(index, g_->order())) {}

bool dirichlet_character::primitive() const {
    if (g_->modulus().beta == 1) return t_ != 0;
    return t_ % g_->modulus().p != 0;
}

std::vector<cplx> dirichlet_character::table() const {
    std::vector<cplx> v(static_cast<std::size_t>(q()));
    for (i64 x = 0; x < q(); ++x) v[static_cast<std::size_t>(x)] = (*this)(x);
    return v;
}

std::vector<dirichlet_character> list_characters(const unit_group_ptr& g, char_filter f) {
    std::vector<dirichlet_character> out;
    for (i64 t = 0; t < g->order(); ++t) {
        dirichlet_character chi(g, t);
        if (f != char_filter::all && !chi.primitive()) continue;
        if (f == char_filter::primitive_even && !chi.even()) continue;
        out.push_back(chi);
    }
    return out;
}

i64 phi_star(i64 p, int beta) {
    if (beta == 1) return p - 2;
    return euler_phi_prime_power(p, beta) - euler_phi_prime_power(p, beta - 1);
}

i64 count_primitive_even(i64 p, int beta) {
    if (beta == 1) return (p - 3) / 2;
    return phi_star(p, beta) / 2;
}

cplx gauss_sum(const dirichlet_character& chi) {
    const i64 q = chi.q();
    const auto& g = chi.group();
    csum acc;
    for (i64 k = 0; k < g.order(); ++k) {
        const i64 a = g.power(k);
        acc += g.root(chi.index() * k) * e_frac(a, q);
    }
    return acc.value();
}

}  // namespace hkv
