#pragma once

#include <memory>
#include <vector>

#include "hkv/modular.hpp"

namespace hkv {

class unit_group {
public:
    explicit unit_group(prime_power_modulus m);

    const prime_power_modulus& modulus() const { return m_; }
    i64 q() const { return m_.modulus; }
    i64 generator() const { return g_; }
    i64 order() const { return phi_; }
    // -1 on non-units.
    std::int32_t dlog(i64 x) const { return dlog_[static_cast<std::size_t>(mod(x, m_.modulus))]; }
    i64 power(i64 k) const { return pow_[static_cast<std::size_t>(mod(k, phi_))]; }
    // e(k / phi)
    cplx root(i64 k) const { return roots_[static_cast<std::size_t>(mod(k, phi_))]; }
    const std::vector<std::int32_t>& dlog_table() const { return dlog_; }

private:
    prime_power_modulus m_;
    i64 g_ = 0;
    i64 phi_ = 0;
    std::vector<std::int32_t> dlog_;
    std::vector<i64> pow_;
    std::vector<cplx> roots_;
};

using unit_group_ptr = std::shared_ptr<const unit_group>;

unit_group_ptr build_unit_group(const prime_power_modulus& m);
unit_group_ptr build_unit_group(i64 p, int beta);

class dirichlet_character {
public:
    dirichlet_character(unit_group_ptr g, i64 index);

    const unit_group& group() const { return *g_; }
    const unit_group_ptr& group_ptr() const { return g_; }
    i64 index() const { return t_; }
    i64 q() const { return g_->q(); }
    bool even() const { return t_ % 2 == 0; }
    bool primitive() const;
    bool trivial() const { return t_ == 0; }

    cplx operator()(i64 x) const {
        const std::int32_t k = g_->dlog(x);
        if (k < 0) return 0.0;
        return g_->root(t_ * k);
    }
    dirichlet_character conj() const { return {g_, g_->order() - t_}; }
    dirichlet_character operator*(const dirichlet_character& o) const { return {g_, t_ + o.t_}; }
    // values[x] for x in [0, q)
    std::vector<cplx> table() const;

private:
    unit_group_ptr g_;
    i64 t_;
};

enum class char_filter { all, primitive, primitive_even };

std::vector<dirichlet_character> list_characters(const unit_group_ptr& g, char_filter f);

i64 phi_star(i64 p, int beta);
i64 count_primitive_even(i64 p, int beta);

cplx gauss_sum(const dirichlet_character& chi);

}  // namespace hkv
