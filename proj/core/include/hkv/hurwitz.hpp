#pragma once

#include <vector>

#include "hkv/numeric.hpp"

namespace hkv {

struct bounded_value {
    cplx value;
    double bound = 0;  // absolute error bar
};

// zeta(s, a) for 0 < a, s != 1, by Euler-Maclaurin with a rigorous remainder bound.
bounded_value hurwitz_zeta(cplx s, double a);

// Z[a] = sum_{m = a mod Q, m >= 1} m^{-s} = Q^{-s} zeta(s, a/Q), for residues a in [0, Q).
class hurwitz_table {
public:
    hurwitz_table(i64 Q, cplx s);
    i64 modulus() const { return Q_; }
    cplx s() const { return s_; }
    const cplx& operator[](i64 a) const { return z_[static_cast<std::size_t>(a)]; }
    double bound(i64 a) const { return b_[static_cast<std::size_t>(a)]; }
    const std::vector<cplx>& values() const { return z_; }

private:
    i64 Q_;
    cplx s_;
    std::vector<cplx> z_;
    std::vector<double> b_;
};

// sum_{m >= 1} c(m) m^{-s} for a Q-periodic c given by c[0..Q).
bounded_value periodic_L(const std::vector<cplx>& c, cplx s);
bounded_value periodic_L(const std::vector<cplx>& c, const hurwitz_table& z);

}  // namespace hkv
