#pragma once

#include <cstddef>
#include <vector>

#include "hkv/numeric.hpp"

namespace hkv {

// Discrete Fourier transform of arbitrary length: radix-2 when the length is a
// power of two, Bluestein chirp-z otherwise.
class dft_plan {
public:
    explicit dft_plan(std::size_t n);

    std::size_t size() const { return n_; }
    // X[k] = sum_j x[j] e(-jk/n)
    void forward(std::vector<cplx>& x) const;
    // x[j] = (1/n) sum_k X[k] e(jk/n)
    void inverse(std::vector<cplx>& x) const;

private:
    void radix2(std::vector<cplx>& a, bool inv) const;
    void bluestein(std::vector<cplx>& x, bool inv) const;

    std::size_t n_;
    std::size_t m_;  // radix-2 working length
    std::vector<cplx> tw_;
    std::vector<cplx> chirp_;
    std::vector<cplx> chirp_hat_;
};

// c[k] = sum_{i+j = k mod n} a[i] b[j]
std::vector<cplx> cyclic_convolution(const std::vector<cplx>& a, const std::vector<cplx>& b);

}  // namespace hkv
