#include "hkv/fft.hpp"

#include "hkv/error.hpp"
#include "hkv/modular.hpp"

namespace hkv {

namespace {

bool is_pow2(std::size_t n) { return n && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

}  // namespace

dft_plan::dft_plan(std::size_t n) : n_(n) {
    require(n >= 1, errc::invalid_argument, "empty transform");
    m_ = is_pow2(n) ? n : next_pow2(2 * n - 1);
    tw_.resize(m_ / 2 + 1);
    for (std::size_t k = 0; k < tw_.size(); ++k) tw_[k] = e_frac(-static_cast<i64>(k), static_cast<i64>(m_));
    if (is_pow2(n)) return;
    // chirp w_k = e(-k^2 / 2n), k^2 reduced mod 2n exactly
    const i64 two_n = 2 * static_cast<i64>(n);
    chirp_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const i64 kk = mulmod(static_cast<i64>(k), static_cast<i64>(k), two_n);
        chirp_[k] = e_frac(-kk, two_n);
    }
    chirp_hat_.assign(m_, 0.0);
    chirp_hat_[0] = std::conj(chirp_[0]);
    for (std::size_t k = 1; k < n; ++k) {
        chirp_hat_[k] = std::conj(chirp_[k]);
        chirp_hat_[m_ - k] = std::conj(chirp_[k]);
    }
    radix2(chirp_hat_, false);
}

void dft_plan::radix2(std::vector<cplx>& a, bool inv) const {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = m_ / len;
        const std::size_t half = len / 2;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < half; ++k) {
                cplx w = tw_[k * stride];
                if (inv) w = std::conj(w);
                const cplx u = a[i + k];
                const cplx v = a[i + k + half] * w;
                a[i + k] = u + v;
                a[i + k + half] = u - v;
            }
        }
    }
}

void dft_plan::bluestein(std::vector<cplx>& x, bool inv) const {
    // sum_j x_j e(-jk/n) = w_k sum_j (x_j w_j) conj(w_{k-j})
    std::vector<cplx> a(m_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
        const cplx w = inv ? std::conj(chirp_[j]) : chirp_[j];
        a[j] = x[j] * w;
    }
    radix2(a, false);
    for (std::size_t k = 0; k < m_; ++k) {
        // transform of conj(chirp) for forward; transform of chirp for inverse
        cplx h = chirp_hat_[k];
        if (inv) h = std::conj(chirp_hat_[(m_ - k) % m_]);
        a[k] *= h;
    }
    radix2(a, true);
    const double scale = 1.0 / static_cast<double>(m_);
    for (std::size_t k = 0; k < n_; ++k) {
        const cplx w = inv ? std::conj(chirp_[k]) : chirp_[k];
        x[k] = a[k] * scale * w;
    }
}

void dft_plan::forward(std::vector<cplx>& x) const {
    require(x.size() == n_, errc::invalid_argument, "transform length mismatch");
    if (is_pow2(n_))
        radix2(x, false);
    else
        bluestein(x, false);
}

void dft_plan::inverse(std::vector<cplx>& x) const {
    require(x.size() == n_, errc::invalid_argument, "transform length mismatch");
    if (is_pow2(n_))
        radix2(x, true);
    else
        bluestein(x, true);
    const double scale = 1.0 / static_cast<double>(n_);
    for (auto& v : x) v *= scale;
}

std::vector<cplx> cyclic_convolution(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    require(a.size() == b.size(), errc::invalid_argument, "convolution length mismatch");
    dft_plan plan(a.size());
    auto fa = a, fb = b;
    plan.forward(fa);
    plan.forward(fb);
    for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
    plan.inverse(fa);
    return fa;
}

}  // namespace hkv
