#include "hkv/modular.hpp"

#include <limits>
#include <string>

#include "hkv/error.hpp"

namespace hkv {

std::string_view errc_name(errc c) noexcept {
    switch (c) {
        case errc::not_cyclic: return "NotCyclic";
        case errc::overflow: return "Overflow";
        case errc::invalid_argument: return "InvalidArgument";
        case errc::salie_unavailable: return "SalieUnavailable";
        case errc::lift_convention_uncalibrated: return "LiftConventionUncalibrated";
        case errc::no_convention_matches: return "NoConventionMatches";
        case errc::pole_at_non_positive_integer: return "PoleAtNonPositiveInteger";
        case errc::pole_hit: return "PoleHit";
        case errc::tail_bound_exceeds_tolerance: return "TailBoundExceedsTolerance";
        case errc::fit_failed: return "FitFailed";
        case errc::trivial_character: return "TrivialCharacter";
        case errc::mode_unavailable: return "ModeUnavailable";
        case errc::side_illegal_at_s: return "SideIllegalAtS";
        case errc::identity_violated: return "IdentityViolated";
        case errc::config_invalid: return "ConfigInvalid";
    }
    return "Unknown";
}

i64 mod(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

i64 mulmod(i64 a, i64 b, i64 m) {
    return static_cast<i64>(static_cast<__int128>(mod(a, m)) * mod(b, m) % m);
}

i64 powmod(i64 a, u64 e, i64 m) {
    i64 r = 1 % m, b = mod(a, m);
    while (e) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

i64 gcd(i64 a, i64 b) {
    a = a < 0 ? -a : a;
    b = b < 0 ? -b : b;
    while (b) {
        const i64 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

i64 invmod(i64 a, i64 m) {
    i64 r0 = m, r1 = mod(a, m), s0 = 0, s1 = 1;
    while (r1) {
        const i64 q = r0 / r1;
        i64 t = r0 - q * r1;
        r0 = r1;
        r1 = t;
        t = s0 - q * s1;
        s0 = s1;
        s1 = t;
    }
    require(r0 == 1, errc::invalid_argument,
            std::to_string(a) + " is not invertible mod " + std::to_string(m));
    return mod(s0, m);
}

bool is_prime(i64 n) {
    if (n < 2) return false;
    for (i64 d : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % d == 0) return n == d;
    }
    i64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (i64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        i64 x = powmod(a, static_cast<u64>(d), n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

i64 ipow(i64 b, int e) {
    i64 r = 1;
    for (int i = 0; i < e; ++i) {
        require(r <= std::numeric_limits<i64>::max() / (b < 0 ? -b : b), errc::overflow,
                "integer power overflow");
        r *= b;
    }
    return r;
}

i64 euler_phi_prime_power(i64 p, int beta) {
    if (beta == 0) return 1;
    return ipow(p, beta - 1) * (p - 1);
}

std::vector<i64> primes_up_to(i64 n) {
    std::vector<i64> out;
    if (n < 2) return out;
    std::vector<bool> comp(static_cast<std::size_t>(n + 1), false);
    for (i64 i = 2; i <= n; ++i) {
        if (comp[static_cast<std::size_t>(i)]) continue;
        out.push_back(i);
        for (i64 j = i * i; j <= n; j += i) comp[static_cast<std::size_t>(j)] = true;
    }
    return out;
}

prime_power_modulus prime_power_modulus::make(i64 p, int beta) {
    require(beta >= 1, errc::invalid_argument, "beta must be >= 1");
    require(p != 2, errc::not_cyclic, "p = 2 is not supported");
    require(p > 2 && is_prime(p), errc::invalid_argument, std::to_string(p) + " is not an odd prime");
    i64 q = 1;
    for (int i = 0; i < beta; ++i) {
        require(q <= std::numeric_limits<std::int32_t>::max() / p, errc::overflow,
                "p^beta exceeds the 32-bit residue width");
        q *= p;
    }
    prime_power_modulus m;
    m.p = p;
    m.beta = beta;
    m.modulus = q;
    if (beta % 2 == 0) m.alpha = beta / 2;
    return m;
}

}  // namespace hkv
