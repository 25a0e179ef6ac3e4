#pragma once

#include <optional>
#include <vector>

#include "hkv/numeric.hpp"

namespace hkv {

i64 mod(i64 a, i64 m);
i64 mulmod(i64 a, i64 b, i64 m);
i64 powmod(i64 a, u64 e, i64 m);
i64 gcd(i64 a, i64 b);
// Inverse of a modulo m; throws invalid_argument when gcd(a, m) != 1.
i64 invmod(i64 a, i64 m);
bool is_prime(i64 n);
i64 ipow(i64 b, int e);
i64 euler_phi_prime_power(i64 p, int beta);
std::vector<i64> primes_up_to(i64 n);

struct prime_power_modulus {
    i64 p = 0;
    int beta = 0;
    i64 modulus = 0;
    std::optional<int> alpha;

    static prime_power_modulus make(i64 p, int beta);
    i64 phi() const { return euler_phi_prime_power(p, beta); }
    bool operator==(const prime_power_modulus&) const = default;
};

}  // namespace hkv
