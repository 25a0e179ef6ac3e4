#pragma once

#include "hkv/numeric.hpp"

namespace hkv {

// Principal branch of log Gamma. Throws pole_at_non_positive_integer.
cplx log_gamma(cplx z);
// Same function through the reflection formula when Re z < 1/2; used as an
// independent path in tests.
cplx log_gamma_reflect(cplx z);

bool is_non_positive_integer(cplx z, double tol = 1e-13);

// 1 / Gamma(z), entire.
cplx rgamma(cplx z);

}  // namespace hkv
