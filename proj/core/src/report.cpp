#include "hkv/report.hpp"

#include <cstdio>

namespace hkv {

void verification_report::finish(double tol) {
    tolerance = tol;
    residual = std::abs(lhs - rhs);
    if (!(scale > 0)) scale = 1;
    relative_residual = residual / scale;
}

std::string format_complex(cplx z) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "%.15g%+.15gi", z.real(), z.imag());
    return buf;
}

}  // namespace hkv
