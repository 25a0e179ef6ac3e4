#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hkv/numeric.hpp"

namespace hkv {

struct report_term {
    std::string label;
    cplx value;
    double bound = 0;
};

// Two-sided numerical check.
struct verification_report {
    std::string check;
    std::string form = "literal";
    std::vector<std::pair<std::string, std::string>> params;
    cplx lhs;
    cplx rhs;
    double lhs_bound = 0;
    double rhs_bound = 0;
    double residual = 0;  // |lhs - rhs|
    double scale = 1;     // normalization of the relative residual
    double relative_residual = 0;
    double tolerance = 1e-6;
    std::vector<report_term> terms;
    std::vector<std::string> notes;
    double runtime_s = 0;

    bool pass() const { return relative_residual < tolerance; }
    // the certified bars dominate the observed residual
    bool bars_dominate() const { return residual <= lhs_bound + rhs_bound + 1e-15 * scale; }
    void finish(double tol);
    void param(std::string key, std::string value) { params.emplace_back(std::move(key), std::move(value)); }
};

std::string format_complex(cplx z);

}  // namespace hkv
