#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hkv/characters.hpp"

namespace hkv {

enum class identity_id { QO, SOGS, lcAC, gauss_twist, hK2, hKsum };

std::string_view identity_name(identity_id id);

enum class identity_form {
    literal,    // the statement as written
    corrected,  // prime-level repair (see README, "Known discrepancies")
};

struct sweep_config {
    // moduli up to this size are swept exhaustively
    i64 exhaustive_limit = 2401;
    std::size_t sample_size = 1000;
    u64 seed = 0x5EED;
    double tolerance = 1e-8;
};

struct identity_report {
    identity_id id = identity_id::QO;
    identity_form form = identity_form::literal;
    i64 p = 0;
    int beta = 0;
    int n = 0;
    bool exhaustive = true;
    std::size_t cases_checked = 0;
    std::size_t cases_declared = 0;
    double max_abs_residual = 0;  // scaled by the identity's natural magnitude
    double scale = 1;
    double tolerance = 1e-8;
    bool skipped = false;
    std::string skip_reason;
    // worst class
    i64 worst_class = 0;
    double runtime_s = 0;

    bool pass() const { return skipped || (max_abs_residual < tolerance && cases_checked == cases_declared); }
};

identity_report verify_QO(i64 p, int beta, const sweep_config& cfg = {});
identity_report verify_SOGS(i64 p, int beta, int n, identity_form form = identity_form::literal,
                            const sweep_config& cfg = {});
identity_report verify_lcAC(i64 p, int beta, identity_form form = identity_form::literal,
                            const sweep_config& cfg = {});
identity_report verify_gauss_twist(i64 p, int beta, const sweep_config& cfg = {});
identity_report verify_hK2(i64 p, int beta, int n, identity_form form = identity_form::literal,
                           const sweep_config& cfg = {});
identity_report verify_hKsum(i64 p, int beta, int n, const sweep_config& cfg = {});

// Runs the named suite ("qo", "sogs", "lcac", "gausstwist", "hk2", "hksum", "all").
std::vector<identity_report> run_identity_suite(std::string_view suite, i64 p, int beta, int n,
                                                identity_form form = identity_form::literal,
                                                const sweep_config& cfg = {});

// Deterministic selection of up to k distinct entries of v.
std::vector<i64> sample_classes(std::vector<i64> v, std::size_t k, u64 seed);

}  // namespace hkv
