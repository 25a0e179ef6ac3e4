#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hkv/numeric.hpp"

namespace hkv::app {

enum class emit_format { json, csv };

// Everything a run depends on. Serializes to JSON and replays to the same reports.
struct run_config {
    std::vector<std::string> command;  // e.g. {"average", "recursion"}

    // arithmetic setting
    i64 p = 5;
    int beta = 2;
    int n = 2;
    i64 h = 1;
    i64 c = 0;  // 0 means every class
    int k = 2;
    std::string components = "7:2,13:2";
    std::string twist;  // "q:t" character mod p^beta for ldata, empty for none

    // analytic setting
    cplx s = {0.6, 0.3};
    cplx delta = {0.6, 0.3};
    double u = 1.5;
    std::vector<double> y;
    std::string kind = "V1";
    std::string mode = "product";
    std::string family = "hk_gln";
    std::string theorem = "VSF_i";
    std::string suite = "all";
    std::string method = "fft_dp";
    std::string form = "literal";
    std::vector<double> u_sweep;  // average recursion: extra values of u checked for invariance

    // tolerances and truncation
    double tolerance = 0;  // 0 picks the check's own default
    double tail_target = 1e-12;
    double moment_target = 1e-10;
    i64 cap = 60'000'000;
    double sigma = 0;  // 0 lets the quadrature choose
    double T = 0;
    double h_step = 0.05;

    u64 seed = 0x5EED;
    std::size_t sample_size = 1000;
    emit_format emit = emit_format::json;
    std::string out_dir;    // empty writes to stdout
    std::string cache_dir;  // HKV_CACHE_DIR when empty
    bool use_cache = true;
    bool timings = false;  // runtimes are left out of reports unless set
};

void to_json(nlohmann::json& j, const run_config& c);
void from_json(const nlohmann::json& j, run_config& c);

nlohmann::json complex_json(cplx z);
cplx parse_complex(const std::string& s);

// Stable key of the fields that change a report.
std::string config_key(const run_config& c);

}  // namespace hkv::app
