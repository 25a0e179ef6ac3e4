#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hkv/identities.hpp"
#include "hkv/report.hpp"
#include "run_config.hpp"

namespace hkv::app {

inline constexpr int schema_version = 1;

// One persisted result: a JSON body plus its per-term table.
struct report_doc {
    std::string name;
    bool pass = true;
    nlohmann::json body;
    std::vector<std::string> csv_header;
    std::vector<std::vector<std::string>> csv_rows;
};

struct run_result {
    int exit_code = 0;
    std::vector<report_doc> reports;
    std::string output;  // what goes to stdout
    std::vector<std::string> written;
    std::vector<std::string> failing;  // paths (or names) of failing reports
    bool from_cache = false;
};

nlohmann::json to_json(const verification_report& r, bool timings);
nlohmann::json to_json(const identity_report& r, bool timings);

report_doc make_doc(std::string name, const verification_report& r, bool timings);
report_doc make_doc(const identity_report& r, bool timings);

// The full document for the selected format.
std::string render(const run_config& cfg, const std::vector<report_doc>& docs);

// Executes cfg; throws hkv::error for invalid configurations.
run_result run(const run_config& cfg);

}  // namespace hkv::app
