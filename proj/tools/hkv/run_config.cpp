#include "run_config.hpp"

#include <cstdio>
#include <regex>

#include "hkv/error.hpp"

namespace hkv::app {

using nlohmann::json;

json complex_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

namespace {

cplx complex_from(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_string()) return parse_complex(j.get<std::string>());
    return {j.at("re").get<double>(), j.at("im").get<double>()};
}

template <class T>
void take(const json& j, const char* key, T& v) {
    if (j.contains(key)) j.at(key).get_to(v);
}

}  // namespace

// accepts "a", "a+bi", "a-bi", "bi" and "a,b"
cplx parse_complex(const std::string& s) {
    static const std::regex pair(R"(^\s*([-+0-9.eE]+)\s*,\s*([-+0-9.eE]+)\s*$)");
    static const std::regex alg(R"(^\s*([-+]?[0-9.]+(?:[eE][-+]?[0-9]+)?)?\s*(?:([-+])\s*([0-9.]+(?:[eE][-+]?[0-9]+)?)?\s*i)?\s*$)");
    static const std::regex imag_only(R"(^\s*([-+]?[0-9.]*(?:[eE][-+]?[0-9]+)?)\s*i\s*$)");
    std::smatch m;
    try {
        if (std::regex_match(s, m, pair)) return {std::stod(m[1]), std::stod(m[2])};
        if (std::regex_match(s, m, imag_only)) {
            const std::string b = m[1];
            return {0.0, b.empty() || b == "+" ? 1.0 : b == "-" ? -1.0 : std::stod(b)};
        }
        if (std::regex_match(s, m, alg) && (m[1].matched || m[2].matched)) {
            const double re = m[1].matched ? std::stod(m[1]) : 0.0;
            double im = 0;
            if (m[2].matched) {
                im = m[3].matched ? std::stod(m[3]) : 1.0;
                if (m[2] == "-") im = -im;
            }
            return {re, im};
        }
    } catch (const std::exception&) {
    }
    raise(errc::config_invalid, "cannot parse complex number '" + s + "'");
}

void to_json(json& j, const run_config& c) {
    j = json{{"command", c.command},
             {"p", c.p},
             {"beta", c.beta},
             {"n", c.n},
             {"h", c.h},
             {"c", c.c},
             {"k", c.k},
             {"components", c.components},
             {"twist", c.twist},
             {"s", complex_json(c.s)},
             {"delta", complex_json(c.delta)},
             {"u", c.u},
             {"y", c.y},
             {"kind", c.kind},
             {"mode", c.mode},
             {"family", c.family},
             {"theorem", c.theorem},
             {"suite", c.suite},
             {"method", c.method},
             {"form", c.form},
             {"u_sweep", c.u_sweep},
             {"tolerance", c.tolerance},
             {"tail_target", c.tail_target},
             {"moment_target", c.moment_target},
             {"cap", c.cap},
             {"sigma", c.sigma},
             {"T", c.T},
             {"h_step", c.h_step},
             {"seed", c.seed},
             {"sample_size", c.sample_size},
             {"emit", c.emit == emit_format::csv ? "csv" : "json"},
             {"out_dir", c.out_dir},
             {"cache_dir", c.cache_dir},
             {"use_cache", c.use_cache},
             {"timings", c.timings}};
}

void from_json(const json& j, run_config& c) {
    take(j, "command", c.command);
    take(j, "p", c.p);
    take(j, "beta", c.beta);
    take(j, "n", c.n);
    take(j, "h", c.h);
    take(j, "c", c.c);
    take(j, "k", c.k);
    take(j, "components", c.components);
    take(j, "twist", c.twist);
    if (j.contains("s")) c.s = complex_from(j.at("s"));
    if (j.contains("delta")) c.delta = complex_from(j.at("delta"));
    take(j, "u", c.u);
    take(j, "y", c.y);
    take(j, "kind", c.kind);
    take(j, "mode", c.mode);
    take(j, "family", c.family);
    take(j, "theorem", c.theorem);
    take(j, "suite", c.suite);
    take(j, "method", c.method);
    take(j, "form", c.form);
    take(j, "u_sweep", c.u_sweep);
    take(j, "tolerance", c.tolerance);
    take(j, "tail_target", c.tail_target);
    take(j, "moment_target", c.moment_target);
    take(j, "cap", c.cap);
    take(j, "sigma", c.sigma);
    take(j, "T", c.T);
    take(j, "h_step", c.h_step);
    take(j, "seed", c.seed);
    take(j, "sample_size", c.sample_size);
    if (j.contains("emit")) {
        const auto e = j.at("emit").get<std::string>();
        require(e == "json" || e == "csv", errc::config_invalid, "emit must be json or csv");
        c.emit = e == "csv" ? emit_format::csv : emit_format::json;
    }
    take(j, "out_dir", c.out_dir);
    take(j, "cache_dir", c.cache_dir);
    take(j, "use_cache", c.use_cache);
    take(j, "timings", c.timings);
}

std::string config_key(const run_config& c) {
    json j = c;
    for (const char* k : {"emit", "out_dir", "cache_dir", "use_cache", "timings"}) j.erase(k);
    const std::string s = j.dump();
    // FNV-1a
    u64 h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace hkv::app
