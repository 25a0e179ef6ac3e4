#include "app.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hkv/error.hpp"
#include "hkv/kernels.hpp"
#include "hkv/kloosterman.hpp"
#include "hkv/ldata.hpp"
#include "hkv/series.hpp"
#include "hkv/voronoi.hpp"

namespace hkv::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

std::string joined(const std::vector<std::string>& v, char sep) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += sep;
        s += v[i];
    }
    return s;
}

// CSV fields never contain quotes here, only commas inside labels
std::string csv_field(const std::string& s) {
    return s.find_first_of(",\n") == std::string::npos ? s : "\"" + s + "\"";
}

identity_form parse_form(const std::string& s) {
    if (s == "literal") return identity_form::literal;
    if (s == "corrected") return identity_form::corrected;
    raise(errc::config_invalid, "form must be literal or corrected");
}

isobaric_datum datum_of(const run_config& c) { return parse_components(c.components); }

isobaric_datum single_component(const run_config& c, const char* what) {
    const auto d = datum_of(c);
    require(d.n() == 1, errc::config_invalid, std::string(what) + " takes exactly one component");
    return d;
}

double tol_or(const run_config& c, double fallback) { return c.tolerance > 0 ? c.tolerance : fallback; }

quadrature_options quadrature(const run_config& c) {
    quadrature_options o;
    if (c.sigma != 0) o.sigma = c.sigma;
    if (c.T > 0) o.T = c.T;
    o.h = c.h_step;
    return o;
}

report_doc value_doc(std::string name, const std::string& what, cplx v, double bound, bool pass = true) {
    report_doc d;
    d.name = std::move(name);
    d.pass = pass;
    d.body = {{"check", what}, {"value", complex_json(v)}, {"bound", bound}, {"pass", pass}};
    d.csv_header = {"label", "re", "im", "bound"};
    d.csv_rows.push_back({what, num(v.real()), num(v.imag()), num(bound)});
    return d;
}

// ---- commands ----

std::vector<report_doc> cmd_kl(const run_config& c) {
    const auto g = build_unit_group(c.p, c.beta);
    const kl_method m = parse_kl_method(c.method);
    report_doc d;
    d.name = "kl";
    d.body = {{"check", "kloosterman"}, {"p", c.p}, {"beta", c.beta}, {"n", c.n}, {"method", c.method}};
    d.csv_header = {"c", "re", "im"};
    json values = json::array();
    auto add = [&](i64 x, cplx v) {
        values.push_back({{"c", x}, {"value", complex_json(v)}});
        d.csv_rows.push_back({std::to_string(x), num(v.real()), num(v.imag())});
    };
    if (c.c != 0) {
        require(gcd(mod(c.c, g->q()), c.p) == 1, errc::invalid_argument, "c must be a unit");
        add(c.c, kloosterman({c.n, c.c, g->modulus(), m}));
    } else {
        const kl_table t(g, c.n, m);
        for (i64 x = 1; x < g->q(); ++x)
            if (g->dlog(x) >= 0) add(x, t(x));
    }
    d.body["values"] = std::move(values);
    d.body["pass"] = true;
    return {d};
}

std::vector<report_doc> cmd_verify(const run_config& c) {
    sweep_config sc;
    sc.seed = c.seed;
    sc.sample_size = c.sample_size;
    sc.tolerance = tol_or(c, sc.tolerance);
    std::vector<report_doc> out;
    for (const auto& r : run_identity_suite(c.suite, c.p, c.beta, c.n, parse_form(c.form), sc))
        out.push_back(make_doc(r, c.timings));
    return out;
}

std::vector<report_doc> cmd_kernel(const run_config& c) {
    cutoff_function f;
    f.kind = parse_cutoff_kind(c.kind);
    const auto d = datum_of(c);
    f.gamma = d.gamma();
    f.delta = c.delta;
    f.u = c.u;
    f.p = c.p;
    if (f.tilde()) f.euler_alpha = d.satake(c.p);
    const std::vector<double> ys = c.y.empty() ? std::vector<double>{0.01, 0.1, 1, 10} : c.y;
    report_doc doc;
    doc.name = "kernel";
    doc.body = {{"check", "kernel"}, {"kind", c.kind}, {"delta", complex_json(c.delta)}, {"u", c.u}, {"p", c.p}};
    doc.csv_header = {"y", "re", "im", "tail_bound"};
    json values = json::array();
    const auto opt = quadrature(c);
    for (double y : ys) {
        const kernel_value v = eval_cutoff(f, y, opt);
        values.push_back({{"y", y}, {"value", complex_json(v.value)}, {"tail_bound", v.tail_bound}});
        doc.csv_rows.push_back({num(y), num(v.value.real()), num(v.value.imag()), num(v.tail_bound)});
    }
    doc.body["values"] = std::move(values);
    doc.body["pass"] = true;
    return {doc};
}

std::vector<report_doc> cmd_ldata(const run_config& c) {
    const auto d = datum_of(c);
    const auto g = build_unit_group(c.p, c.beta);
    const l_mode mode = parse_l_mode(c.mode);
    std::vector<dirichlet_character> chars;
    if (c.twist.empty()) {
        chars = list_characters(g, char_filter::primitive_even);
    } else {
        chars.emplace_back(g, std::stoll(c.twist));
        require(chars.back().primitive(), errc::invalid_argument, "the twist must be primitive");
    }
    report_doc doc;
    doc.name = "ldata";
    doc.body = {{"check", "twisted L"}, {"components", c.components}, {"p", c.p}, {"beta", c.beta},
                {"s", complex_json(c.s)}, {"mode", c.mode}};
    doc.csv_header = {"chi", "re", "im", "bound", "terms"};
    json values = json::array();
    for (const auto& chi : chars) {
        const l_value v = twisted_L(d, chi, c.s, mode);
        values.push_back({{"chi", chi.index()}, {"value", complex_json(v.value)}, {"bound", v.bound},
                          {"terms", v.terms}});
        doc.csv_rows.push_back({std::to_string(chi.index()), num(v.value.real()), num(v.value.imag()), num(v.bound),
                                std::to_string(v.terms)});
    }
    doc.body["values"] = std::move(values);
    doc.body["pass"] = true;
    return {doc};
}

std::vector<report_doc> cmd_series(const run_config& c) {
    const series_family f = parse_series_family(c.family);
    const bool gl1 = f == series_family::hk_gl1 || f == series_family::hk_gl1_base;
    const series_params sp(f, gl1 ? single_component(c, "a GL(1) family") : datum_of(c), c.p, c.beta, c.h, c.k);
    const auto r = verify_functional_identity(sp, c.s, parse_form(c.form), tol_or(c, 1e-6));
    return {make_doc("series", r, c.timings)};
}

moment_query query_of(const run_config& c, double u) {
    moment_query q(datum_of(c), c.p, c.beta, c.delta, u);
    q.target = c.moment_target;
    return q;
}

std::vector<report_doc> cmd_average(const run_config& c) {
    require(c.command.size() == 2, errc::config_invalid, "average needs direct, decompose or recursion");
    const std::string& what = c.command[1];
    const moment_query q = query_of(c, c.u);
    if (what == "direct") {
        const auto X = moment_direct(q);
        return {value_doc("average_direct", "moment_direct", X.value, X.bound)};
    }
    if (what == "decompose") {
        const auto t0 = std::chrono::steady_clock::now();
        const auto X = moment_direct(q);
        const auto S = moment_decomposition(q);
        verification_report r;
        r.check = "moment decomposition";
        r.param("p", std::to_string(q.p));
        r.param("beta", std::to_string(q.beta));
        r.param("delta", format_complex(q.delta));
        r.param("u", num(q.u));
        r.lhs = X.value;
        r.lhs_bound = X.bound;
        r.rhs = S.X1.value + S.X2.value;
        r.rhs_bound = S.X1.bound + S.X2.bound;
        r.terms = {{"X1", S.X1.value, S.X1.bound},
                   {"X2", S.X2.value, S.X2.bound},
                   {"m = 1 term of X1", S.m1_term, 0},
                   {"X2 envelope", S.x2_envelope, 0}};
        r.notes.push_back("X1 terms " + std::to_string(S.x1_terms) + ", X2 terms " + std::to_string(S.x2_terms));
        r.scale = std::max(std::abs(X.value), 1.0);
        r.finish(tol_or(c, 1e-6));
        r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return {make_doc("average_decompose", r, c.timings)};
    }
    if (what == "recursion") {
        std::vector<report_doc> out{make_doc("average_recursion", moment_recursion(q, tol_or(c, 1e-5)), c.timings)};
        if (!c.u_sweep.empty()) {
            const auto X = moment_direct(q);
            verification_report r;
            r.check = "u-invariance of the twisted-sum route";
            r.param("p", std::to_string(q.p));
            r.param("beta", std::to_string(q.beta));
            r.lhs = X.value;
            r.lhs_bound = X.bound;
            double worst = 0;
            for (double u : c.u_sweep) {
                const moment_query qu = query_of(c, u);
                const auto P = phi_u_progression(qu);
                const auto T = twisted_sum_voronoi(qu);
                const cplx v = P.value + T.total;
                r.terms.push_back({"u = " + num(u), v, P.bound + T.bound});
                if (std::abs(v - X.value) >= worst) {
                    worst = std::abs(v - X.value);
                    r.rhs = v;
                    r.rhs_bound = P.bound + T.bound;
                }
            }
            r.scale = std::max(std::abs(X.value), 1.0);
            r.finish(tol_or(c, 1e-5));
            out.push_back(make_doc("average_u_sweep", r, c.timings));
        }
        return out;
    }
    raise(errc::config_invalid, "unknown average mode: " + what);
}

std::vector<report_doc> cmd_voronoi(const run_config& c) {
    require(c.command.size() == 2 && c.command[1] == "check", errc::config_invalid, "voronoi needs check");
    const voronoi_theorem t = parse_voronoi_theorem(c.theorem);
    const bool gl1 = t == voronoi_theorem::D_B_i || t == voronoi_theorem::D_B_ii;
    voronoi_params vp(t, gl1 ? single_component(c, "D(B)") : datum_of(c), c.p, c.beta, c.h, c.k);
    vp.form = parse_form(c.form);
    vp.delta = c.delta;
    vp.u = c.u;
    vp.tail_target = c.tail_target;
    vp.cap = c.cap;
    return {make_doc("voronoi_" + c.theorem, voronoi_check(vp, tol_or(c, 1e-6)), c.timings)};
}

std::vector<report_doc> cmd_bench(const run_config& c) {
    require(c.command.size() == 2 && c.command[1] == "kl", errc::config_invalid, "bench needs kl");
    report_doc doc;
    doc.name = "bench_kl";
    doc.body = {{"check", "kloosterman timings"}, {"p", c.p}, {"beta", c.beta}, {"n", c.n}};
    doc.csv_header = {"beta", "method", "seconds"};
    json rows = json::array();
    for (int b = 1; b <= c.beta; ++b) {
        const auto g = build_unit_group(c.p, b);
        std::vector<kl_method> methods = {kl_method::naive, kl_method::dp, kl_method::fft_dp};
        if (b >= 2 && b % 2 == 0 && c.p >= 5 && c.n % c.p != 0) {
            const auto rep = run_salie_calibration(c.p, b, c.n);
            if (rep.selected) methods.push_back(kl_method::salie);
        }
        for (kl_method m : methods) {
            const auto t0 = std::chrono::steady_clock::now();
            volatile double sink = kl_dlog_table(*g, c.n, m)[0].real();
            (void)sink;
            const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            rows.push_back({{"beta", b}, {"method", kl_method_name(m)}, {"seconds", sec}});
            doc.csv_rows.push_back({std::to_string(b), std::string(kl_method_name(m)), num(sec)});
        }
    }
    doc.body["timings"] = std::move(rows);
    doc.body["pass"] = true;
    return {doc};
}

std::vector<report_doc> dispatch(const run_config& c) {
    require(!c.command.empty(), errc::config_invalid, "no command");
    const std::string& head = c.command[0];
    if (head == "kl") return cmd_kl(c);
    if (head == "verify") return cmd_verify(c);
    if (head == "kernel") return cmd_kernel(c);
    if (head == "ldata") return cmd_ldata(c);
    if (head == "series") return cmd_series(c);
    if (head == "average") return cmd_average(c);
    if (head == "voronoi") return cmd_voronoi(c);
    if (head == "bench") return cmd_bench(c);
    raise(errc::config_invalid, "unknown command: " + head);
}

json doc_json(const report_doc& d) {
    return {{"name", d.name}, {"pass", d.pass}, {"body", d.body}, {"csv_header", d.csv_header},
            {"csv_rows", d.csv_rows}};
}

report_doc doc_from(const json& j) {
    report_doc d;
    j.at("name").get_to(d.name);
    j.at("pass").get_to(d.pass);
    d.body = j.at("body");
    j.at("csv_header").get_to(d.csv_header);
    j.at("csv_rows").get_to(d.csv_rows);
    return d;
}

std::string cache_root(const run_config& c) {
    if (!c.cache_dir.empty()) return c.cache_dir;
    if (const char* e = std::getenv("HKV_CACHE_DIR")) return e;
    return {};
}

bool cacheable(const run_config& c) { return c.use_cache && !c.timings && c.command[0] != "bench"; }

std::string csv_text(const report_doc& d) {
    std::ostringstream os;
    std::vector<std::string> h;
    for (const auto& x : d.csv_header) h.push_back(csv_field(x));
    os << joined(h, ',') << '\n';
    for (const auto& row : d.csv_rows) {
        std::vector<std::string> r;
        for (const auto& x : row) r.push_back(csv_field(x));
        os << joined(r, ',') << '\n';
    }
    return os.str();
}

json document(const run_config& cfg, const std::vector<report_doc>& docs) {
    json reports = json::array();
    bool pass = true;
    for (const auto& d : docs) {
        json b = d.body;
        b["name"] = d.name;
        reports.push_back(std::move(b));
        pass = pass && d.pass;
    }
    json out_cfg = cfg;
    out_cfg.erase("out_dir");
    out_cfg.erase("cache_dir");
    return {{"schema", schema_version}, {"command", joined(cfg.command, ' ')}, {"config", out_cfg},
            {"pass", pass}, {"reports", std::move(reports)}};
}

}  // namespace

json to_json(const verification_report& r, bool timings) {
    json params = json::object();
    for (const auto& [k, v] : r.params) params[k] = v;
    json terms = json::array();
    for (const auto& t : r.terms) terms.push_back({{"label", t.label}, {"value", complex_json(t.value)}, {"bound", t.bound}});
    json j = {{"check", r.check},
              {"form", r.form},
              {"params", params},
              {"lhs", complex_json(r.lhs)},
              {"rhs", complex_json(r.rhs)},
              {"lhs_bound", r.lhs_bound},
              {"rhs_bound", r.rhs_bound},
              {"residual", r.residual},
              {"scale", r.scale},
              {"relative_residual", r.relative_residual},
              {"tolerance", r.tolerance},
              {"pass", r.pass()},
              {"bars_dominate", r.bars_dominate()},
              {"terms", terms},
              {"notes", r.notes}};
    if (timings) j["runtime_s"] = r.runtime_s;
    return j;
}

json to_json(const identity_report& r, bool timings) {
    json j = {{"check", identity_name(r.id)},
              {"form", r.form == identity_form::literal ? "literal" : "corrected"},
              {"p", r.p},
              {"beta", r.beta},
              {"n", r.n},
              {"exhaustive", r.exhaustive},
              {"cases_checked", r.cases_checked},
              {"cases_declared", r.cases_declared},
              {"max_abs_residual", r.max_abs_residual},
              {"scale", r.scale},
              {"tolerance", r.tolerance},
              {"worst_class", r.worst_class},
              {"skipped", r.skipped},
              {"skip_reason", r.skip_reason},
              {"pass", r.pass()}};
    if (timings) j["runtime_s"] = r.runtime_s;
    return j;
}

report_doc make_doc(std::string name, const verification_report& r, bool timings) {
    report_doc d;
    d.name = std::move(name);
    d.pass = r.pass();
    d.body = to_json(r, timings);
    d.csv_header = {"label", "re", "im", "bound"};
    d.csv_rows.push_back({"lhs", num(r.lhs.real()), num(r.lhs.imag()), num(r.lhs_bound)});
    d.csv_rows.push_back({"rhs", num(r.rhs.real()), num(r.rhs.imag()), num(r.rhs_bound)});
    for (const auto& t : r.terms) d.csv_rows.push_back({t.label, num(t.value.real()), num(t.value.imag()), num(t.bound)});
    return d;
}

report_doc make_doc(const identity_report& r, bool timings) {
    report_doc d;
    d.name = "identity_" + std::string(identity_name(r.id)) + "_p" + std::to_string(r.p) + "_b" +
             std::to_string(r.beta) + "_n" + std::to_string(r.n);
    d.pass = r.pass();
    d.body = to_json(r, timings);
    d.csv_header = {"identity", "form", "p", "beta", "n", "cases", "max_residual", "pass"};
    d.csv_rows.push_back({std::string(identity_name(r.id)), d.body["form"], std::to_string(r.p),
                          std::to_string(r.beta), std::to_string(r.n), std::to_string(r.cases_checked),
                          num(r.max_abs_residual), r.pass() ? "1" : "0"});
    return d;
}

std::string render(const run_config& cfg, const std::vector<report_doc>& docs) {
    if (cfg.emit == emit_format::json) return document(cfg, docs).dump(2) + "\n";
    std::string s;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (i) s += '\n';
        if (docs.size() > 1) s += "# " + docs[i].name + "\n";
        s += csv_text(docs[i]);
    }
    return s;
}

run_result run(const run_config& cfg) {
    require(!cfg.command.empty(), errc::config_invalid, "no command");
    run_result res;

    const std::string root = cache_root(cfg);
    fs::path cached;
    if (!root.empty() && cacheable(cfg)) {
        cached = fs::path(root) / (config_key(cfg) + ".json");
        std::ifstream in(cached);
        if (in) {
            try {
                const json j = json::parse(in);
                for (const auto& d : j.at("docs")) res.reports.push_back(doc_from(d));
                res.from_cache = true;
            } catch (const std::exception&) {
                res.reports.clear();
            }
        }
    }
    if (!res.from_cache) {
        res.reports = dispatch(cfg);
        if (!cached.empty()) {
            std::error_code ec;
            fs::create_directories(cached.parent_path(), ec);
            json arr = json::array();
            for (const auto& d : res.reports) arr.push_back(doc_json(d));
            std::ofstream(cached) << json{{"schema", schema_version}, {"docs", arr}}.dump() << '\n';
        }
    }

    bool pass = true;
    for (const auto& d : res.reports) pass = pass && d.pass;
    if (cfg.out_dir.empty()) {
        res.output = render(cfg, res.reports);
        for (const auto& d : res.reports)
            if (!d.pass) res.failing.push_back(d.name);
    } else {
        fs::create_directories(cfg.out_dir);
        const char* ext = cfg.emit == emit_format::json ? ".json" : ".csv";
        for (const auto& d : res.reports) {
            const fs::path path = fs::path(cfg.out_dir) / (d.name + ext);
            std::ofstream(path) << (cfg.emit == emit_format::json ? render(cfg, {d}) : csv_text(d));
            res.written.push_back(path.string());
            if (!d.pass) res.failing.push_back(path.string());
        }
        const fs::path cfg_path = fs::path(cfg.out_dir) / "run_config.json";
        std::ofstream(cfg_path) << json(cfg).dump(2) << '\n';
    }
    res.exit_code = pass ? 0 : 1;
    return res;
}

}  // namespace hkv::app
