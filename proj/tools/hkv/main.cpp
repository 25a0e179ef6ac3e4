#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "app.hpp"
#include "hkv/error.hpp"

using namespace hkv;
using app::run_config;

namespace {

struct text_options {
    std::string s, delta, emit = "json";
};

void arithmetic(CLI::App* sub, run_config& c, bool with_h = false) {
    sub->add_option("--p", c.p, "Prime")->capture_default_str();
    sub->add_option("--beta", c.beta, "Exponent of p")->capture_default_str();
    if (with_h) sub->add_option("--h", c.h, "Unit modulo p^beta")->capture_default_str();
}

void datum_option(CLI::App* sub, run_config& c) {
    sub->add_option("--components", c.components, "Even primitive characters as q:t,q:t")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    run_config c;
    text_options t;
    std::string config_path, save_path;
    bool no_cache = false;

    CLI::App cli{"hkv: numerical verification of hyper-Kloosterman summation identities"};
    cli.set_help_flag("--help", "Print this help message and exit");
    cli.require_subcommand(0, 1);
    cli.fallthrough();
    cli.add_option("--config", config_path, "Replay a saved run configuration (JSON)");
    cli.add_option("--save-config", save_path, "Write the run configuration to this file");
    cli.add_option("--emit", t.emit, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    cli.add_option("--out", c.out_dir, "Write one report file per check into this directory");
    cli.add_option("--cache-dir", c.cache_dir, "Report cache (overrides HKV_CACHE_DIR)");
    cli.add_flag("--no-cache", no_cache, "Ignore the report cache");
    cli.add_flag("--timings", c.timings, "Include runtimes in reports");
    cli.add_option("--tol", c.tolerance, "Tolerance override");
    cli.add_option("--seed", c.seed, "Sampling seed")->capture_default_str();

    auto* kl = cli.add_subcommand("kl", "Hyper-Kloosterman sums modulo p^beta");
    arithmetic(kl, c);
    kl->add_option("--n", c.n, "Order")->capture_default_str();
    kl->add_option("--c", c.c, "Class; omitted lists every unit");
    kl->add_option("--method", c.method, "naive, dp, fft_dp or salie")->capture_default_str();

    auto* verify = cli.add_subcommand("verify", "Finite identity sweeps");
    arithmetic(verify, c);
    verify->add_option("--n", c.n, "Order")->capture_default_str();
    verify->add_option("--suite", c.suite, "qo, sogs, lcac, gausstwist, hk2, hksum or all")->capture_default_str();
    verify->add_option("--form", c.form, "literal or corrected")->capture_default_str();
    verify->add_option("--sample-size", c.sample_size, "Classes sampled above the exhaustive limit");

    auto* kernel = cli.add_subcommand("kernel", "Cutoff functions V1, V2, Phi_u and the dual kernels");
    kernel->add_option("--kind", c.kind, "Cutoff kind")->capture_default_str();
    kernel->add_option("--y", c.y, "Evaluation points");
    kernel->add_option("--delta", t.delta, "Central parameter delta");
    kernel->add_option("--u", c.u, "Scale exponent u")->capture_default_str();
    kernel->add_option("--p", c.p, "Prime")->capture_default_str();
    kernel->add_option("--sigma", c.sigma, "Contour abscissa");
    kernel->add_option("--T", c.T, "Contour height");
    kernel->add_option("--h-step", c.h_step, "Trapezoid step")->capture_default_str();
    datum_option(kernel, c);

    auto* ldata = cli.add_subcommand("ldata", "Twisted L-values L(s, pi x chi)");
    arithmetic(ldata, c);
    datum_option(ldata, c);
    ldata->add_option("--s", t.s, "Point s, as a+bi or a,b");
    ldata->add_option("--mode", c.mode, "series, product or afe")->capture_default_str();
    ldata->add_option("--twist", c.twist, "Character index modulo p^beta; omitted runs every primitive even one");

    auto* series = cli.add_subcommand("series", "Two-sided Dirichlet series identities");
    arithmetic(series, c, true);
    datum_option(series, c);
    series->add_option("--family", c.family, "additive_D, hk_gln, hk_gl1 or hk_gl1_base")->capture_default_str();
    series->add_option("--k", c.k, "Kloosterman order")->capture_default_str();
    series->add_option("--s", t.s, "Point s");
    series->add_option("--form", c.form, "literal or corrected")->capture_default_str();

    auto* average = cli.add_subcommand("average", "First moment over primitive even characters");
    std::string avg_mode;
    average->add_option("mode", avg_mode, "direct, decompose or recursion")
        ->required()
        ->check(CLI::IsMember({"direct", "decompose", "recursion"}));
    arithmetic(average, c);
    datum_option(average, c);
    average->add_option("--delta", t.delta, "Central parameter delta");
    average->add_option("--u", c.u, "Z = p^u")->capture_default_str();
    average->add_option("--u-sweep", c.u_sweep, "Further u values for the invariance check");
    average->add_option("--target", c.moment_target, "Absolute accuracy of truncated sums")->capture_default_str();

    auto* voronoi = cli.add_subcommand("voronoi", "Voronoi summation checks");
    auto* vcheck = voronoi->add_subcommand("check", "Two-sided check of one summation formula");
    voronoi->require_subcommand(1);
    arithmetic(vcheck, c, true);
    datum_option(vcheck, c);
    vcheck->add_option("--theorem", c.theorem, "VSF_i, VSF_ii, VSF2_i, VSF2_ii, DAFI_B_i, DAFI_B_ii, D_B_i, D_B_ii, VSFK")
        ->capture_default_str();
    vcheck->add_option("--k", c.k, "Kloosterman order for D(B)")->capture_default_str();
    vcheck->add_option("--form", c.form, "literal or corrected")->capture_default_str();
    vcheck->add_option("--delta", t.delta, "delta of the phi_infinity weight");
    vcheck->add_option("--u", c.u, "u of the phi_infinity weight")->capture_default_str();
    vcheck->add_option("--tail-target", c.tail_target, "Truncation target per unit weight")->capture_default_str();
    vcheck->add_option("--cap", c.cap, "Largest truncation length")->capture_default_str();

    auto* bench = cli.add_subcommand("bench", "Timings");
    auto* bkl = bench->add_subcommand("kl", "Kloosterman methods across a beta sweep");
    bench->require_subcommand(1);
    arithmetic(bkl, c);
    bkl->add_option("--n", c.n, "Order")->capture_default_str();

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = cli.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "cannot read " << config_path << "\n";
                return 2;
            }
            const std::string out_dir = c.out_dir;
            c = nlohmann::json::parse(in).get<run_config>();
            if (!out_dir.empty()) c.out_dir = out_dir;
        } else {
            if (cli.get_subcommands().empty()) {
                std::cerr << cli.help();
                return 2;
            }
            for (auto* sub = cli.get_subcommands().front(); sub;) {
                c.command.push_back(sub->get_name());
                const auto subs = sub->get_subcommands();
                sub = subs.empty() ? nullptr : subs.front();
            }
            if (!avg_mode.empty()) c.command.push_back(avg_mode);
            if (!t.s.empty()) c.s = app::parse_complex(t.s);
            if (!t.delta.empty()) c.delta = app::parse_complex(t.delta);
            c.emit = t.emit == "csv" ? app::emit_format::csv : app::emit_format::json;
            c.use_cache = !no_cache;
        }
        if (!save_path.empty()) std::ofstream(save_path) << nlohmann::json(c).dump(2) << '\n';

        const auto res = app::run(c);
        std::cout << res.output;
        for (const auto& f : res.failing) std::cerr << "FAILED " << f << "\n";
        return res.exit_code;
    } catch (const error& e) {
        std::cerr << e.what() << "\n";
        return e.code() == errc::config_invalid || e.code() == errc::invalid_argument ? 2 : 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "bad configuration: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}
