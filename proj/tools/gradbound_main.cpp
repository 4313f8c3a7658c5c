// Experiment runner for the gradient-bound verification lab.
//
// Subcommands:
//   run <spec>          solve the configured experiment; artifacts go to
//                       <out>/<name>/ (MANIFEST, sweep.csv, report_*.json)
//   list-experiments    print the available experiment kinds
//   report <dir>        summarize a previous run directory
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 config/spec error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gradbound/config.hpp"
#include "gradbound/experiment.hpp"
#include "gradbound/version.hpp"

namespace fs = std::filesystem;

namespace {

int cmd_run(const std::string& spec_path, const gradbound::RunOptions& opt) {
    gradbound::Config cfg;
    try {
        cfg = gradbound::Config::parse_file(spec_path);
    } catch (const gradbound::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    try {
        const auto outcome = gradbound::run_experiment(cfg, opt);
        if (!opt.quiet)
            for (const auto& line : outcome.lines) std::cout << line << "\n";
        std::cout << (outcome.passed ? "PASS" : "FAIL") << " (" << outcome.lines.size()
                  << " checks, artifacts in " << outcome.dir.string() << ")\n";
        if (!outcome.passed) {
            for (const auto& f : outcome.failures) std::cerr << "failed: " << f << "\n";
            return 1;
        }
        return 0;
    } catch (const gradbound::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return 1;
    }
}

int cmd_report(const std::string& dir) {
    const fs::path root(dir);
    if (!fs::exists(root / "MANIFEST")) {
        std::cerr << "no MANIFEST under " << dir << "\n";
        return 2;
    }
    std::ifstream manifest(root / "MANIFEST");
    std::string line;
    while (std::getline(manifest, line)) std::cout << line << "\n";
    std::vector<fs::path> reports;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.path().extension() == ".json") reports.push_back(entry.path());
    std::sort(reports.begin(), reports.end());
    for (const auto& p : reports) {
        std::ifstream in(p);
        nlohmann::json j;
        in >> j;
        std::cout << p.filename().string() << ": " << j.value("check", "?");
        if (j.contains("pass")) std::cout << (j["pass"].get<bool>() ? " PASS" : " FAIL");
        std::cout << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gradbound: finite-difference verification runs for elliptic/parabolic "
                 "gradient bounds, comparison barriers and 1D duality checks"};
    app.set_version_flag("--version", std::string("gradbound ") + gradbound::kVersion);

    gradbound::RunOptions opt;
    std::string spec_path, report_dir;
    double h_override = 0.0;
    std::uint64_t seed_override = 0;

    auto* run = app.add_subcommand("run", "run an experiment spec");
    run->add_option("spec", spec_path, "spec file (structured key-value text)")->required();
    auto* h_opt = run->add_option("--h-override", h_override, "replace grid.h");
    auto* seed_opt = run->add_option("--seed", seed_override, "replace sweep.seed");
    run->add_option("--threads", opt.threads, "worker threads for sweep entries");
    run->add_option("--out", opt.output_root,
                    "output root (default $GRADBOUND_OUT or ./out)");
    run->add_option("--name", opt.run_name, "run directory name (default: spec stem)");
    run->add_flag("--quiet", opt.quiet, "suppress per-check lines");

    auto* list = app.add_subcommand("list-experiments", "print available experiment kinds");
    auto* report = app.add_subcommand("report", "summarize a run directory");
    report->add_option("dir", report_dir, "run directory")->required();

    app.require_subcommand(1);
    CLI11_PARSE(app, argc, argv);

    if (*list) {
        for (const auto& k : gradbound::experiment_kinds()) std::cout << k << "\n";
        return 0;
    }
    if (*report) return cmd_report(report_dir);
    if (*h_opt) opt.h_override = h_override;
    if (*seed_opt) opt.seed_override = seed_override;
    return cmd_run(spec_path, opt);
}
