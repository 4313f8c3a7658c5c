#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gradbound/experiment.hpp"

using namespace gradbound;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunOptions tmp_opts(const std::string& name) {
    RunOptions opt;
    opt.output_root = (fs::temp_directory_path() / "gradbound_test_out").string();
    opt.run_name = name;
    opt.quiet = true;
    return opt;
}

}  // namespace

TEST_CASE("elliptic bound run writes artifacts and passes") {
    const Config cfg = Config::parse(R"(
kind = elliptic_bound
[domain]
kind = interval
a = 0
b = 1
[grid]
h = 0.002
[coefficients]
f = 1
[zscan]
enabled = true
negative_control = true
)",
                                     "elliptic_1d.toml");
    const auto out = run_experiment(cfg, tmp_opts("ell1d"));
    CHECK(out.passed);
    CHECK(fs::exists(out.dir / "MANIFEST"));
    CHECK(fs::exists(out.dir / "sweep.csv"));
    CHECK(fs::exists(out.dir / "report_000.json"));
    const std::string manifest = slurp(out.dir / "MANIFEST");
    CHECK(manifest.find("seed: 1") != std::string::npos);
}

TEST_CASE("random sweep is deterministic: same seed, byte-identical CSV") {
    const char* spec = R"(
kind = elliptic_bound
[domain]
kind = interval
a = 0
b = 1
[grid]
h = 0.004
[coefficients]
random = true
k_max = 2
f_max = 1
[sweep]
count = 5
seed = 3
)";
    const Config cfg = Config::parse(spec, "sweep.toml");
    const auto o1 = run_experiment(cfg, tmp_opts("det_a"));
    const auto o2 = run_experiment(cfg, tmp_opts("det_b"));
    CHECK(o1.passed);
    CHECK(slurp(o1.dir / "sweep.csv") == slurp(o2.dir / "sweep.csv"));

    RunOptions other = tmp_opts("det_c");
    other.seed_override = 99;
    const auto o3 = run_experiment(cfg, other);
    CHECK(slurp(o1.dir / "sweep.csv") != slurp(o3.dir / "sweep.csv"));
}

TEST_CASE("config validation failures name the field") {
    const Config cfg = Config::parse(R"(
kind = elliptic_bound
[domain]
kind = interval
[grid]
h = -0.5
)",
                                     "bad.toml");
    try {
        run_experiment(cfg, tmp_opts("bad"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        CHECK(what.find("grid.h") != std::string::npos);
        CHECK(what.find("bad.toml:6") != std::string::npos);
    }
}

TEST_CASE("time-dependent drift is rejected with a scope message") {
    const Config cfg = Config::parse(R"(
kind = parabolic_bound
[domain]
kind = interval
[grid]
h = 0.02
[coefficients]
w_x = sin(t)
[parabolic]
T = 0.1
dt = 0.01
phi0 = sin(pi*x)
)",
                                     "tdep.toml");
    CHECK_THROWS_AS(run_experiment(cfg, tmp_opts("tdep")), ConfigError);
}

TEST_CASE("time-dependent forcing is allowed and solvable") {
    const Config cfg = Config::parse(R"(
kind = parabolic_bound
[domain]
kind = interval
[grid]
h = 0.01
[coefficients]
f = exp(-1*t) * sin(pi*x)
[parabolic]
T = 0.2
dt = 0.01
phi0 = 0
)",
                                     "tforce.toml");
    const auto out = run_experiment(cfg, tmp_opts("tforce"));
    CHECK(out.passed);
}

TEST_CASE("parabolic bound run with explicit path") {
    const Config cfg = Config::parse(R"(
kind = parabolic_bound
[domain]
kind = interval
[grid]
h = 0.005
[coefficients]
w_x = 0.5
[parabolic]
T = 0.5
dt = 0.01
phi0 = x * (1 - x)
check_t_independence = true
[zscan]
enabled = true
)",
                                     "par.toml");
    const auto out = run_experiment(cfg, tmp_opts("par"));
    CHECK(out.passed);
    CHECK(fs::exists(out.dir / "grad_history_000.csv"));
}

TEST_CASE("landis1d run produces the demo table") {
    const Config cfg = Config::parse(R"(
kind = landis1d
[landis]
h = 0.002
radii = [1, 2, 3]
gronwall_count = 10
)",
                                     "landis.toml");
    const auto out = run_experiment(cfg, tmp_opts("landis"));
    CHECK(out.passed);
    CHECK(fs::exists(out.dir / "decay_demo.csv"));
    CHECK(fs::exists(out.dir / "gronwall_sweep.csv"));
}

TEST_CASE("convergence study enforces the ratio window") {
    // reference: (1 - cosh(2(x-1/2))/cosh(1))/4 spelled with exp
    const Config cfg = Config::parse(R"(
kind = convergence_study
[domain]
kind = interval
[coefficients]
v = 4
f = 1
[convergence]
h_values = [0.004, 0.002, 0.001]
reference = 0.25 * (1 - (exp(2*(x - 0.5)) + exp(-2*(x - 0.5))) / (exp(1) + exp(-1)))
)",
                                     "conv.toml");
    const auto out = run_experiment(cfg, tmp_opts("conv"));
    CHECK(out.passed);
    CHECK(fs::exists(out.dir / "convergence.csv"));
}

TEST_CASE("unknown experiment kind is a config error") {
    const Config cfg = Config::parse("kind = frobnicate\n", "k.toml");
    CHECK_THROWS_AS(run_experiment(cfg, tmp_opts("k")), ConfigError);
}
