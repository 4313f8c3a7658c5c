#include <catch2/catch_amalgamated.hpp>

#include "gradbound/config.hpp"

using namespace gradbound;

namespace {

const char* kSample = R"cfg(
# elliptic sweep sample
kind = elliptic_bound

[domain]
kind = interval
a = 0
b = 1

[grid]
h = 0.001

[coefficients]
random = true
k_max = 3
f_max = 2.0

[sweep]
count = 50
seed = 7

[parabolic]
snapshots = [0.05, 0.1]
phi0 = "sin(pi*x)"
)cfg";

}

TEST_CASE("config parses sections, types, arrays, comments") {
    const Config cfg = Config::parse(kSample, "sample.toml");
    CHECK(cfg.text("kind") == "elliptic_bound");
    CHECK(cfg.text("domain.kind") == "interval");
    CHECK(cfg.number("domain.b") == 1.0);
    CHECK(cfg.number("grid.h") == 0.001);
    CHECK(cfg.flag_or("coefficients.random", false));
    CHECK(cfg.number("sweep.count") == 50.0);
    const auto snaps = cfg.numbers("parabolic.snapshots");
    REQUIRE(snaps.size() == 2);
    CHECK(snaps[1] == 0.1);
    CHECK(cfg.text("parabolic.phi0") == "sin(pi*x)");
    CHECK(cfg.number_or("missing.key", 42.0) == 42.0);
    CHECK_FALSE(cfg.has("nope"));
}

TEST_CASE("config errors carry file and line information") {
    try {
        Config::parse("[unterminated\n", "bad.toml");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("bad.toml:1") != std::string::npos);
    }
    try {
        Config::parse("key value\n", "bad.toml");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("bad.toml:1") != std::string::npos);
    }
    const Config cfg = Config::parse("[grid]\nh = -0.001\n", "neg.toml");
    try {
        cfg.positive("grid.h");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        CHECK(what.find("neg.toml:2") != std::string::npos);
        CHECK(what.find("grid.h") != std::string::npos);
    }
}

TEST_CASE("missing required fields are named") {
    const Config cfg = Config::parse("[a]\nb = 1\n");
    try {
        cfg.number("a.c");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("a.c") != std::string::npos);
    }
}

TEST_CASE("entries echo preserves file order for the manifest") {
    const Config cfg = Config::parse("z = 1\n[s]\na = 2\nb = three\n");
    const auto entries = cfg.entries();
    REQUIRE(entries.size() == 3);
    CHECK(entries[0].first == "z");
    CHECK(entries[1].first == "s.a");
    CHECK(entries[2].first == "s.b");
    CHECK(entries[2].second == "three");
}
