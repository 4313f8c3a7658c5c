#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gradbound/landis1d.hpp"
#include "gradbound/multiplier.hpp"
#include "gradbound/verify.hpp"
#include "gradbound/version.hpp"

namespace gradbound {

using json = nlohmann::ordered_json;

/// Fixed-format double rendering so CSV artifacts are byte-stable across
/// reruns with the same seed.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
        : out_(path) {
        if (!out_) throw std::runtime_error("cannot open " + path.string());
        for (std::size_t i = 0; i < header.size(); ++i)
            out_ << (i ? "," : "") << header[i];
        out_ << "\n";
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
    }

  private:
    std::ofstream out_;
};

template <int N>
json to_json(const ZScanReport<N>& rep) {
    json j;
    j["check"] = "two_point_nonpositivity";
    j["max_Z"] = rep.max_Z;
    j["tolerance"] = rep.tolerance;
    j["pass"] = rep.pass;
    j["pairs_scanned"] = rep.pairs_scanned;
    j["subsampled"] = rep.subsampled;
    j["lambda"] = rep.lambda;
    j["arg_x"] = std::vector<double>(rep.arg_x.begin(), rep.arg_x.end());
    j["arg_y"] = std::vector<double>(rep.arg_y.begin(), rep.arg_y.end());
    if (rep.epsilon > 0.0 || rep.time > 0.0) {
        j["epsilon"] = rep.epsilon;
        j["time"] = rep.time;
    }
    return j;
}

inline json to_json(const GradientBoundReport& rep) {
    json j;
    j["check"] = "gradient_bound";
    j["measured_sup_grad"] = rep.measured;
    j["explicit_path"] = rep.explicit_path;
    j["bound"] = rep.bound;
    j["c_eff"] = rep.c_eff;
    j["K"] = rep.K;
    j["M"] = rep.M;
    j["f_eff"] = rep.f_eff;
    j["diam"] = rep.diam;
    j["pass"] = rep.pass;
    return j;
}

inline json to_json(const ContinuationReport& rep) {
    json j;
    j["check"] = rep.boundary_mode ? "continuation_boundary" : "continuation_annulus";
    j["R"] = rep.R;
    j["inner_integral"] = rep.inner;
    j["outer_integral"] = rep.outer;
    j["c_req"] = rep.c_req;
    j["u_min"] = rep.u_min;
    j["K"] = rep.K;
    j["M"] = rep.M;
    if (rep.boundary_mode) {
        j["normal_derivative_max"] = rep.normal_derivative_max;
        j["normal_derivative_bound"] = rep.normal_derivative_bound;
        j["normal_derivative_pass"] = rep.normal_derivative_pass;
    }
    return j;
}

template <int N>
json to_json(const MultiplierResult<N>& mr) {
    json j;
    j["check"] = "multiplier_envelope";
    j["K"] = mr.K;
    j["M"] = mr.M;
    j["R"] = mr.R;
    j["psi2"] = mr.psi2;
    j["envelope_low_violation"] = mr.envelope_low_violation;
    j["envelope_high_violation"] = mr.envelope_high_violation;
    j["log_grad_sup_inner"] = mr.log_grad_sup_inner;
    j["c_eff"] = mr.c_eff;
    return j;
}

inline json to_json(const DualityReport& rep) {
    json j;
    j["check"] = "duality_identity";
    j["lhs_integral"] = rep.lhs;
    j["rhs_boundary_terms"] = rep.rhs;
    j["relative_residual"] = rep.residual;
    return j;
}

inline void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << j.dump(2) << "\n";
}

inline void write_manifest(const std::filesystem::path& dir, const std::string& spec_origin,
                           const std::vector<std::pair<std::string, std::string>>& entries,
                           std::uint64_t seed) {
    std::ofstream out(dir / "MANIFEST");
    if (!out) throw std::runtime_error("cannot open MANIFEST in " + dir.string());
    out << "tool: gradbound " << kVersion << "\n";
    out << "spec: " << spec_origin << "\n";
    out << "seed: " << seed << "\n";
    out << "resolved:\n";
    for (const auto& [k, v] : entries) out << "  " << k << " = " << v << "\n";
}

}  // namespace gradbound
