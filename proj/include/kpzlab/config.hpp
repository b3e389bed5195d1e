#pragma once

// Experiment configuration: one JSON document with a versioned schema.
// The canonical dump (sorted keys, round-trip float formatting) is hashed
// into a 64-bit digest that every persisted record carries.

#include <kpzlab/scaling.hpp>

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace kpzlab {

enum class ExperimentKind {
  kKernelVerify,
  kAsepEnsemble,
  kSheEnsemble,
  kGoe,
  kCompareAsepShe,
  kCompareSheGoe,
};

inline std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kKernelVerify: return "kernel-verify";
    case ExperimentKind::kAsepEnsemble: return "asep-ensemble";
    case ExperimentKind::kSheEnsemble: return "she-ensemble";
    case ExperimentKind::kGoe: return "goe";
    case ExperimentKind::kCompareAsepShe: return "compare-asep-she";
    case ExperimentKind::kCompareSheGoe: return "compare-she-goe";
  }
  return "?";
}

struct ExperimentConfig {
  int version = 1;
  ExperimentKind kind = ExperimentKind::kKernelVerify;
  Geometry geometry = Geometry::kHalfLine;
  std::vector<double> epsilon_list{0.05};
  double A = 0.0;
  std::optional<double> B;
  std::string init = "empty";  // empty | bernoulli | full
  std::vector<double> T_list{0.5};
  std::vector<double> X_list{0.2};
  std::uint64_t replicas = 1000;
  std::uint64_t seed = 1;
  int workers = 0;  // 0 = hardware
  std::string out_dir = "out";
  int event_log_replicas = 0;

  // SHE grid block.
  double she_dx = 0.05;
  double she_dt = 0.0;  // 0 => dx^2/2
  double she_x_top = 0.0;  // 0 => automatic from T and X lists

  // GOE block.
  int goe_n = 1000;
  int goe_k = 32;
  std::vector<double> goe_xi_list{0.5, 1.0, 2.0};
  double goe_x = 0.0;

  std::string tolerance_profile = "default";

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["version"] = version;
    j["kind"] = to_string(kind);
    j["geometry"] = geometry == Geometry::kInterval ? "interval" : "half-line";
    j["epsilon_list"] = epsilon_list;
    j["A"] = A;
    if (B) j["B"] = *B;
    j["init"] = init;
    j["T_list"] = T_list;
    j["X_list"] = X_list;
    j["replicas"] = replicas;
    j["seed"] = seed;
    j["out_dir"] = out_dir;
    if (event_log_replicas > 0) j["event_log_replicas"] = event_log_replicas;
    j["she"] = {{"dx", she_dx}, {"dt", she_dt}, {"x_top", she_x_top}};
    j["goe"] = {{"n", goe_n}, {"k", goe_k}, {"xi_list", goe_xi_list}, {"x", goe_x}};
    j["tolerance_profile"] = tolerance_profile;
    return j;
  }

  static ExperimentConfig from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    try {
      c.version = j.at("version").get<int>();
      if (c.version != 1) throw std::invalid_argument("config: unsupported version");
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == "kernel-verify") c.kind = ExperimentKind::kKernelVerify;
      else if (kind == "asep-ensemble") c.kind = ExperimentKind::kAsepEnsemble;
      else if (kind == "she-ensemble") c.kind = ExperimentKind::kSheEnsemble;
      else if (kind == "goe") c.kind = ExperimentKind::kGoe;
      else if (kind == "compare-asep-she") c.kind = ExperimentKind::kCompareAsepShe;
      else if (kind == "compare-she-goe") c.kind = ExperimentKind::kCompareSheGoe;
      else throw std::invalid_argument("config: unknown kind '" + kind + "'");
      if (j.contains("geometry")) {
        const std::string g = j.at("geometry").get<std::string>();
        if (g == "interval") c.geometry = Geometry::kInterval;
        else if (g == "half-line") c.geometry = Geometry::kHalfLine;
        else throw std::invalid_argument("config: unknown geometry '" + g + "'");
      }
      if (j.contains("epsilon_list")) {
        c.epsilon_list = j.at("epsilon_list").get<std::vector<double>>();
      } else if (j.contains("epsilon")) {
        c.epsilon_list = {j.at("epsilon").get<double>()};
      }
      if (j.contains("A")) c.A = j.at("A").get<double>();
      if (j.contains("B")) c.B = j.at("B").get<double>();
      if (j.contains("init")) c.init = j.at("init").get<std::string>();
      if (j.contains("T_list")) c.T_list = j.at("T_list").get<std::vector<double>>();
      if (j.contains("X_list")) c.X_list = j.at("X_list").get<std::vector<double>>();
      if (j.contains("replicas")) c.replicas = j.at("replicas").get<std::uint64_t>();
      if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
      if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
      if (j.contains("event_log_replicas")) {
        c.event_log_replicas = j.at("event_log_replicas").get<int>();
      }
      if (j.contains("she")) {
        const auto& s = j.at("she");
        if (s.contains("dx")) c.she_dx = s.at("dx").get<double>();
        if (s.contains("dt")) c.she_dt = s.at("dt").get<double>();
        if (s.contains("x_top")) c.she_x_top = s.at("x_top").get<double>();
      }
      if (j.contains("goe")) {
        const auto& g = j.at("goe");
        if (g.contains("n")) c.goe_n = g.at("n").get<int>();
        if (g.contains("k")) c.goe_k = g.at("k").get<int>();
        if (g.contains("xi_list")) c.goe_xi_list = g.at("xi_list").get<std::vector<double>>();
        if (g.contains("x")) c.goe_x = g.at("x").get<double>();
      }
      if (j.contains("tolerance_profile")) {
        c.tolerance_profile = j.at("tolerance_profile").get<std::string>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
  }

  static ExperimentConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(std::string("config: parse error: ") + e.what());
    }
    return from_json(j);
  }

  void validate() const {
    for (double e : epsilon_list) {
      if (!(e > 0.0)) throw std::invalid_argument("config: epsilon must be positive");
      if (geometry == Geometry::kInterval) {
        const double N = 1.0 / e;
        if (std::abs(N - std::lround(N)) > 1e-9) {
          throw std::invalid_argument("config: interval epsilon must be 1/N");
        }
      }
    }
    if (geometry == Geometry::kInterval && !B) {
      throw std::invalid_argument("config: interval geometry needs B");
    }
    if (init != "empty" && init != "bernoulli" && init != "full") {
      throw std::invalid_argument("config: unknown init '" + init + "'");
    }
    if (T_list.empty()) throw std::invalid_argument("config: T_list empty");
    for (std::size_t i = 1; i < T_list.size(); ++i) {
      if (T_list[i] <= T_list[i - 1]) {
        throw std::invalid_argument("config: T_list must be increasing");
      }
    }
  }

  // Canonical form: the sorted-key dump of to_json().
  std::string canonical() const { return to_json().dump(); }
  std::uint64_t hash() const {
    // FNV-1a 64.
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : canonical()) {
      h ^= ch;
      h *= 1099511628211ull;
    }
    return h;
  }
  std::string hash_hex() const {
    std::ostringstream os;
    os << std::hex << hash();
    return os.str();
  }

  ScalingParams scaling(double epsilon) const {
    if (geometry == Geometry::kInterval) {
      return build_interval(static_cast<int>(std::lround(1.0 / epsilon)), A, B.value_or(0.0));
    }
    return build_half_line(epsilon, A);
  }
};

}  // namespace kpzlab
