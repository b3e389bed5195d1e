#pragma once

// Experiment runners behind the command line: seeded parallel ensembles
// with ordered, resumable NDJSON output, CSV summaries, cross-model
// comparison tables, and tidy plot-data emission.

#include <kpzlab/acceptance_mc.hpp>
#include <kpzlab/config.hpp>
#include <kpzlab/io.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace kpzlab {

namespace detail {

// Writes per-replica NDJSON lines in replica order with batched parallel
// generation; appends to <path>.partial and renames on completion, so an
// interrupted run resumes at the first missing replica.
class ResumableNdjson {
 public:
  ResumableNdjson(std::string path, std::uint64_t lines_per_replica)
      : path_(std::move(path)), per_(lines_per_replica) {}

  bool already_complete() const { return std::filesystem::exists(path_); }

  std::uint64_t resume_replica() const {
    return count_ndjson_lines(path_ + ".partial") / per_;
  }

  template <class Gen>
  void run(std::uint64_t replicas, int workers, Gen&& generate) {
    if (already_complete()) return;
    const std::uint64_t start = resume_replica();
    std::filesystem::create_directories(std::filesystem::path(path_).parent_path());
    std::ofstream out(path_ + ".partial", start == 0 ? std::ios::trunc : std::ios::app);
    if (!out) throw std::runtime_error("io: cannot open " + path_ + ".partial");
    constexpr std::uint64_t kBatch = 256;
    std::vector<std::vector<std::string>> lines(kBatch);
    for (std::uint64_t lo = start; lo < replicas; lo += kBatch) {
      const std::uint64_t hi = std::min(replicas, lo + kBatch);
      parallel_replicas(hi - lo, workers,
                        [&](std::uint64_t i) { lines[i] = generate(lo + i); });
      for (std::uint64_t i = 0; i < hi - lo; ++i) {
        for (const auto& l : lines[i]) out << l << '\n';
      }
      out.flush();
    }
    out.close();
    std::filesystem::rename(path_ + ".partial", path_);
  }

 private:
  std::string path_;
  std::uint64_t per_;
};

inline std::string json_line(const nlohmann::json& j) { return j.dump(); }

}  // namespace detail

// ---------------------------------------------------------------------------
// asep-ensemble: per-replica macroscopic fields at (T_list x X_list).
// ---------------------------------------------------------------------------
inline void run_asep_ensemble(const ExperimentConfig& cfg, const std::string& out_dir,
                              int workers) {
  for (double eps : cfg.epsilon_list) {
    const ScalingParams p = cfg.scaling(eps);
    const double T_max = cfg.T_list.back();
    const double t_end = T_max / (eps * eps);
    const double X_max = cfg.X_list.empty() ? 0.0 : *std::max_element(cfg.X_list.begin(),
                                                                      cfg.X_list.end());
    const AsepInit init = cfg.init == "empty"     ? AsepInit::kEmpty
                          : cfg.init == "full"    ? AsepInit::kFull
                                                  : AsepInit::kBernoulliHalf;
    const int L = p.is_interval()
                      ? p.N
                      : (init == AsepInit::kEmpty
                             ? std::max(narrow_wedge_window(t_end),
                                        static_cast<int>(X_max / eps) + 2)
                             : bernoulli_window(eps, X_max, t_end));
    const GartnerNormalization norm = (init == AsepInit::kEmpty)
                                          ? GartnerNormalization::kNarrowWedge
                                          : GartnerNormalization::kStandard;
    std::ostringstream tag;
    tag << "asep_eps" << eps;
    const std::string base = out_dir + "/" + tag.str();
    const std::string hash = cfg.hash_hex();

    detail::ResumableNdjson writer(base + "_replicas.ndjson", cfg.T_list.size());
    std::vector<std::vector<std::vector<double>>> summaries_z;  // [T][X] values appended later
    writer.run(cfg.replicas, workers, [&](std::uint64_t r) {
      AsepState s(p, init, L, cfg.seed, r);
      std::vector<std::string> lines;
      for (double T : cfg.T_list) {
        s.run_until(T / (eps * eps));
        const int x_need =
            p.is_interval() ? p.N : std::min(L - 1, static_cast<int>(X_max / eps) + 2);
        const auto f = gartner_field(s, norm, x_need);
        std::vector<double> Z, H;
        for (double X : cfg.X_list) {
          Z.push_back(macroscopic_value(f, p, X));
          H.push_back(height_process_H(s, T, X, norm == GartnerNormalization::kNarrowWedge));
        }
        lines.push_back(detail::json_line(replica_record(hash, r, T, cfg.X_list, Z, H)));
      }
      if (static_cast<int>(r) < cfg.event_log_replicas) {
        // Re-run with an event recorder for the diagnostic log.
        AsepState s2(p, init, L, cfg.seed, r);
        std::vector<AsepEventRecord> events;
        AsepEventRecord ev;
        while (s2.clock() < t_end) {
          if (!s2.step(t_end, &ev)) break;
          events.push_back(ev);
        }
        write_event_log(base + "_events_" + std::to_string(r) + ".bin", events);
      }
      return lines;
    });

    // Summary CSV from the completed NDJSON.
    std::ifstream in(base + "_replicas.ndjson");
    std::map<std::pair<double, double>, Summary> cells;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      const double T = j.at("T").get<double>();
      const auto X = j.at("X_grid").get<std::vector<double>>();
      const auto Z = j.at("Z_values").get<std::vector<double>>();
      for (std::size_t i = 0; i < X.size(); ++i) cells[{T, X[i]}].add(Z[i]);
    }
    CsvWriter csv(base + "_summary.csv", {"T", "X", "mean", "variance", "count", "se"});
    for (const auto& [key, s] : cells) {
      csv.row_values({key.first, key.second, s.mean(), s.var(),
                      static_cast<double>(s.n), s.se()});
    }
    csv.commit();
  }
}

// ---------------------------------------------------------------------------
// she-ensemble: trajectories of the lattice scheme.
// ---------------------------------------------------------------------------
inline SheGrid she_grid_from_config(const ExperimentConfig& cfg) {
  const double dx = cfg.she_dx;
  const double dt = cfg.she_dt > 0.0 ? cfg.she_dt : dx * dx / 2.0;
  if (cfg.geometry == Geometry::kInterval) {
    return SheGrid(cfg.A, cfg.B.value_or(0.0), 1.0, dx, dt);
  }
  double x_top = cfg.she_x_top;
  if (x_top <= 0.0) {
    const double X_max = cfg.X_list.empty() ? 0.0 : *std::max_element(cfg.X_list.begin(),
                                                                      cfg.X_list.end());
    x_top = dx * std::ceil((X_max + 8.0 * std::sqrt(cfg.T_list.back()) + 1.0) / dx);
  }
  return SheGrid(cfg.A, 0.0, x_top, dx, dt);
}

inline void run_she_ensemble_cmd(const ExperimentConfig& cfg, const std::string& out_dir,
                                 int workers) {
  const SheGrid grid = she_grid_from_config(cfg);
  const Eigen::VectorXd Z0 = cfg.init == "empty"
                                 ? grid.delta0()
                                 : Eigen::VectorXd::Ones(grid.sites()).eval();
  if (cfg.init == "bernoulli") {
    throw std::invalid_argument("she-ensemble: init must be 'empty' (delta) or 'full' (ones)");
  }
  const std::string base = out_dir + "/she";
  const std::string hash = cfg.hash_hex();

  detail::ResumableNdjson writer(base + "_replicas.ndjson", cfg.T_list.size());
  writer.run(cfg.replicas, workers, [&](std::uint64_t r) {
    const auto traj = she_solve(grid, Z0, cfg.T_list, cfg.seed, r);
    std::vector<std::string> lines;
    for (std::size_t j = 0; j < traj.times.size(); ++j) {
      std::vector<double> vals;
      for (double X : cfg.X_list) {
        const int site = static_cast<int>(std::lround(X / grid.dx()));
        vals.push_back(traj.fields[j](std::min(std::max(site, 0), grid.sites() - 1)));
      }
      nlohmann::json j2;
      j2["config_hash"] = hash;
      j2["seed"] = r;
      j2["T"] = traj.times[j];
      j2["X_grid"] = cfg.X_list;
      j2["values"] = vals;
      lines.push_back(detail::json_line(j2));
    }
    return lines;
  });

  // Oracle fields as CSV.
  CsvWriter csv(base + "_oracle.csv", {"T", "X", "first_moment", "second_moment_exact"});
  for (double T : cfg.T_list) {
    const Eigen::VectorXd m = she_first_moment(grid, Z0, T);
    const Eigen::MatrixXd M = she_exact_second_moment(grid, Z0, T);
    for (int x = 0; x < grid.sites(); ++x) {
      csv.row_values({T, grid.X(x), m(x), M(x, x)});
    }
  }
  csv.commit();
}

// ---------------------------------------------------------------------------
// goe: edge samples, Laplace products, long-time table.
// ---------------------------------------------------------------------------
inline void run_goe_cmd(const ExperimentConfig& cfg, const std::string& out_dir, int workers) {
  const auto sample = sample_goe_edge(cfg.goe_n, cfg.goe_k, cfg.replicas, cfg.seed, workers);
  const std::string base = out_dir + "/goe";
  {
    CsvWriter csv(base + "_samples.csv", {"replica", "i", "a"});
    for (std::uint64_t r = 0; r < sample.replicas; ++r) {
      for (int i = 0; i < sample.k; ++i) {
        csv.row_values({static_cast<double>(r), static_cast<double>(i), sample.a(r, i)});
      }
    }
    csv.commit();
  }
  {
    CsvWriter csv(base + "_laplace.csv", {"xi", "T", "estimate", "mc_error", "truncation_low"});
    for (double xi : cfg.goe_xi_list) {
      for (double T : cfg.T_list) {
        const auto p = laplace_product(sample, xi, T);
        csv.row_values({xi, T, p.estimate, p.mc_error, p.truncation_low});
      }
    }
    csv.commit();
  }
  {
    const auto rows = longtime_limit_table(sample, cfg.goe_x, {8.0, 64.0, 512.0},
                                           cfg.goe_xi_list.empty() ? 1.0 : cfg.goe_xi_list[0]);
    const auto cdf = goe_cdf(sample, cfg.goe_x);
    CsvWriter csv(base + "_longtime.csv",
                  {"T", "value", "mc_error", "empirical_cdf", "cdf_ci", "gap"});
    for (const auto& row : rows) {
      csv.row_values({row.T, row.value, row.mc_error, cdf.value, cdf.ci_halfwidth,
                      row.gap_to_cdf});
    }
    csv.commit();
  }
}

// ---------------------------------------------------------------------------
// compare: particle system vs lattice SHE (distance table), or SHE vs the
// edge-statistics product formula.
// ---------------------------------------------------------------------------
inline int run_compare_asep_she(const ExperimentConfig& asep_cfg, const ExperimentConfig& she_cfg,
                                const std::string& out_dir, int workers) {
  if (asep_cfg.geometry != she_cfg.geometry || asep_cfg.A != she_cfg.A) {
    throw std::invalid_argument("compare: mismatched panels (geometry or A)");
  }
  if (asep_cfg.T_list != she_cfg.T_list || asep_cfg.X_list != she_cfg.X_list) {
    throw std::invalid_argument("compare: mismatched panels (T_list or X_list)");
  }
  const double T = asep_cfg.T_list.back();
  const double X = asep_cfg.X_list.back();
  std::vector<double> she_samples;
  const auto rep = narrow_wedge_trend(asep_cfg.A, T, X, asep_cfg.replicas, asep_cfg.seed,
                                      workers, she_cfg.she_dx, &she_samples);
  CsvWriter csv(out_dir + "/compare_asep_she.csv", {"epsilon", "T", "X", "metric", "value"});
  bool mean_trend = true, ks_trend = true;
  for (std::size_t i = 0; i < rep.eps.size(); ++i) {
    csv.row_values({rep.eps[i], T, X, 0.0, rep.mean_gap[i]});
    csv.row_values({rep.eps[i], T, X, 1.0, rep.ks[i]});
    if (i > 0 && rep.mean_gap[i] >= rep.mean_gap[i - 1]) mean_trend = false;
    if (i > 0 && rep.ks[i] >= rep.ks[i - 1]) ks_trend = false;
  }
  csv.commit();
  std::cout << "mean-gap trend decreasing: " << (mean_trend ? "yes" : "NO") << '\n';
  std::cout << "KS trend decreasing: " << (ks_trend ? "yes" : "NO") << ", final KS = "
            << rep.ks.back() << '\n';
  return (mean_trend && ks_trend && rep.ks.back() < 0.1) ? 0 : 1;
}

inline int run_compare_she_goe(const ExperimentConfig& she_cfg, const ExperimentConfig& goe_cfg,
                               const std::string& out_dir, int workers) {
  McProfile prof;
  prof.replicas = std::min(she_cfg.replicas, goe_cfg.replicas);
  prof.workers = workers;
  prof.seed = she_cfg.seed;
  const auto checks = criterion_goe(prof);
  CsvWriter csv(out_dir + "/compare_she_goe.csv", {"check", "statistic", "tolerance", "pass"});
  int rc = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    csv.row({std::to_string(i), format_double(checks[i].statistic),
             format_double(checks[i].tolerance), checks[i].pass ? "1" : "0"});
    if (!checks[i].pass) rc = 1;
  }
  csv.commit();
  return rc;
}

// ---------------------------------------------------------------------------
// kernel-verify: export kernel tables, the Robin spectrum, a continuum
// slice, and the full scaling-constant record for the configured model.
// ---------------------------------------------------------------------------
inline nlohmann::json scaling_json(const ScalingParams& s) {
  nlohmann::json j;
  j["epsilon"] = s.epsilon;
  j["A"] = s.A;
  if (s.B) j["B"] = *s.B;
  j["geometry"] = s.is_interval() ? "interval" : "half-line";
  if (s.is_interval()) j["N"] = s.N;
  j["p"] = s.p;
  j["q"] = s.q;
  j["mu_A"] = s.mu_A;
  if (s.B) j["mu_B"] = s.mu_B;
  j["alpha"] = s.alpha;
  j["gamma"] = s.gamma;
  if (s.B) {
    j["beta"] = s.beta;
    j["delta"] = s.delta;
  }
  j["lambda"] = s.lambda;
  j["nu"] = s.nu;
  j["rho_norm"] = s.rho_norm;
  j["valid_epsilon_max"] = s.valid_epsilon_max;
  return j;
}

inline void export_kernel_tables(const ExperimentConfig& cfg, const std::string& out_dir) {
  const double eps = cfg.epsilon_list.front();
  const ScalingParams p = cfg.scaling(eps);
  {
    AtomicFileWriter w(out_dir + "/scaling.json");
    w.line(scaling_json(p).dump(2));
    w.commit();
  }
  // Kernel table over a small (t,x,y) grid by every applicable route.
  {
    CsvWriter csv(out_dir + "/kernel_table.csv", {"t", "x", "y", "value", "route"});
    const std::vector<double> ts{0.5, 2.0, 8.0};
    if (p.is_interval()) {
      const int N = p.N;
      auto sp = shared_spectrum(N, p.mu_A, p.mu_B);
      const int K = suggest_interval_K(N, 8.0, 1e-10, p.A, p.B.value_or(0.0));
      IntervalImageKernel rec(N, p.mu_A, p.mu_B, K);
      for (double t : ts) {
        for (int x = 0; x <= N; x += std::max(1, N / 4)) {
          for (int y = 0; y <= N; y += std::max(1, N / 4)) {
            csv.row({format_double(t), std::to_string(x), std::to_string(y),
                     format_double(sp->value(t, x, y)), "spectral"});
            csv.row({format_double(t), std::to_string(x), std::to_string(y),
                     format_double(rec.value(t, x, y, 1e-9)), "image-recursion"});
          }
        }
      }
    } else {
      HalfLineKernel k(p.mu_A);
      for (double t : ts) {
        for (int x : {0, 2, 6}) {
          for (int y : {0, 3, 9}) {
            csv.row({format_double(t), std::to_string(x), std::to_string(y),
                     format_double(k.value(t, x, y)), "image-series"});
            csv.row({format_double(t), std::to_string(x), std::to_string(y),
                     format_double(halfline_ode_oracle(t, x, y, p.mu_A)), "ode-oracle"});
          }
        }
      }
    }
    csv.commit();
  }
  // Spectrum export (interval form; half-line configs use a reference N).
  {
    const int N = p.is_interval() ? p.N : 64;
    const double muB = p.is_interval() ? p.mu_B : 1.0;
    RobinSpectrum sp(N, p.mu_A, muB);
    const auto bands = sp.bulk_bands();
    CsvWriter csv(out_dir + "/spectrum.csv",
                  {"k", "lambda", "omega_bracket_lo", "omega_bracket_hi"});
    for (int k = 0; k < sp.size(); ++k) {
      const double om = sp.omega(k);
      double lo = std::nan(""), hi = std::nan("");
      if (!std::isnan(om)) {
        for (const auto& b : bands) {
          if (om >= b.omega_lo - 1e-12 && om <= b.omega_hi + 1e-12) {
            lo = b.omega_lo;
            hi = b.omega_hi;
            break;
          }
        }
      }
      csv.row_values({static_cast<double>(k), sp.lambda(k), lo, hi});
    }
    csv.commit();
  }
  // Continuum slice with extrapolation error estimates.
  {
    auto ck = p.is_interval() ? ContinuumKernel::interval(p.A, p.B.value_or(0.0), 8, 3)
                              : ContinuumKernel::half_line(p.A, 0.125, 3);
    CsvWriter csv(out_dir + "/continuum_slice.csv", {"T", "X", "Y", "value", "error_estimate"});
    const double top = p.is_interval() ? 1.0 : 1.5;
    for (double T : {0.25, 0.5}) {
      for (double X = 0.0; X <= top + 1e-9; X += top / 6.0) {
        for (double Y = 0.0; Y <= top + 1e-9; Y += top / 6.0) {
          const auto v = ck(T, X, Y);
          csv.row_values({T, X, Y, v.value, v.error});
        }
      }
    }
    csv.commit();
  }
}

// ---------------------------------------------------------------------------
// plotdata: NDJSON records -> tidy CSV (one observation per row).
// ---------------------------------------------------------------------------
inline void emit_plot_data(const std::string& records_path, const std::string& kind,
                           const std::string& out_path) {
  if (kind != "samples" && kind != "summary") {
    throw std::invalid_argument("plotdata: kind must be 'samples' or 'summary'");
  }
  std::ifstream in(records_path);
  std::map<std::pair<double, double>, Summary> cells;
  CsvWriter samples(out_path, kind == "samples"
                                  ? std::vector<std::string>{"seed", "T", "X", "value"}
                                  : std::vector<std::string>{"T", "X", "mean", "se", "count"});
  std::string line;
  while (in && std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    const double T = j.at("T").get<double>();
    const auto X = j.at("X_grid").get<std::vector<double>>();
    const auto Z = j.contains("Z_values") ? j.at("Z_values").get<std::vector<double>>()
                                          : j.at("values").get<std::vector<double>>();
    for (std::size_t i = 0; i < X.size(); ++i) {
      if (kind == "samples") {
        samples.row_values({static_cast<double>(j.at("seed").get<std::uint64_t>()), T, X[i],
                            Z[i]});
      } else {
        cells[{T, X[i]}].add(Z[i]);
      }
    }
  }
  if (kind == "summary") {
    for (const auto& [key, s] : cells) {
      samples.row_values({key.first, key.second, s.mean(), s.se(),
                          static_cast<double>(s.n)});
    }
  }
  samples.commit();
}

}  // namespace kpzlab
