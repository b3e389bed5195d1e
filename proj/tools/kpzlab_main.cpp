// Command-line entry point: run experiments from JSON configs, execute
// verification suites, compare models, and export tidy plot data.
//
// Exit codes: 0 = success / all checks passed, 1 = a check failed,
// 2 = configuration or usage error.

#include <kpzlab/config.hpp>
#include <kpzlab/labruns.hpp>
#include <kpzlab/verify.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

namespace {

std::string resolve_out_dir(const std::string& flag_out, const std::string& cfg_out) {
  if (!flag_out.empty()) return flag_out;
  if (const char* env = std::getenv("KPZLAB_OUT")) {
    if (env[0] != '\0') return std::string(env) + "/" + cfg_out;
  }
  return cfg_out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kpzlab: open ASEP / stochastic heat equation laboratory"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may appear after the subcommand

  std::string out_flag;
  int workers = 0;
  std::uint64_t seed_flag = 0;
  bool seed_set = false;
  std::string profile = "default";
  app.add_option("--out", out_flag, "output root (overrides config and KPZLAB_OUT)");
  app.add_option("--workers", workers, "worker threads (default: hardware)");
  app.add_option("--seed", seed_flag, "master seed override")->each([&](std::string) {
    seed_set = true;
  });
  app.add_option("--tolerance-profile", profile, "verify profile: quick | default | full");

  std::string run_config, cmpA, cmpB, records, kind, suite = "all";
  auto* run = app.add_subcommand("run", "run the experiment described by a JSON config");
  run->add_option("config", run_config, "config path")->required();
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", suite, "kernel | asep | she | goe | all");
  auto* compare = app.add_subcommand("compare", "compare two experiment configs");
  compare->add_option("configA", cmpA)->required();
  compare->add_option("configB", cmpB)->required();
  auto* plot = app.add_subcommand("plotdata", "emit tidy CSV from an NDJSON record file");
  plot->add_option("records", records)->required();
  plot->add_option("kind", kind, "samples | summary")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      kpzlab::ExperimentConfig cfg = kpzlab::ExperimentConfig::load(run_config);
      if (seed_set) cfg.seed = seed_flag;
      const std::string out_dir = resolve_out_dir(out_flag, cfg.out_dir);
      std::cout << "config hash " << cfg.hash_hex() << ", writing to " << out_dir << '\n';
      switch (cfg.kind) {
        case kpzlab::ExperimentKind::kAsepEnsemble:
          kpzlab::run_asep_ensemble(cfg, out_dir, workers);
          break;
        case kpzlab::ExperimentKind::kSheEnsemble:
          kpzlab::run_she_ensemble_cmd(cfg, out_dir, workers);
          break;
        case kpzlab::ExperimentKind::kGoe:
          kpzlab::run_goe_cmd(cfg, out_dir, workers);
          break;
        case kpzlab::ExperimentKind::kKernelVerify: {
          kpzlab::export_kernel_tables(cfg, out_dir);
          const auto checks =
              kpzlab::run_suite("kernel", kpzlab::verify_profile(profile, workers));
          return kpzlab::print_report(checks, std::cout);
        }
        default:
          throw std::invalid_argument("run: use the compare subcommand for comparison kinds");
      }
      std::cout << "done\n";
      return 0;
    }
    if (verify->parsed()) {
      const auto checks = kpzlab::run_suite(suite, kpzlab::verify_profile(profile, workers));
      return kpzlab::print_report(checks, std::cout);
    }
    if (compare->parsed()) {
      kpzlab::ExperimentConfig a = kpzlab::ExperimentConfig::load(cmpA);
      kpzlab::ExperimentConfig b = kpzlab::ExperimentConfig::load(cmpB);
      const std::string out_dir = resolve_out_dir(out_flag, a.out_dir);
      if (a.kind == kpzlab::ExperimentKind::kAsepEnsemble ||
          a.kind == kpzlab::ExperimentKind::kCompareAsepShe) {
        return kpzlab::run_compare_asep_she(a, b, out_dir, workers);
      }
      return kpzlab::run_compare_she_goe(a, b, out_dir, workers);
    }
    if (plot->parsed()) {
      kpzlab::emit_plot_data(records, kind, records + "." + kind + ".csv");
      std::cout << "wrote " << records << "." << kind << ".csv\n";
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
