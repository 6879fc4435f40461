#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "coagfrag/config.hpp"
#include "coagfrag/errors.hpp"
#include "coagfrag/runner.hpp"
#include "coagfrag/simd/kernels.hpp"

namespace cr = coagfrag::runner;

namespace {

struct Source {
  std::string config;
  std::string fixture;
};

void add_source(CLI::App* cmd, Source& src) {
  auto* c = cmd->add_option("--config", src.config, "scenario JSON file");
  auto* f = cmd->add_option("--fixture", src.fixture, "built-in oracle fixture");
  c->excludes(f);
  f->excludes(c);
}

coagfrag::ScenarioConfig load(const Source& src) {
  if (!src.fixture.empty()) return coagfrag::fixture_config(src.fixture);
  if (src.config.empty()) throw coagfrag::ConfigError("need --config or --fixture");
  return coagfrag::load_config(src.config);
}

std::optional<std::string> opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sectional solver for coagulation with multiple fragmentation"};
  app.require_subcommand(1);
  std::string simd_level = "auto";
  app.add_option("--simd", simd_level, "kernel set: scalar, avx2, neon or auto")
      ->check(CLI::IsMember({"scalar", "avx2", "neon", "auto"}));

  Source run_src;
  std::string run_out;
  bool strict = false;
  auto* run = app.add_subcommand("run", "evolve a scenario and write its artifacts");
  add_source(run, run_src);
  run->add_option("--out", run_out, "output directory (overrides the config)");
  run->add_flag("--strict-hypotheses", strict, "abort with exit 3 when the audit fails");

  Source chk_src;
  std::string chk_out;
  auto* chk = app.add_subcommand("check-hypotheses", "audit the kernel and fragmentation");
  add_source(chk, chk_src);
  chk->add_option("--out", chk_out, "write the JSON report here instead of stdout");

  std::string mom_dir;
  std::vector<std::string> mom_files;
  std::vector<double> mom_times;
  std::vector<double> mom_orders;
  std::string mom_out;
  auto* mom = app.add_subcommand("moments", "recompute moments from density CSVs");
  mom->add_option("--run-dir", mom_dir, "directory written by run");
  mom->add_option("files", mom_files, "density CSV files");
  mom->add_option("--times", mom_times, "one time per file")->delimiter(',');
  mom->add_option("--orders", mom_orders, "extra moment orders")->delimiter(',');
  mom->add_option("--out", mom_out, "write the CSV here instead of stdout");

  Source cmp_src;
  std::string cmp_out;
  std::vector<std::size_t> levels;
  auto* cmp = app.add_subcommand("compare", "Gronwall stability trace and refinement study");
  add_source(cmp, cmp_src);
  cmp->add_option("--out", cmp_out, "output directory");
  cmp->add_option("--levels", levels, "cell counts, e.g. 64,128,256")->delimiter(',');

  double mu = 0, nu = 0, rho0 = 1, delta = 0.5;
  auto* lad = app.add_subcommand("ladder", "moment integrability ladder");
  lad->add_option("--mu", mu)->required();
  lad->add_option("--nu", nu)->required();
  lad->add_option("--rho0", rho0);
  lad->add_option("--delta", delta);

  std::string emit;
  auto* orc = app.add_subcommand("oracles", "list the analytic fixtures");
  orc->add_option("--emit", emit, "write fixture configs to this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cr::kExitConfig;
  }

  const int simd_status = cr::guarded([&] {
    coagfrag::simd::select(coagfrag::simd::parse_level(simd_level));
    return 0;
  }, std::cerr);
  if (simd_status != 0) return simd_status;

  auto& out = std::cout;
  auto& err = std::cerr;
  if (*run) {
    return cr::guarded([&] { return cr::run(load(run_src), opt(run_out), strict, out, err); }, err);
  }
  if (*chk) {
    return cr::guarded([&] { return cr::check_hypotheses(load(chk_src), opt(chk_out), out, err); },
                       err);
  }
  if (*mom) return cr::moments(opt(mom_dir), mom_files, mom_times, mom_orders, opt(mom_out), out, err);
  if (*cmp) {
    return cr::guarded([&] { return cr::compare(load(cmp_src), opt(cmp_out), levels, out, err); },
                       err);
  }
  if (*lad) return cr::ladder(mu, nu, rho0, delta, out);
  if (*orc) return cr::oracles(opt(emit), out);
  return cr::kExitConfig;
}
