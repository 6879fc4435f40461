#include "coagfrag/runner.hpp"

#include <boost/version.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "coagfrag/errors.hpp"
#include "coagfrag/oracles.hpp"
#include "coagfrag/simd/kernels.hpp"

namespace coagfrag::runner {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write '" + path.string() + "'");
  os << content;
  os.close();
  if (!os) throw IoError("failed writing '" + path.string() + "'");
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

std::string density_file(std::size_t k) { return "density_t" + std::to_string(k) + ".csv"; }

std::string csv_row(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_number(v[i]);
  }
  return s + '\n';
}

std::string moments_header(const std::vector<double>& orders, bool fluxes) {
  std::string h = "t";
  for (double r : orders) h += "," + moment_label(r);
  h += ",xnorm";
  if (fluxes) h += ",overflow_cum,dust_cum";
  return h + '\n';
}

json verdict_json(const HypothesisVerdict& v) {
  return {{"verdict", std::string(to_string(v.verdict))}, {"basis", v.basis}, {"detail", v.detail}};
}

json constants_json(const HypothesisConstants& c) {
  return {{"k1", c.k1}, {"mu", c.mu}, {"m", c.m},
          {"lambda", c.lambda}, {"L_gamma", c.L_gamma}, {"nu", c.nu}};
}

// Everything a Gronwall comparison needs must be declared or derivable.
void require_gronwall_constants(const ResolvedConstants& rc, bool fragmentation) {
  std::vector<std::string> missing;
  for (const auto& name : rc.missing) {
    if (name == "k1" || name == "mu" || (fragmentation && name == "m")) missing.push_back(name);
  }
  if (missing.empty()) return;
  std::string msg = "compare needs the hypothesis constants";
  for (const auto& m : missing) msg += " " + m;
  msg += "; run check-hypotheses and declare them under \"hypotheses\"";
  for (const auto& n : rc.notes) msg += "\n  " + n;
  throw ConfigError(msg);
}

std::vector<double> table_xnorm_weights(const DensityTable& t) {
  std::vector<double> w(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) w[i] = (1.0 + t.pivot[i]) * (t.edge_hi[i] - t.edge_lo[i]);
  return w;
}

}  // namespace

std::vector<double> output_orders(const ScenarioConfig& cfg) {
  std::vector<double> extra{2.0};
  extra.insert(extra.end(), cfg.moment_orders.begin(), cfg.moment_orders.end());
  return MomentSeries(extra).orders();
}

RunArtifacts execute(const ScenarioConfig& cfg) {
  Scenario s = build_scenario(cfg);
  auto constants = resolve_constants(cfg.hypotheses, s.kernel, s.fragmentation);
  SamplePlan plan = cfg.audit;
  plan.seed = cfg.seed;
  auto rep = audit(s.kernel, s.fragmentation, constants.constants, plan);
  const auto orders = output_orders(cfg);
  const std::vector<double> extra(orders.begin() + 2, orders.end());
  return RunArtifacts{cfg, std::move(constants), std::move(rep),
                      evolve(*s.tables, s.initial, cfg.time.t_end, schedule_for(cfg.time),
                             cfg.time.controller, extra)};
}

std::string moments_csv(const RunReport& report) {
  const auto& orders = report.moments.orders();
  std::string s = moments_header(orders, true);
  for (std::size_t k = 0; k < report.snapshots.size(); ++k) {
    const auto& snap = report.snapshots[k];
    std::vector<double> row{snap.density.time()};
    for (std::size_t r = 0; r < orders.size(); ++r) row.push_back(report.moments.value(k, r));
    row.push_back(weighted_norm(snap.density));
    row.push_back(snap.overflow_cum);
    row.push_back(snap.dust_cum);
    s += csv_row(row);
  }
  return s;
}

json audit_json(const AuditReport& audit, const ResolvedConstants& constants) {
  json verdicts = json::object();
  for (const auto& v : audit.verdicts) verdicts[std::string(to_string(v.hypothesis))] = verdict_json(v);
  json witnesses = json::array();
  for (const auto& w : audit.witnesses) {
    witnesses.push_back({{"hypothesis", std::string(to_string(w.hypothesis))},
                         {"x", w.x},
                         {"y", w.y},
                         {"lhs", w.lhs},
                         {"rhs", w.rhs},
                         {"sample_index", w.sample_index}});
  }
  return {{"all_passed", audit.all_passed()},
          {"verdicts", verdicts},
          {"constants", constants_json(audit.constants)},
          {"constant_notes", constants.notes},
          {"witnesses", witnesses}};
}

json report_json(const RunArtifacts& a) {
  const auto& r = a.report;
  json mb = json::array();
  for (std::size_t k = 0; k < r.mass_balance.size(); ++k) {
    const auto& m = r.mass_balance[k];
    mb.push_back({{"t", m.t},
                  {"file", density_file(k)},
                  {"m1", m.m1},
                  {"overflow", m.overflow},
                  {"dust", m.dust},
                  {"relative_defect", m.relative_defect}});
  }
  const auto& st = r.steps;
  json steps = {{"accepted", st.accepted},
                {"error_rejections", st.error_rejections},
                {"positivity_clips_requested", st.positivity_clips_requested},
                {"rhs_evaluations", st.rhs_evaluations},
                {"dt_min", st.dt_min},
                {"dt_max", st.dt_max},
                {"max_error_estimate", st.max_error_estimate},
                {"number_defect_total", st.number_defect_total},
                {"max_mass_defect", r.max_mass_defect}};
  json versions = {{"coagfrag", kVersion},
                   {"simd", std::string(simd::level_name(simd::active().level))},
                   {"boost", BOOST_LIB_VERSION},
                   {"compiler", __VERSION__}};
  return {{"config", to_json(a.config)},
          {"audit", audit_json(a.audit, a.constants)},
          {"mass_balance", mb},
          {"steps", steps},
          {"versions", versions}};
}

void write_artifacts(const RunArtifacts& a, const fs::path& dir) {
  make_dir(dir);
  write_file(dir / "moments.csv", moments_csv(a.report));
  for (std::size_t k = 0; k < a.report.snapshots.size(); ++k) {
    std::ostringstream os;
    write_density_csv(os, a.report.snapshots[k].density);
    write_file(dir / density_file(k), os.str());
  }
  write_file(dir / "report.json", report_json(a).dump(2) + "\n");
}

std::string gronwall_csv(const GronwallTrace& trace) {
  std::string s = "t,u,phi,integral_phi,bound,margin,verdict\n";
  for (const auto& g : trace.samples) {
    std::vector<double> row{g.t, g.u, g.phi, g.integral_phi, g.bound, g.margin};
    std::string line = csv_row(row);
    line.pop_back();
    s += line + (g.ok ? ",ok\n" : ",violated\n");
  }
  return s;
}

json ladder_json(const LadderResult& r) {
  json j = {{"mu", r.mu},
            {"nu", r.nu},
            {"rho0", r.rho0},
            {"delta", r.delta},
            {"increment", r.increment},
            {"sequence", r.sequence},
            {"reason", r.reason == LadderTermination::kReachedThreshold ? "reached rho - mu >= 1"
                                                                         : "condition 1 + nu > mu violated"}};
  j["terminal"] = r.terminal ? json(*r.terminal) : json();
  return j;
}

int guarded(const std::function<int()>& fn, std::ostream& err) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const UnsupportedError& e) {
    err << "unsupported: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  }
}

int run(const ScenarioConfig& cfg, const std::optional<std::string>& out_dir, bool strict,
        std::ostream& out, std::ostream& err) {
  return guarded([&] {
    ScenarioConfig c = cfg;
    if (out_dir) c.output = *out_dir;
    if (strict) {
      // Audit before spending time on the run.
      Scenario s = build_scenario(c);
      const auto rc = resolve_constants(c.hypotheses, s.kernel, s.fragmentation);
      SamplePlan plan = c.audit;
      plan.seed = c.seed;
      const auto rep = audit(s.kernel, s.fragmentation, rc.constants, plan);
      if (!rep.all_passed()) {
        err << "hypothesis audit failed (strict mode):\n" << audit_json(rep, rc).dump(2) << '\n';
        return static_cast<int>(kExitHypotheses);
      }
    }
    const RunArtifacts a = execute(c);
    if (!a.audit.all_passed()) {
      err << "warning: hypotheses not satisfied:";
      for (const auto& v : a.audit.verdicts) {
        if (v.verdict == Verdict::kFail) err << ' ' << to_string(v.hypothesis);
      }
      err << " (advisory; see report.json)\n";
    }
    write_artifacts(a, c.output);
    const auto& st = a.report.steps;
    out << "wrote " << a.report.snapshots.size() << " snapshots to " << c.output << " ("
        << st.accepted << " steps, max mass defect " << a.report.max_mass_defect << ")\n";
    return static_cast<int>(kExitOk);
  }, err);
}

int check_hypotheses(const ScenarioConfig& cfg, const std::optional<std::string>& out_path,
                     std::ostream& out, std::ostream& err) {
  return guarded([&] {
    std::optional<CoagulationKernel> kernel;
    if (cfg.kernel) kernel = CoagulationKernel(*cfg.kernel);
    std::optional<FragmentationSpec> frag;
    if (cfg.fragmentation) frag = FragmentationSpec(*cfg.fragmentation);
    const auto rc = resolve_constants(cfg.hypotheses, kernel, frag);
    SamplePlan plan = cfg.audit;
    plan.seed = cfg.seed;
    const auto rep = audit(kernel, frag, rc.constants, plan);
    const std::string doc = audit_json(rep, rc).dump(2) + "\n";
    if (out_path) write_file(*out_path, doc);
    else out << doc;
    return static_cast<int>(rep.all_passed() ? kExitOk : kExitHypotheses);
  }, err);
}

int moments(const std::optional<std::string>& run_dir, const std::vector<std::string>& files,
            const std::vector<double>& times, const std::vector<double>& extra_orders,
            const std::optional<std::string>& out_path, std::ostream& out, std::ostream& err) {
  return guarded([&] {
    std::vector<std::string> paths;
    std::vector<double> ts;
    std::vector<double> overflow;
    std::vector<double> dust;
    std::vector<double> extra{2.0};
    if (run_dir) {
      const fs::path dir(*run_dir);
      std::ifstream in(dir / "report.json");
      if (!in) throw IoError("cannot open '" + (dir / "report.json").string() + "'");
      json rep;
      try {
        rep = json::parse(in);
      } catch (const json::exception& e) {
        throw IoError("malformed report.json: " + std::string(e.what()));
      }
      try {
        for (double r : rep.at("config").at("moment_orders")) extra.push_back(r);
        for (const auto& m : rep.at("mass_balance")) {
          paths.push_back((dir / m.at("file").get<std::string>()).string());
          ts.push_back(m.at("t").get<double>());
          overflow.push_back(m.at("overflow").get<double>());
          dust.push_back(m.at("dust").get<double>());
        }
      } catch (const json::exception& e) {
        throw IoError("report.json lacks run metadata: " + std::string(e.what()));
      }
    } else {
      if (files.empty()) throw ConfigError("moments needs --run-dir or density CSV files");
      if (times.size() != files.size()) {
        throw ConfigError("moments needs one --times entry per file");
      }
      paths = files;
      ts = times;
    }
    extra.insert(extra.end(), extra_orders.begin(), extra_orders.end());
    MomentSeries series(extra);
    const bool fluxes = static_cast<bool>(run_dir);
    std::string csv = moments_header(series.orders(), fluxes);
    for (std::size_t k = 0; k < paths.size(); ++k) {
      const DensityTable t = read_density_csv(paths[k]);
      const auto m = coagfrag::moments(t, series.orders());
      series.append(ts[k], m);
      std::vector<double> row{ts[k]};
      row.insert(row.end(), m.begin(), m.end());
      row.push_back(simd::weighted_abs_sum(table_xnorm_weights(t), t.value));
      if (fluxes) {
        row.push_back(overflow[k]);
        row.push_back(dust[k]);
      }
      csv += csv_row(row);
    }
    if (out_path) write_file(*out_path, csv);
    else out << csv;
    return static_cast<int>(kExitOk);
  }, err);
}

int compare(const ScenarioConfig& cfg, const std::optional<std::string>& out_dir,
            const std::vector<std::size_t>& levels, std::ostream& out, std::ostream& err) {
  return guarded([&] {
    const fs::path dir(out_dir ? *out_dir : cfg.output);
    Scenario s = build_scenario(cfg);
    const auto rc = resolve_constants(cfg.hypotheses, s.kernel, s.fragmentation);
    require_gronwall_constants(rc, s.fragmentation.has_value());
    const auto trace = gronwall_run(*s.tables, s.initial, cfg.compare.epsilon,
                                    parse_perturbation_shape(cfg.compare.shape), cfg.time.t_end,
                                    cfg.compare.samples, cfg.time.controller, rc.constants,
                                    cfg.compare.tau_disc);
    make_dir(dir);
    write_file(dir / "gronwall.csv", gronwall_csv(trace));
    bool ok = !trace.violated();
    out << "gronwall: " << (ok ? "ok" : "VIOLATED") << " over " << trace.samples.size()
        << " samples (L_frag = " << trace.L_frag << ")\n";

    const auto& lv = levels.empty() ? cfg.levels : levels;
    if (!lv.empty()) {
      const auto rep = refinement_consistency(
          [&](std::size_t n) {
            Scenario sn = build_scenario(cfg, n);
            return evolve(*sn.tables, sn.initial, cfg.time.t_end,
                          OutputSchedule::uniform(cfg.time.t_end, 1), cfg.time.controller)
                .final_density();
          },
          lv);
      std::string csv = "n_cells,distance_to_next,order\n";
      for (std::size_t k = 0; k < rep.levels.size(); ++k) {
        csv += std::to_string(rep.levels[k]) + ",";
        csv += k < rep.distances.size() ? format_number(rep.distances[k]) : "";
        csv += ",";
        csv += k < rep.orders.size() ? format_number(rep.orders[k]) : "";
        csv += "\n";
      }
      write_file(dir / "refinement.csv", csv);
      out << "refinement: " << (rep.decreasing ? "decreasing" : "NOT decreasing")
          << ", min order " << rep.min_order << "\n";
      ok = ok && rep.decreasing;
    }
    return static_cast<int>(ok ? kExitOk : kExitCheckFailed);
  }, err);
}

int ladder(double mu, double nu, double rho0, double delta, std::ostream& out) {
  return guarded([&] {
    LadderResult r;
    try {
      r = moment_ladder(mu, nu, rho0, delta);
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
    out << ladder_json(r).dump(2) << '\n';
    return static_cast<int>(kExitOk);
  }, out);
}

int oracles(const std::optional<std::string>& emit_dir, std::ostream& out) {
  return guarded([&] {
    for (const auto& f : oracles::fixtures()) out << f.name << "\t" << f.description << "\n";
    if (emit_dir) {
      make_dir(*emit_dir);
      for (const auto& f : oracles::fixtures()) {
        write_file(fs::path(*emit_dir) / (f.name + ".json"),
                   to_json(fixture_config(f.name)).dump(2) + "\n");
      }
    }
    return static_cast<int>(kExitOk);
  }, out);
}

}  // namespace coagfrag::runner
