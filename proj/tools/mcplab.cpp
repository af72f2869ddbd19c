// mcplab: command-line front end for the simulation laboratory.
//
// Exit codes: 0 success, 1 usage/configuration error, 2 verification failure,
// 3 resource exhaustion (budgets, tracking-window overflow).

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcp/block.hpp"
#include "mcp/errors.hpp"
#include "mcp/experiment.hpp"
#include "mcp/interface1d.hpp"
#include "mcp/meanfield.hpp"
#include "mcp/verify.hpp"

namespace {

mcp::ExperimentConfig load_config(const std::string& path) {
  nlohmann::json j;
  if (path == "-") {
    std::cin >> j;
  } else {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    in >> j;
  }
  return mcp::config_from_json(j);
}

std::unique_ptr<std::ostream> open_out(const std::string& path, bool binary = false) {
  if (path == "-") return nullptr;  // caller uses std::cout
  auto os = std::make_unique<std::ofstream>(path, binary ? std::ios::binary : std::ios::out);
  if (!*os) throw std::invalid_argument("cannot open output file: " + path);
  return os;
}

void write_trajectory_csv(const mcp::TrajectoryStats& ts, mcp::Site n_sites, std::ostream& os) {
  os << "time,n1,n2,frac1,frac2\n";
  double n = static_cast<double>(n_sites);
  for (std::size_t k = 0; k < ts.times.size(); ++k)
    os << ts.times[k] << ',' << ts.n1[k] << ',' << ts.n2[k] << ','
       << static_cast<double>(ts.n1[k]) / n << ',' << static_cast<double>(ts.n2[k]) / n << '\n';
}

void write_snapshot(const mcp::Configuration& c, const std::string& path) {
  if (c.geometry().dim() == 2) {
    auto os = open_out(path, true);
    mcp::write_pgm(c, os ? *os : std::cout);
    return;
  }
  auto os = open_out(path);
  std::ostream& out = os ? *os : std::cout;
  for (mcp::Site s = 0; s < c.geometry().size(); ++s)
    out << static_cast<int>(c.at(s));
  out << '\n';
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  if (out.empty()) throw std::invalid_argument("expected a comma-separated number list");
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"continuous-time lattice competition laboratory"};
  app.require_subcommand(1);

  // --- simulate ---------------------------------------------------------
  std::string sim_config, sim_out = "-", sim_snap_prefix;
  std::uint64_t sim_cell = 0, sim_rep = 0;
  auto* sim = app.add_subcommand("simulate", "run one replicate and emit its trajectory");
  sim->add_option("--config", sim_config, "JSON config file, or - for stdin")->required();
  sim->add_option("--out", sim_out, "trajectory CSV path, or - for stdout");
  sim->add_option("--snapshot-prefix", sim_snap_prefix,
                  "write configured snapshots to PREFIX<k>.pgm (2-D) or .txt");
  sim->add_option("--cell", sim_cell, "cell index folded into the replicate seed");
  sim->add_option("--rep", sim_rep, "replicate index folded into the replicate seed");

  // --- sweep ------------------------------------------------------------
  std::string sw_config, sw_param, sw_values, sw_param2, sw_values2, sw_csv = "-", sw_json;
  unsigned sw_threads = 0;
  auto* sw = app.add_subcommand("sweep", "grid sweep with per-cell outcome counts");
  sw->add_option("--config", sw_config, "JSON config file, or - for stdin")->required();
  sw->add_option("--param", sw_param, "first swept parameter name")->required();
  sw->add_option("--values", sw_values, "comma-separated values for --param")->required();
  sw->add_option("--param2", sw_param2, "optional second swept parameter");
  sw->add_option("--values2", sw_values2, "comma-separated values for --param2");
  sw->add_option("--out-csv", sw_csv, "per-cell CSV path, or - for stdout");
  sw->add_option("--out-json", sw_json, "full result JSON path");
  sw->add_option("--threads", sw_threads, "worker threads (default: MCPLAB_THREADS or cores)");

  // --- interface --------------------------------------------------------
  mcp::InterfaceParams ip;
  std::string if_out = "-";
  int if_reps = 1;
  auto* ifc = app.add_subcommand("interface", "two-front interface run from a step start");
  ifc->add_option("--lambda", ip.lambda, "base birth rate");
  ifc->add_option("--a11", ip.a11, "same-type boost for 1s");
  ifc->add_option("--a12", ip.a12, "cross boost for 1s");
  ifc->add_option("--a21", ip.a21, "cross boost for 2s");
  ifc->add_option("--a22", ip.a22, "same-type boost for 2s");
  ifc->add_option("--horizon", ip.horizon, "time horizon");
  ifc->add_option("--seed", ip.seed, "seed (replicate r uses a derived stream)");
  ifc->add_option("--window", ip.window_half_width, "tracking window half width");
  ifc->add_option("--reps", if_reps, "replicates; >1 reports the pooled drift estimate");
  ifc->add_option("--out", if_out, "trace CSV path for the first replicate, or - for stdout");

  // --- dual-check / couple-check ---------------------------------------
  double dc_scale = 1.0;
  auto* dc = app.add_subcommand("dual-check", "ancestry tracing and cone replay check");
  dc->add_option("--scale", dc_scale, "replication scale (1 = full)");
  double cc_scale = 1.0;
  auto* cc = app.add_subcommand("couple-check", "shared-randomness domination checks");
  cc->add_option("--scale", cc_scale, "replication scale (1 = full)");

  // --- bounds -----------------------------------------------------------
  double b_eps = 0.8, b_lambda = 2.0, b_a12 = 0, b_a21 = 0, b_a22 = 0, b_a11 = -1;
  int b_d = 1;
  std::uint64_t b_mc = 0, b_seed = 1;
  auto* bd = app.add_subcommand("bounds", "seeded-block window parameters and threshold");
  bd->add_option("--epsilon", b_eps, "failure budget in (0,1)");
  bd->add_option("--lambda", b_lambda, "base birth rate");
  bd->add_option("--d", b_d, "dimension");
  bd->add_option("--a12", b_a12, "cross payoff to 1s");
  bd->add_option("--a21", b_a21, "cross payoff to 2s");
  bd->add_option("--a22", b_a22, "self payoff to 2s");
  bd->add_option("--a11", b_a11, "self boost for the MC run (default: the threshold)");
  bd->add_option("--mc", b_mc, "Monte Carlo trials (0 = skip the simulation)");
  bd->add_option("--seed", b_seed, "MC seed");

  // --- snapshot ---------------------------------------------------------
  std::string sn_config, sn_out = "-";
  double sn_time = -1;
  std::uint64_t sn_rep = 0;
  auto* sn = app.add_subcommand("snapshot", "run one replicate and save the state at one time");
  sn->add_option("--config", sn_config, "JSON config file, or - for stdin")->required();
  sn->add_option("--time", sn_time, "capture time (default: the horizon)");
  sn->add_option("--rep", sn_rep, "replicate index");
  sn->add_option("--out", sn_out, "PGM (2-D) or digit-text path, or - for stdout");

  // --- verify -----------------------------------------------------------
  double v_scale = 1.0;
  std::string v_only;
  auto* vf = app.add_subcommand("verify", "run the statistical verification suite");
  vf->add_option("--scale", v_scale, "replication scale (1 = full, slow)");
  vf->add_option("--only", v_only, "run only checks whose name contains this substring");

  // --- meanfield --------------------------------------------------------
  std::string mf_matrix, mf_u0 = "0.1,0.9", mf_out = "-";
  double mf_horizon = 10.0, mf_dt = 1e-3;
  auto* mf = app.add_subcommand("meanfield", "deterministic frequency flow");
  mf->add_option("--matrix", mf_matrix, "payoff rows, e.g. \"1,1;0,0\"")->required();
  mf->add_option("--u0", mf_u0, "initial frequencies, comma-separated");
  mf->add_option("--horizon", mf_horizon, "integration horizon");
  mf->add_option("--dt", mf_dt, "step size");
  mf->add_option("--out", mf_out, "CSV path, or - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (sim->parsed()) {
    mcp::ExperimentConfig cfg = load_config(sim_config);
    mcp::RunResult r = mcp::run_single(cfg, sim_cell, sim_rep);
    auto geo_n = static_cast<mcp::Site>(1);
    for (int s : cfg.dims) geo_n *= s;
    auto os = open_out(sim_out);
    write_trajectory_csv(r.stats, geo_n, os ? *os : std::cout);
    if (!sim_snap_prefix.empty()) {
      for (std::size_t k = 0; k < r.stats.snapshots.size(); ++k) {
        std::string ext = cfg.dims.size() == 2 ? ".pgm" : ".txt";
        write_snapshot(r.stats.snapshots[k], sim_snap_prefix + std::to_string(k) + ext);
      }
    }
    std::cerr << "outcome: " << mcp::outcome_name(r.outcome) << "  config: " << mcp::config_hash(cfg)
              << "\n";
    return 0;
  }

  if (sw->parsed()) {
    mcp::ExperimentConfig cfg = load_config(sw_config);
    mcp::SweepAxis a1{sw_param, parse_doubles(sw_values)};
    mcp::SweepAxis a2;
    if (!sw_param2.empty()) {
      if (sw_values2.empty()) throw std::invalid_argument("--param2 requires --values2");
      a2 = mcp::SweepAxis{sw_param2, parse_doubles(sw_values2)};
    }
    mcp::SweepResult res = mcp::sweep(cfg, a1, a2, sw_threads);
    auto os = open_out(sw_csv);
    mcp::write_sweep_csv(res, os ? *os : std::cout);
    if (!sw_json.empty()) {
      auto js = open_out(sw_json);
      *js << mcp::sweep_to_json(res).dump(2) << "\n";
    }
    return 0;
  }

  if (ifc->parsed()) {
    std::vector<mcp::InterfaceTrace> traces;
    int violations = 0;
    for (int r = 0; r < if_reps; ++r) {
      mcp::InterfaceParams p = ip;
      if (if_reps > 1) p.seed = mcp::replicate_seed(ip.seed, 0, static_cast<std::uint64_t>(r));
      try {
        traces.push_back(mcp::run_heaviside(p));
      } catch (const mcp::window_violation_error& e) {
        ++violations;
        traces.push_back(e.trace());
      }
    }
    auto os = open_out(if_out);
    mcp::write_trace_csv(traces.front(), os ? *os : std::cout);
    std::cerr << "replicates: " << if_reps << "  window violations: " << violations << "\n";
    if (if_reps > 1) {
      mcp::DriftEstimate de = mcp::estimate_drift(traces);
      std::cerr << "front-midpoint increment per excursion: " << de.x_increment.mean << " (95% CI ["
                << de.x_increment.ci_lo() << ", " << de.x_increment.ci_hi() << "], n="
                << de.x_increment.n << ")\n";
    }
    return 0;
  }

  if (dc->parsed() || cc->parsed()) {
    std::vector<mcp::CheckResult> rs;
    if (dc->parsed()) rs.push_back(mcp::verify_duality(dc_scale));
    if (cc->parsed()) {
      rs.push_back(mcp::verify_monotone_coupling(cc_scale));
      rs.push_back(mcp::verify_reduced_chain(cc_scale));
    }
    bool all = true;
    for (const auto& r : rs) {
      std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
      all = all && r.pass;
    }
    return all ? 0 : 2;
  }

  if (bd->parsed()) {
    mcp::DeathParams dp = mcp::death_params(b_eps, b_d);
    mcp::PayoffMatrix m{0, b_a12, b_a21, b_a22};
    double thr = mcp::a_plus_threshold(b_eps, b_lambda, b_d, b_a12, b_a21, b_a22);
    nlohmann::json j;
    j["a"] = dp.a;
    j["T"] = dp.T;
    j["N"] = dp.N;
    j["a11_threshold"] = thr;
    {
      mcp::PayoffMatrix probe = m;
      probe.a11 = thr;
      auto [m1, m2] = mcp::rate_bounds(b_lambda, b_d, probe);
      j["M1_at_threshold"] = m1;
      j["M2"] = m2;
    }
    if (b_mc > 0) {
      double a11 = b_a11 < 0 ? thr : b_a11;
      mcp::BlockMcResult mc = mcp::verify_block_mc(b_eps, b_lambda, b_d, m, a11, b_mc, b_seed);
      j["mc"] = {{"a11", a11},
                 {"trials", mc.trials},
                 {"guaranteed", mc.guaranteed},
                 {"p_death", mc.p_death},
                 {"p_death_exact", mc.p_death_exact},
                 {"p_invade", mc.p_invade},
                 {"p_invade_se", mc.p_invade_se}};
    }
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (sn->parsed()) {
    mcp::ExperimentConfig cfg = load_config(sn_config);
    cfg.snapshot_times = {sn_time < 0 ? cfg.horizon : sn_time};
    mcp::RunResult r = mcp::run_single(cfg, 0, sn_rep);
    if (r.stats.snapshots.empty()) throw std::runtime_error("no snapshot captured");
    write_snapshot(r.stats.snapshots.front(), sn_out);
    return 0;
  }

  if (vf->parsed()) {
    std::vector<mcp::CheckResult> rs = mcp::run_all_checks_filtered(v_scale, v_only);
    if (rs.empty()) throw std::invalid_argument("no check matches --only '" + v_only + "'");
    bool all = true;
    for (const auto& r : rs) {
      std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << std::endl;
      all = all && r.pass;
    }
    return all ? 0 : 2;
  }

  if (mf->parsed()) {
    mcp::DenseMatrix a;
    std::stringstream rows(mf_matrix);
    std::string row;
    while (std::getline(rows, row, ';')) a.push_back(parse_doubles(row));
    mcp::MeanfieldTrajectory traj =
        mcp::integrate_replicator(parse_doubles(mf_u0), a, mf_horizon, mf_dt);
    auto os = open_out(mf_out);
    mcp::write_meanfield_csv(traj, os ? *os : std::cout);
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const mcp::resource_error& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 3;
  } catch (const mcp::window_error& e) {
    std::cerr << "tracking window: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
