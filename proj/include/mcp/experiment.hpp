#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcp/engine_direct.hpp"
#include "mcp/engine_graphical.hpp"
#include "mcp/lattice.hpp"
#include "mcp/parallel.hpp"
#include "mcp/payoff.hpp"
#include "mcp/rng.hpp"
#include "mcp/trajectory.hpp"

namespace mcp {

struct ExperimentConfig {
  int version = 1;
  double lambda = 2.0;
  PayoffMatrix payoff{};
  std::vector<int> dims{64, 64};
  std::string init = "bernoulli";  // bernoulli | all_one | all_two
  double p1 = 0.25, p2 = 0.25;
  double horizon = 20.0;
  int replicates = 8;
  std::uint64_t master_seed = 1;
  std::string engine = "direct";  // direct | graphical
  int samples = 50;
  std::vector<double> snapshot_times;
  double theta_surv = 0.01;
  double tail_fraction = 0.1;
};

inline void validate_config(const ExperimentConfig& c) {
  auto fail = [](const std::string& what) { throw std::invalid_argument("config: " + what); };
  if (c.version != 1) fail("unsupported version (expected 1)");
  if (!(c.lambda > 0)) fail("lambda must be > 0");
  if (c.dims.empty()) fail("dims must be nonempty");
  for (int s : c.dims)
    if (s < 4) fail("every torus side must be >= 4");
  if (c.init != "bernoulli" && c.init != "all_one" && c.init != "all_two") fail("unknown init");
  if (c.p1 < 0 || c.p2 < 0 || c.p1 + c.p2 > 1.0) fail("p1, p2 must be a sub-probability pair");
  if (!(c.horizon > 0)) fail("horizon must be > 0");
  if (c.replicates < 1) fail("replicates must be >= 1");
  if (c.engine != "direct" && c.engine != "graphical") fail("unknown engine");
  if (c.samples < 1) fail("samples must be >= 1");
  double prev = 0;
  for (double t : c.snapshot_times) {
    if (t < prev || t > c.horizon) fail("snapshot_times must be ascending within [0, horizon]");
    prev = t;
  }
  if (!(c.theta_surv > 0) || !(c.theta_surv < 1)) fail("theta_surv must be in (0,1)");
  if (!(c.tail_fraction > 0) || c.tail_fraction > 1) fail("tail_fraction must be in (0,1]");
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["version"] = c.version;
  j["lambda"] = c.lambda;
  j["payoff"] = {{"a11", c.payoff.a11}, {"a12", c.payoff.a12}, {"a21", c.payoff.a21}, {"a22", c.payoff.a22}};
  j["dims"] = c.dims;
  j["init"] = c.init;
  j["p1"] = c.p1;
  j["p2"] = c.p2;
  j["horizon"] = c.horizon;
  j["replicates"] = c.replicates;
  j["master_seed"] = c.master_seed;
  j["engine"] = c.engine;
  j["samples"] = c.samples;
  j["snapshot_times"] = c.snapshot_times;
  j["theta_surv"] = c.theta_surv;
  j["tail_fraction"] = c.tail_fraction;
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  static const std::vector<std::string> known = {
      "version", "lambda",      "payoff", "dims",    "init",           "p1",
      "p2",      "horizon",     "replicates", "master_seed", "engine", "samples",
      "snapshot_times", "theta_surv", "tail_fraction"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const auto& k : known) ok = ok || k == it.key();
    if (!ok) throw std::invalid_argument("config: unknown key '" + it.key() + "'");
  }
  ExperimentConfig c;
  auto get = [&](const char* key, auto& slot) {
    if (j.contains(key)) j.at(key).get_to(slot);
  };
  get("version", c.version);
  get("lambda", c.lambda);
  if (j.contains("payoff")) {
    const auto& p = j.at("payoff");
    p.at("a11").get_to(c.payoff.a11);
    p.at("a12").get_to(c.payoff.a12);
    p.at("a21").get_to(c.payoff.a21);
    p.at("a22").get_to(c.payoff.a22);
  }
  get("dims", c.dims);
  get("init", c.init);
  get("p1", c.p1);
  get("p2", c.p2);
  get("horizon", c.horizon);
  get("replicates", c.replicates);
  get("master_seed", c.master_seed);
  get("engine", c.engine);
  get("samples", c.samples);
  get("snapshot_times", c.snapshot_times);
  get("theta_surv", c.theta_surv);
  get("tail_fraction", c.tail_fraction);
  validate_config(c);
  return c;
}

// FNV-1a over the canonical (sorted-key, compact) dump; used to stamp outputs
// so results can be traced back to the exact configuration.
inline std::string config_hash(const ExperimentConfig& c) {
  std::string dump = config_to_json(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

// One fresh master seed per (cell, replicate); engines split their own
// substreams from it, so distinct replicates never share randomness.
inline std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t cell, std::uint64_t rep) {
  std::uint64_t h = CounterRng::mix64(master + 0x632be59bd9b4e019ull);
  h = CounterRng::mix64(h ^ (cell * 0xff51afd7ed558ccdull));
  return CounterRng::mix64(h ^ (rep * 0xc4ceb9fe1a85ec53ull));
}

enum class Outcome { Extinction = 0, Type1Wins = 1, Type2Wins = 2, Coexistence = 3 };

inline const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Extinction: return "extinction";
    case Outcome::Type1Wins: return "type1_wins";
    case Outcome::Type2Wins: return "type2_wins";
    case Outcome::Coexistence: return "coexistence";
  }
  return "?";
}

// A type survives when its mean density over the trailing window clears the
// threshold AND it is still present in the last sample.
inline Outcome classify_outcome(const TrajectoryStats& ts, Site n_sites, double horizon,
                                double theta, double tail_fraction) {
  if (n_sites <= 0) throw std::invalid_argument("classify_outcome: empty lattice");
  double cut = horizon * (1.0 - tail_fraction) - 1e-9;
  double sum1 = 0, sum2 = 0;
  std::size_t count = 0, last = 0;
  for (std::size_t k = 0; k < ts.times.size(); ++k) {
    if (ts.times[k] < cut) continue;
    sum1 += static_cast<double>(ts.n1[k]);
    sum2 += static_cast<double>(ts.n2[k]);
    ++count;
    last = k;
  }
  if (count == 0) throw std::domain_error("classify_outcome: no samples in the tail window");
  double n = static_cast<double>(n_sites) * static_cast<double>(count);
  bool s1 = sum1 / n >= theta && ts.n1[last] > 0;
  bool s2 = sum2 / n >= theta && ts.n2[last] > 0;
  if (s1 && s2) return Outcome::Coexistence;
  if (s1) return Outcome::Type1Wins;
  if (s2) return Outcome::Type2Wins;
  return Outcome::Extinction;
}

struct RunResult {
  TrajectoryStats stats;
  Outcome outcome = Outcome::Extinction;
  double final_frac1 = 0, final_frac2 = 0;
};

inline RunResult run_single(const ExperimentConfig& cfg, std::uint64_t cell, std::uint64_t rep) {
  validate_config(cfg);
  auto geo = std::make_shared<const TorusGeometry>(cfg.dims);
  std::uint64_t seed = replicate_seed(cfg.master_seed, cell, rep);
  Configuration c(geo);
  if (cfg.init == "bernoulli") {
    CounterRng init_rng = CounterRng::derive(seed, 0x696e6974ull, 0);
    c = Configuration::bernoulli(geo, cfg.p1, cfg.p2, init_rng);
  } else {
    c = Configuration(geo, cfg.init == "all_one" ? kOne : kTwo);
  }
  ObserverSpec obs = ObserverSpec::uniform(cfg.horizon, cfg.samples);
  obs.snapshot_times = cfg.snapshot_times;
  FitnessSpec fs = FitnessSpec::exponential(cfg.lambda);

  RunResult out;
  if (cfg.engine == "direct") {
    SimState st(std::move(c), fs, cfg.payoff, CounterRng::derive(seed, 0x73696d756c617465ull, 1));
    out.stats = st.run(cfg.horizon, obs);
  } else {
    double M = max_rate(fs, cfg.payoff);
    EventStream stream = EventStream::build(geo, M, cfg.horizon, seed);
    out.stats = evolve(c, stream, fs, cfg.payoff, obs);
  }
  out.outcome = classify_outcome(out.stats, geo->size(), cfg.horizon, cfg.theta_surv, cfg.tail_fraction);
  double n = static_cast<double>(geo->size());
  out.final_frac1 = static_cast<double>(out.stats.n1.back()) / n;
  out.final_frac2 = static_cast<double>(out.stats.n2.back()) / n;
  return out;
}

struct SweepAxis {
  std::string param;
  std::vector<double> values;
};

inline void apply_param(ExperimentConfig& c, const std::string& name, double v) {
  if (name == "lambda") c.lambda = v;
  else if (name == "a11") c.payoff.a11 = v;
  else if (name == "a12") c.payoff.a12 = v;
  else if (name == "a21") c.payoff.a21 = v;
  else if (name == "a22") c.payoff.a22 = v;
  else if (name == "p1") c.p1 = v;
  else if (name == "p2") c.p2 = v;
  else if (name == "horizon") c.horizon = v;
  else throw std::invalid_argument("sweep: unknown parameter '" + name + "'");
}

struct CellSummary {
  double value1 = 0, value2 = 0;  // axis coordinates (value2 = 0 for 1-D sweeps)
  std::array<std::uint64_t, 4> counts{};
  std::uint64_t failures = 0;
  std::string first_error;
  double mean_frac1 = 0, mean_frac2 = 0;  // over successful replicates
};

struct SweepResult {
  ExperimentConfig base;
  SweepAxis axis1, axis2;  // axis2 may be empty
  std::string hash;
  std::vector<CellSummary> cells;  // axis1-major order
};

// Grid sweep over one or two parameters.  Replicate seeds depend only on
// (master_seed, cell index, replicate index), so the result is byte-for-byte
// identical for every thread count.
inline SweepResult sweep(const ExperimentConfig& base, const SweepAxis& axis1,
                         const SweepAxis& axis2 = {}, unsigned threads = 0) {
  validate_config(base);
  if (axis1.values.empty()) throw std::invalid_argument("sweep: axis1 needs at least one value");
  std::size_t n1 = axis1.values.size();
  std::size_t n2 = axis2.values.empty() ? 1 : axis2.values.size();
  std::size_t cells_n = n1 * n2;
  std::size_t reps = static_cast<std::size_t>(base.replicates);

  struct Slot {
    bool ok = false;
    Outcome outcome = Outcome::Extinction;
    double f1 = 0, f2 = 0;
    std::string error;
  };
  std::vector<Slot> slots(cells_n * reps);
  parallel_for(slots.size(), [&](std::size_t i) {
    std::size_t cell = i / reps, rep = i % reps;
    ExperimentConfig cfg = base;
    apply_param(cfg, axis1.param, axis1.values[cell / n2]);
    if (!axis2.values.empty()) apply_param(cfg, axis2.param, axis2.values[cell % n2]);
    Slot& s = slots[i];
    try {
      RunResult r = run_single(cfg, cell, rep);
      s.ok = true;
      s.outcome = r.outcome;
      s.f1 = r.final_frac1;
      s.f2 = r.final_frac2;
    } catch (const std::exception& e) {
      s.error = e.what();
    }
  }, threads);

  SweepResult out;
  out.base = base;
  out.axis1 = axis1;
  out.axis2 = axis2;
  out.hash = config_hash(base);
  out.cells.resize(cells_n);
  for (std::size_t cell = 0; cell < cells_n; ++cell) {
    CellSummary& cs = out.cells[cell];
    cs.value1 = axis1.values[cell / n2];
    cs.value2 = axis2.values.empty() ? 0.0 : axis2.values[cell % n2];
    std::uint64_t ok_n = 0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const Slot& s = slots[cell * reps + rep];
      if (!s.ok) {
        ++cs.failures;
        if (cs.first_error.empty()) cs.first_error = s.error;
        continue;
      }
      ++ok_n;
      ++cs.counts[static_cast<std::size_t>(s.outcome)];
      cs.mean_frac1 += s.f1;
      cs.mean_frac2 += s.f2;
    }
    if (ok_n > 0) {
      cs.mean_frac1 /= static_cast<double>(ok_n);
      cs.mean_frac2 /= static_cast<double>(ok_n);
    }
  }
  return out;
}

inline void write_sweep_csv(const SweepResult& r, std::ostream& os) {
  os << r.axis1.param;
  os << "," << (r.axis2.values.empty() ? std::string("-") : r.axis2.param);
  os << ",extinction,type1_wins,type2_wins,coexistence,failures,mean_frac1,mean_frac2\n";
  for (const auto& c : r.cells) {
    os << c.value1 << "," << c.value2;
    for (auto n : c.counts) os << "," << n;
    os << "," << c.failures << "," << c.mean_frac1 << "," << c.mean_frac2 << "\n";
  }
}

inline nlohmann::json sweep_to_json(const SweepResult& r) {
  nlohmann::json j;
  j["config"] = config_to_json(r.base);
  j["config_hash"] = r.hash;
  j["axis1"] = {{"param", r.axis1.param}, {"values", r.axis1.values}};
  if (!r.axis2.values.empty()) j["axis2"] = {{"param", r.axis2.param}, {"values", r.axis2.values}};
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : r.cells) {
    nlohmann::json jc;
    jc["value1"] = c.value1;
    jc["value2"] = c.value2;
    jc["counts"] = {{"extinction", c.counts[0]},
                    {"type1_wins", c.counts[1]},
                    {"type2_wins", c.counts[2]},
                    {"coexistence", c.counts[3]}};
    jc["failures"] = c.failures;
    if (!c.first_error.empty()) jc["first_error"] = c.first_error;
    jc["mean_frac1"] = c.mean_frac1;
    jc["mean_frac2"] = c.mean_frac2;
    cells.push_back(jc);
  }
  j["cells"] = cells;
  return j;
}

// Binary PGM snapshot of a 2-D configuration: empty -> white, type 1 -> black,
// type 2 -> mid gray.
inline void write_pgm(const Configuration& c, std::ostream& os) {
  const TorusGeometry& g = c.geometry();
  if (g.dim() != 2) throw std::domain_error("write_pgm: needs a 2-D torus");
  int w = g.sides()[0], h = g.sides()[1];
  os << "P5\n" << w << " " << h << "\n255\n";
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      State s = c.at(g.site_at({x, y}));
      unsigned char px = s == kEmpty ? 255 : (s == kOne ? 0 : 128);
      os.put(static_cast<char>(px));
    }
  }
}

}  // namespace mcp
