#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "mcp/lattice.hpp"

namespace mcp {

// 2x2 payoff matrix for the occupied types; entry(i, j) is the payoff a type-i
// site collects per type-j neighbor fraction.  Payoffs against vacancy are 0.
struct PayoffMatrix {
  double a11 = 0, a12 = 0, a21 = 0, a22 = 0;

  double entry(int i, int j) const {
    if (i == 1) return j == 1 ? a11 : a12;
    return j == 1 ? a21 : a22;
  }

  // Relabeling 1 <-> 2 maps the matrix to its anti-transpose.
  PayoffMatrix label_swapped() const { return {a22, a21, a12, a11}; }

  double max_entry_or_zero() const { return std::max({0.0, a11, a12, a21, a22}); }
};

// Birth-rate profile: fitness is lambda * g(payoff) with g increasing,
// g(0) = 1, g -> 0 at -inf and g -> inf at +inf.  Candidate g functions are
// spot-checked on a probe grid at construction so a bad plug-in fails fast.
class FitnessSpec {
 public:
  FitnessSpec(double lambda, std::string name, std::function<double(double)> g)
      : lambda_(lambda), name_(std::move(name)), g_(std::move(g)) {
    if (!(lambda_ > 0)) throw std::invalid_argument("FitnessSpec: lambda must be > 0");
    if (std::abs(g_(0.0) - 1.0) > 1e-12) throw std::invalid_argument("FitnessSpec: g(0) != 1");
    static const double probes[] = {-30, -8, -2, -0.5, 0, 0.5, 2, 8, 30};
    double prev = g_(probes[0]);
    for (std::size_t i = 1; i < sizeof(probes) / sizeof(probes[0]); ++i) {
      double cur = g_(probes[i]);
      if (!(cur > prev)) throw std::invalid_argument("FitnessSpec: g not strictly increasing");
      prev = cur;
    }
    if (!(g_(-30.0) < 1e-2)) throw std::invalid_argument("FitnessSpec: g does not vanish at -inf");
    if (!(g_(30.0) > 1e2)) throw std::invalid_argument("FitnessSpec: g does not diverge at +inf");
  }

  static FitnessSpec exponential(double lambda) {
    return FitnessSpec(lambda, "exp", [](double x) { return std::exp(x); });
  }

  double lambda() const { return lambda_; }
  const std::string& g_name() const { return name_; }
  double g(double x) const { return g_(x); }
  double fitness_of_payoff(double payoff) const { return lambda_ * g_(payoff); }

 private:
  double lambda_;
  std::string name_;
  std::function<double(double)> g_;
};

// payoff(x) = sum_j a_ij f_j(x) for an occupied site of type i, 0 for vacant.
inline double payoff(const Configuration& c, Site x, const PayoffMatrix& m) {
  State i = c.at(x);
  if (i == kEmpty) return 0.0;
  auto f = c.local_fractions(x);
  return m.entry(i, 1) * f[1] + m.entry(i, 2) * f[2];
}

inline double fitness(const Configuration& c, Site x, const FitnessSpec& fs, const PayoffMatrix& m) {
  if (c.at(x) == kEmpty) return 0.0;
  return fs.fitness_of_payoff(payoff(c, x, m));
}

// Rate at which a vacant site x acquires a type-i occupant: each type-i
// neighbor contributes its fitness spread uniformly over its 2d directions.
inline double birth_rate_into(const Configuration& c, Site x, State i, const FitnessSpec& fs,
                              const PayoffMatrix& m) {
  if (c.at(x) != kEmpty) throw std::invalid_argument("birth_rate_into: target must be vacant");
  if (i != kOne && i != kTwo) throw std::invalid_argument("birth_rate_into: bad type");
  const TorusGeometry& g = c.geometry();
  int deg = g.degree();
  double sum = 0.0;
  for (int k = 0; k < deg; ++k) {
    Site y = g.neighbor(x, k);
    if (c.at(y) == i) sum += fitness(c, y, fs, m);
  }
  return sum / deg;
}

enum class UpdateRule { kBirthDeath, kDeathBirth };

// Weak-selection interpolation for the fully occupied voter-game dynamics.
struct SelectionSpec {
  double w;
  UpdateRule rule;

  SelectionSpec(double w_, UpdateRule rule_) : w(w_), rule(rule_) {
    if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("SelectionSpec: w must be in [0,1]");
  }
};

inline double voter_fitness(const Configuration& c, Site y, double w, const PayoffMatrix& m) {
  double phi = (1.0 - w) + w * payoff(c, y, m);
  if (phi < 0.0) throw std::domain_error("voter fitness negative");
  return phi;
}

// Rate at which the occupant of x is replaced by type j (j != type of x).
// birth_death: neighbors of type j push in proportional to their fitness.
// death_birth: x dies at rate 1 and the replacement is fitness-weighted.
inline double voter_game_rate(const Configuration& c, Site x, State j, const SelectionSpec& sel,
                              const PayoffMatrix& m) {
  if (j != kOne && j != kTwo) throw std::invalid_argument("voter_game_rate: bad type");
  const TorusGeometry& g = c.geometry();
  int deg = g.degree();
  if (sel.rule == UpdateRule::kBirthDeath) {
    double sum = 0.0;
    for (int k = 0; k < deg; ++k) {
      Site y = g.neighbor(x, k);
      if (c.at(y) == j) sum += voter_fitness(c, y, sel.w, m);
    }
    return sum / deg;
  }
  double num = 0.0, den = 0.0;
  for (int k = 0; k < deg; ++k) {
    Site y = g.neighbor(x, k);
    double phi = voter_fitness(c, y, sel.w, m);
    den += phi;
    if (c.at(y) == j) num += phi;
  }
  if (den == 0.0) throw std::domain_error("voter_game_rate: all neighbor fitnesses are zero");
  return num / den;
}

}  // namespace mcp
