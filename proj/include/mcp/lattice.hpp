#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "mcp/rng.hpp"

namespace mcp {

using Site = std::int64_t;
using State = std::uint8_t;

inline constexpr State kEmpty = 0;
inline constexpr State kOne = 1;
inline constexpr State kTwo = 2;

// d-dimensional torus with a precomputed neighbor table.
// Directions are indexed 0..2d-1: direction 2k is -e_k, 2k+1 is +e_k.
class TorusGeometry {
 public:
  explicit TorusGeometry(std::vector<int> sides) : sides_(std::move(sides)) {
    if (sides_.empty()) throw std::invalid_argument("TorusGeometry: need at least one dimension");
    size_ = 1;
    for (int s : sides_) {
      if (s < 4) throw std::invalid_argument("TorusGeometry: every side must be >= 4");
      size_ *= s;
    }
    strides_.resize(sides_.size());
    Site acc = 1;
    for (std::size_t k = 0; k < sides_.size(); ++k) {
      strides_[k] = acc;
      acc *= sides_[k];
    }
    build_neighbor_table();
  }

  int dim() const { return static_cast<int>(sides_.size()); }
  int degree() const { return 2 * dim(); }
  Site size() const { return size_; }
  const std::vector<int>& sides() const { return sides_; }

  Site neighbor(Site site, int dir) const { return nbr_[static_cast<std::size_t>(site) * degree() + dir]; }

  std::vector<int> coords(Site site) const {
    std::vector<int> c(sides_.size());
    for (std::size_t k = 0; k < sides_.size(); ++k) {
      c[k] = static_cast<int>((site / strides_[k]) % sides_[k]);
    }
    return c;
  }

  Site site_at(const std::vector<int>& c) const {
    if (c.size() != sides_.size()) throw std::invalid_argument("site_at: coordinate arity mismatch");
    Site s = 0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      int v = c[k] % sides_[k];
      if (v < 0) v += sides_[k];
      s += strides_[k] * v;
    }
    return s;
  }

 private:
  void build_neighbor_table() {
    int deg = degree();
    nbr_.resize(static_cast<std::size_t>(size_) * deg);
    for (Site s = 0; s < size_; ++s) {
      for (std::size_t k = 0; k < sides_.size(); ++k) {
        int side = sides_[k];
        Site stride = strides_[k];
        int ck = static_cast<int>((s / stride) % side);
        Site down = s + stride * ((ck == 0 ? side - 1 : ck - 1) - ck);
        Site up = s + stride * ((ck == side - 1 ? 0 : ck + 1) - ck);
        nbr_[static_cast<std::size_t>(s) * deg + 2 * k] = down;
        nbr_[static_cast<std::size_t>(s) * deg + 2 * k + 1] = up;
      }
    }
  }

  std::vector<int> sides_;
  std::vector<Site> strides_;
  Site size_ = 0;
  std::vector<Site> nbr_;
};

// Value-like lattice configuration; copies share the (immutable) geometry.
class Configuration {
 public:
  explicit Configuration(std::shared_ptr<const TorusGeometry> geo, State fill = kEmpty)
      : geo_(std::move(geo)), state_(static_cast<std::size_t>(geo_->size()), fill) {
    recount();
  }

  const TorusGeometry& geometry() const { return *geo_; }
  std::shared_ptr<const TorusGeometry> geometry_ptr() const { return geo_; }

  State at(Site s) const { return state_[static_cast<std::size_t>(s)]; }

  void set(Site s, State v) {
    State old = state_[static_cast<std::size_t>(s)];
    if (old == v) return;
    if (old == kOne) --n1_;
    if (old == kTwo) --n2_;
    if (v == kOne) ++n1_;
    if (v == kTwo) ++n2_;
    state_[static_cast<std::size_t>(s)] = v;
  }

  Site count(State v) const {
    if (v == kOne) return n1_;
    if (v == kTwo) return n2_;
    return geo_->size() - n1_ - n2_;
  }
  Site occupied() const { return n1_ + n2_; }

  // Fractions (f0, f1, f2) of the 2d neighbors of x in each state.
  std::array<double, 3> local_fractions(Site x) const {
    int deg = geo_->degree();
    int c[3] = {0, 0, 0};
    for (int k = 0; k < deg; ++k) ++c[state_[static_cast<std::size_t>(geo_->neighbor(x, k))]];
    double inv = 1.0 / deg;
    return {c[0] * inv, c[1] * inv, c[2] * inv};
  }

  int neighbor_count(Site x, State v) const {
    int deg = geo_->degree();
    int n = 0;
    for (int k = 0; k < deg; ++k) n += state_[static_cast<std::size_t>(geo_->neighbor(x, k))] == v;
    return n;
  }

  bool operator==(const Configuration& o) const { return state_ == o.state_; }

  const std::vector<State>& raw() const { return state_; }

  // Independent per-site draw: state 1 w.p. p1, state 2 w.p. p2, else empty.
  static Configuration bernoulli(std::shared_ptr<const TorusGeometry> geo, double p1, double p2,
                                 CounterRng& rng) {
    if (p1 < 0 || p2 < 0 || p1 + p2 > 1.0) throw std::invalid_argument("bernoulli: bad probabilities");
    Configuration c(std::move(geo));
    for (Site s = 0; s < c.geometry().size(); ++s) {
      double u = rng.uniform01();
      if (u < p1)
        c.set(s, kOne);
      else if (u < p1 + p2)
        c.set(s, kTwo);
    }
    return c;
  }

  // Swap labels 1 <-> 2 everywhere.
  Configuration label_swapped() const {
    Configuration c(*this);
    for (Site s = 0; s < geo_->size(); ++s) {
      State v = c.state_[static_cast<std::size_t>(s)];
      if (v == kOne)
        c.set(s, kTwo);
      else if (v == kTwo)
        c.set(s, kOne);
    }
    return c;
  }

 private:
  void recount() {
    n1_ = n2_ = 0;
    for (State v : state_) {
      if (v == kOne) ++n1_;
      if (v == kTwo) ++n2_;
    }
  }

  std::shared_ptr<const TorusGeometry> geo_;
  std::vector<State> state_;
  Site n1_ = 0, n2_ = 0;
};

}  // namespace mcp
