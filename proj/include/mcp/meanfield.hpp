#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace mcp {

using DenseMatrix = std::vector<std::vector<double>>;

// du_i/dt = u_i * sum_{j != i} (phi_i - phi_j) u_j with phi = A u.  Built from
// antisymmetric pair terms so the components of the result cancel pairwise.
inline std::vector<double> replicator_rhs(const std::vector<double>& u, const DenseMatrix& a) {
  std::size_t n = u.size();
  if (n == 0 || a.size() != n) throw std::domain_error("replicator_rhs: dimension mismatch");
  for (const auto& row : a)
    if (row.size() != n) throw std::domain_error("replicator_rhs: matrix must be n x n");
  std::vector<double> phi(n, 0.0), rhs(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) phi[i] += a[i][j] * u[j];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double term = (phi[i] - phi[j]) * u[i] * u[j];
      rhs[i] += term;
      rhs[j] -= term;
    }
  }
  return rhs;
}

struct MeanfieldTrajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
};

// Classical RK4 with a fixed step (plus one short closing step to land on T).
inline MeanfieldTrajectory integrate_replicator(std::vector<double> u, const DenseMatrix& a,
                                                double horizon, double dt = 1e-3) {
  if (!(horizon >= 0) || !(dt > 0)) throw std::invalid_argument("integrate_replicator: bad step");
  double sum = 0;
  for (double v : u) {
    if (v < -1e-12) throw std::domain_error("integrate_replicator: negative frequency");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::domain_error("integrate_replicator: frequencies must sum to 1");
  (void)replicator_rhs(u, a);  // validate dimensions up front

  MeanfieldTrajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(u);
  std::size_t n = u.size();
  double t = 0.0;
  auto advance = [&](double h) {
    std::vector<double> k1 = replicator_rhs(u, a);
    std::vector<double> tmp(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * h * k1[i];
    std::vector<double> k2 = replicator_rhs(tmp, a);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * h * k2[i];
    std::vector<double> k3 = replicator_rhs(tmp, a);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + h * k3[i];
    std::vector<double> k4 = replicator_rhs(tmp, a);
    for (std::size_t i = 0; i < n; ++i)
      u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  };
  auto n_full = static_cast<std::uint64_t>(std::floor(horizon / dt + 1e-9));
  for (std::uint64_t k = 0; k < n_full; ++k) {
    advance(dt);
    t = static_cast<double>(k + 1) * dt;
    traj.times.push_back(t);
    traj.states.push_back(u);
  }
  if (horizon - t > 1e-12) {
    advance(horizon - t);
    traj.times.push_back(horizon);
    traj.states.push_back(u);
  }
  return traj;
}

inline void write_meanfield_csv(const MeanfieldTrajectory& traj, std::ostream& os) {
  std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
  os << "time";
  for (std::size_t i = 1; i <= n; ++i) os << ",u" << i;
  os << "\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    os << traj.times[k];
    for (double v : traj.states[k]) os << "," << v;
    os << "\n";
  }
}

}  // namespace mcp
