#include <cmath>
#include <functional>
#include <unsupported/Eigen/MatrixFunctions>

#include "pfq/error.hpp"
#include "pfq/hamiltonian.hpp"
#include "pfq/rng.hpp"

namespace pfq {

Eigen::MatrixXd rotation_from_params(std::size_t n, const std::vector<double>& params) {
  if (params.size() != n * (n - 1) / 2) throw ConfigError("rotation needs N(N-1)/2 parameters");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  std::size_t k = 0;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = p + 1; q < n; ++q) {
      a(p, q) = params[k];
      a(q, p) = -params[k];
      ++k;
    }
  return a.exp();
}

namespace {

struct DescentResult {
  std::vector<double> x;
  double value;
  int iterations;
  bool converged;
};

// Gradient descent with central finite differences and Armijo backtracking along the
// normalized gradient. Every accepted step strictly lowers the objective.
DescentResult descend(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                      double fx, const LambdaOptConfig& cfg, int budget, std::vector<double>& history) {
  double step = cfg.initial_step;
  int it = 0;
  bool converged = false;
  std::vector<double> g(x.size()), trial(x.size());
  while (it < budget) {
    double gnorm = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double keep = x[i];
      x[i] = keep + cfg.fd_step;
      const double up = f(x);
      x[i] = keep - cfg.fd_step;
      const double down = f(x);
      x[i] = keep;
      g[i] = (up - down) / (2 * cfg.fd_step);
      gnorm += g[i] * g[i];
    }
    gnorm = std::sqrt(gnorm);
    if (gnorm == 0.0) {
      converged = true;
      break;
    }
    double alpha = step, ftrial = fx;
    bool accepted = false;
    while (alpha > 1e-10) {
      for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - alpha * g[i] / gnorm;
      ftrial = f(trial);
      if (ftrial < fx - 1e-4 * alpha * gnorm) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    ++it;
    if (!accepted) {
      converged = true;
      break;
    }
    const double rel = (fx - ftrial) / std::max(std::abs(fx), 1e-300);
    x = trial;
    fx = ftrial;
    history.push_back(fx);
    step = std::min(2 * alpha, 1.0);
    if (rel < cfg.relative_tolerance) {
      converged = true;
      break;
    }
  }
  return {std::move(x), fx, it, converged};
}

}  // namespace

LambdaOptResult optimize_lambda(const FermionTensors& t, const LambdaOptConfig& cfg) {
  check_symmetries(t);
  const std::size_t n = t.n_orbitals;
  const auto ni = static_cast<Eigen::Index>(n);
  LambdaOptResult res;
  res.tensors = t;
  res.rotation = Eigen::MatrixXd::Identity(ni, ni);
  double best = pauli_weight(t);
  res.history.push_back(best);

  if (cfg.factor_init && n > 1) {
    const FactorizedHamiltonian fh = double_factorize(t, cfg.first_tol);
    if (!fh.factors.empty()) {
      const Eigen::MatrixXd u = fh.factors.front().rotation.transpose();
      FermionTensors cand = orbital_rotate(t, u);
      const double lc = pauli_weight(cand);
      if (lc <= best) {
        best = lc;
        res.tensors = std::move(cand);
        res.rotation = u;
        res.history.push_back(best);
      }
    }
  }

  int budget = cfg.max_iterations;
  bool converged = false;
  for (int block = 0; block < cfg.max_blocks && budget > 0; ++block) {
    const double block_start = best;
    if (n > 1) {
      std::vector<double> x0(n * (n - 1) / 2, 0.0);
      if (cfg.init_noise > 0 && block == 0) {
        Rng rng(derive_seed(cfg.seed, 0));
        std::normal_distribution<double> nd(0.0, cfg.init_noise);
        for (auto& v : x0) v = nd(rng);
        const double lv = pauli_weight(orbital_rotate(res.tensors, rotation_from_params(n, x0)));
        if (lv > best) std::fill(x0.begin(), x0.end(), 0.0);
      }
      const FermionTensors base = res.tensors;
      auto f = [&](const std::vector<double>& x) { return pauli_weight(orbital_rotate(base, rotation_from_params(n, x))); };
      const double f0 = f(x0);
      const DescentResult d = descend(f, x0, f0, cfg, budget, res.history);
      budget -= d.iterations;
      converged = d.converged;
      if (d.value <= best) {
        const Eigen::MatrixXd u = rotation_from_params(n, d.x);
        res.tensors = orbital_rotate(base, u);
        res.rotation = u * res.rotation;
        best = d.value;
      }
    }
    if (cfg.optimize_shift && budget > 0) {
      const FermionTensors base = res.tensors;
      const FactorizedHamiltonian fh = double_factorize(base, cfg.first_tol);
      if (!fh.factors.empty()) {
        auto f = [&](const std::vector<double>& x) { return pauli_weight(symmetry_shift(base, fh, x)); };
        std::vector<double> x0(fh.factors.size(), 0.0);
        const DescentResult d = descend(f, x0, best, cfg, budget, res.history);
        budget -= d.iterations;
        converged = converged && d.converged;
        if (d.value <= best) {
          res.tensors = symmetry_shift(base, fh, d.x);
          best = d.value;
          // Later blocks re-factorize, so only the last block's shifts are reported.
          res.shifts = d.x;
        }
      }
    }
    if (!cfg.optimize_shift || block_start - best <= cfg.relative_tolerance * std::abs(block_start)) break;
  }
  res.converged = converged;
  return res;
}

}  // namespace pfq
