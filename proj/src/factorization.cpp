#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pfq/error.hpp"
#include "pfq/hamiltonian.hpp"

namespace pfq {

Eigen::MatrixXd Factor::matrix() const {
  const Eigen::Index rho = eigenvalues.size();
  const Eigen::MatrixXd uk = rotation.leftCols(rho);
  return uk * eigenvalues.asDiagonal() * uk.transpose();
}

std::vector<std::size_t> FactorizedHamiltonian::ranks() const {
  std::vector<std::size_t> r;
  r.reserve(factors.size());
  for (const auto& f : factors) r.push_back(f.rank());
  return r;
}

std::vector<double> FactorizedHamiltonian::reconstruct_two_body() const {
  const std::size_t n = n_orbitals;
  std::vector<double> out(n * n * n * n, 0.0);
  for (const auto& f : factors) {
    const Eigen::MatrixXd l = f.matrix();
    for (std::size_t a = 0; a < n * n; ++a)
      for (std::size_t b = 0; b < n * n; ++b)
        out[a * n * n + b] += l(static_cast<Eigen::Index>(a / n), static_cast<Eigen::Index>(a % n)) *
                              l(static_cast<Eigen::Index>(b / n), static_cast<Eigen::Index>(b % n));
  }
  return out;
}

namespace {

Eigen::MatrixXd modified_one_body(const FermionTensors& t) {
  const std::size_t n = t.n_orbitals;
  Eigen::MatrixXd m = t.one_body;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t r = 0; r < n; ++r) m(p, q) -= 0.5 * t.v(p, r, r, q);
  return m;
}

Factor diagonalize_factor(const Eigen::MatrixXd& l, double weight) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l);
  const Eigen::Index n = l.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(es.eigenvalues()(a)) > std::abs(es.eigenvalues()(b));
  });
  Factor f;
  f.weight = weight;
  f.eigenvalues.resize(n);
  f.rotation.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    f.eigenvalues(k) = es.eigenvalues()(order[static_cast<std::size_t>(k)]);
    f.rotation.col(k) = es.eigenvectors().col(order[static_cast<std::size_t>(k)]);
  }
  return f;
}

}  // namespace

FactorizedHamiltonian double_factorize(const FermionTensors& t, double first_tol) {
  check_symmetries(t);
  if (first_tol < 0) throw ConfigError("first factorization tolerance must be non-negative");
  const std::size_t n = t.n_orbitals;
  const Eigen::MatrixXd m = t.pair_matrix();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const Eigen::VectorXd& w = es.eigenvalues();
  if (w.size() > 0 && w(0) < -1e-8) {
    std::ostringstream msg;
    msg << "two-body pair matrix is not positive semidefinite: smallest eigenvalue " << w(0);
    throw NumericError(msg.str());
  }
  FactorizedHamiltonian out;
  out.n_orbitals = n;
  out.one_body_modified = modified_one_body(t);
  // Eigen returns ascending order; walk from the largest.
  for (Eigen::Index k = w.size() - 1; k >= 0; --k) {
    const double wk = w(k);
    if (wk <= 0.0 || wk < first_tol) {
      out.dropped_weight += std::abs(wk);
      continue;
    }
    Eigen::MatrixXd l(n, n);
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q) l(p, q) = std::sqrt(wk) * es.eigenvectors()(static_cast<Eigen::Index>(p * n + q), k);
    l = 0.5 * (l + l.transpose()).eval();
    out.factors.push_back(diagonalize_factor(l, wk));
  }
  return out;
}

FactorizedHamiltonian truncate_second_factorization(const FactorizedHamiltonian& f, double eps_prime) {
  if (eps_prime < 0) throw ConfigError("second factorization tolerance must be non-negative");
  FactorizedHamiltonian out = f;
  for (auto& fac : out.factors) {
    Eigen::Index keep = fac.eigenvalues.size();
    double dropped = 0.0;
    while (keep > 0 && dropped + std::abs(fac.eigenvalues(keep - 1)) <= eps_prime) {
      dropped += std::abs(fac.eigenvalues(keep - 1));
      --keep;
    }
    fac.eigenvalues.conservativeResize(keep);
  }
  return out;
}

FermionTensors symmetry_shift(const FermionTensors& t, const FactorizedHamiltonian& f,
                              const std::vector<double>& shifts) {
  if (shifts.size() != f.factors.size())
    throw ConfigError("symmetry shift needs one parameter per factor (" + std::to_string(f.factors.size()) + ")");
  if (f.n_orbitals != t.n_orbitals) throw ConfigError("factorization does not match the tensors");
  const std::size_t n = t.n_orbitals;
  const double ne = static_cast<double>(t.n_electrons);
  const auto ni = static_cast<Eigen::Index>(n);
  FermionTensors out = t;
  Eigen::MatrixXd m = modified_one_body(t);
  for (std::size_t j = 0; j < shifts.size(); ++j) {
    const double fj = shifts[j];
    if (fj == 0.0) continue;
    const Eigen::MatrixXd l = f.factors[j].matrix();
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q)
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t s = 0; s < n; ++s) {
            const double dpq = p == q ? 1.0 : 0.0, drs = r == s ? 1.0 : 0.0;
            out.v(p, q, r, s) += fj * (l(p, q) * drs + dpq * l(r, s)) + fj * fj * dpq * drs;
          }
    m -= ne * fj * (l + fj * Eigen::MatrixXd::Identity(ni, ni));
    out.core_energy += 0.5 * ne * ne * fj * fj;
  }
  out.one_body = m;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t r = 0; r < n; ++r) out.one_body(p, q) += 0.5 * out.v(p, r, r, q);
  return out;
}

}  // namespace pfq
