#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "pfq/error.hpp"
#include "pfq/hamiltonian.hpp"

namespace pfq {

namespace {

// γ_{j,0} = Z_0…Z_{j−1} X_j and γ_{j,1} = Z_0…Z_{j−1} Y_j on 2N qubits.
PauliString majorana(std::size_t n_qubits, std::size_t mode, int kind) {
  PauliString p(n_qubits);
  for (std::size_t k = 0; k < mode; ++k) p.set(k, 'Z');
  p.set(mode, kind == 0 ? 'X' : 'Y');
  return p;
}

}  // namespace

QubitHamiltonian majorana_pauli_decompose(const FermionTensors& t, double drop_tol) {
  check_symmetries(t);
  const std::size_t n = t.n_orbitals;
  const std::size_t nq = 2 * n;

  // Products γ_{pσ,0} γ_{qσ,1} for all orbital pairs and both spins.
  std::vector<PauliProduct> pair(n * n * 2);
  for (int spin = 0; spin < 2; ++spin)
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q)
        pair[(p * n + q) * 2 + spin] =
            pauli_mul(majorana(nq, jw_qubit(p, spin), 0), majorana(nq, jw_qubit(q, spin), 1));

  std::unordered_map<PauliString, cplx, PauliHash> acc;
  auto add = [&acc](const PauliString& key, cplx c) { acc[key] += c; };

  // One-body: (i/2) Σ (h_pq + Σ_r h_pqrr − ½ Σ_r h_prrq) γ_{pσ,0} γ_{qσ,1}.
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      double h = t.one_body(p, q);
      for (std::size_t r = 0; r < n; ++r) h += t.v(p, q, r, r) - 0.5 * t.v(p, r, r, q);
      if (h == 0.0) continue;
      for (int spin = 0; spin < 2; ++spin) {
        const auto& pp = pair[(p * n + q) * 2 + spin];
        add(pp.pauli, cplx(0, 0.5) * h * pp.phase);
      }
    }

  // Two-body: −(1/8) Σ h_pqrs γ_{pσ,0} γ_{qσ,1} γ_{rτ,0} γ_{sτ,1}.
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) {
          const double h = t.v(p, q, r, s);
          if (h == 0.0) continue;
          for (int sa = 0; sa < 2; ++sa)
            for (int sb = 0; sb < 2; ++sb) {
              const auto& a = pair[(p * n + q) * 2 + sa];
              const auto& b = pair[(r * n + s) * 2 + sb];
              const auto ab = pauli_mul(a.pauli, b.pauli);
              add(ab.pauli, -0.125 * h * a.phase * b.phase * ab.phase);
            }
        }

  // Identity pieces not produced by the Majorana products.
  double constant = t.core_energy;
  for (std::size_t p = 0; p < n; ++p) {
    constant += t.one_body(p, p);
    for (std::size_t r = 0; r < n; ++r) constant += 0.5 * t.v(p, p, r, r) - 0.5 * t.v(p, r, r, p);
  }

  double scale = 1.0;
  for (const auto& kv : acc) scale = std::max(scale, std::abs(kv.second));
  std::map<PauliString, double> sorted;
  for (const auto& kv : acc) {
    if (std::abs(kv.second.imag()) > 1e-9 * scale)
      throw NumericError("Majorana expansion produced a non-Hermitian coefficient on " + kv.first.str());
    if (kv.first.is_identity()) {
      constant += kv.second.real();
      continue;
    }
    if (std::abs(kv.second.real()) > drop_tol) sorted.emplace(kv.first, kv.second.real());
  }
  QubitHamiltonian out{PauliHamiltonian(nq), constant};
  for (const auto& kv : sorted) out.paulis.add_term(kv.second, kv.first);
  return out;
}

double pauli_weight(const FermionTensors& t) { return weight_lambda(majorana_pauli_decompose(t).paulis); }

FermionTensors orbital_rotate(const FermionTensors& t, const Eigen::MatrixXd& u) {
  const std::size_t n = t.n_orbitals;
  const auto ni = static_cast<Eigen::Index>(n);
  if (u.rows() != ni || u.cols() != ni) throw ConfigError("rotation has wrong shape");
  if ((u.transpose() * u - Eigen::MatrixXd::Identity(ni, ni)).cwiseAbs().maxCoeff() > 1e-10)
    throw ConfigError("orbital rotation is not orthogonal to 1e-10");
  FermionTensors out = t;
  out.one_body = u * t.one_body * u.transpose();
  // Contract one index at a time: O(N^5).
  std::vector<double> a = t.two_body, b(a.size());
  for (int axis = 0; axis < 4; ++axis) {
    std::fill(b.begin(), b.end(), 0.0);
    for (std::size_t i0 = 0; i0 < n; ++i0)
      for (std::size_t i1 = 0; i1 < n; ++i1)
        for (std::size_t i2 = 0; i2 < n; ++i2)
          for (std::size_t i3 = 0; i3 < n; ++i3) {
            const double val = a[((i0 * n + i1) * n + i2) * n + i3];
            if (val == 0.0) continue;
            std::size_t idx[4] = {i0, i1, i2, i3};
            const std::size_t src = idx[axis];
            for (std::size_t k = 0; k < n; ++k) {
              idx[axis] = k;
              b[((idx[0] * n + idx[1]) * n + idx[2]) * n + idx[3]] += u(static_cast<Eigen::Index>(k),
                                                                        static_cast<Eigen::Index>(src)) * val;
            }
          }
    std::swap(a, b);
  }
  out.two_body = std::move(a);
  // Re-impose exact symmetry lost to rounding.
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q <= p; ++q) {
      const double m = 0.5 * (out.one_body(p, q) + out.one_body(q, p));
      out.one_body(p, q) = out.one_body(q, p) = m;
    }
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) {
          const double m = (out.v(p, q, r, s) + out.v(p, q, s, r) + out.v(q, p, r, s) + out.v(q, p, s, r) +
                            out.v(r, s, p, q) + out.v(r, s, q, p) + out.v(s, r, p, q) + out.v(s, r, q, p)) /
                           8.0;
          out.set_symmetric(p, q, r, s, m);
        }
  return out;
}

FermionTensors synthetic_chain(std::size_t atoms, double spacing, OrbitalBasis basis) {
  if (atoms == 0 || !(spacing > 0)) throw ConfigError("synthetic chain needs atoms > 0 and spacing > 0");
  const std::size_t n = atoms;
  const double onsite = 0.6;       // soft-Coulomb value at zero distance
  const double hopping = 0.5;      // nearest-neighbour hopping scale
  const double bond_charge = 0.15;
  const double soft = 1.0 / onsite;

  Eigen::MatrixXd coulomb(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const double r = spacing * std::abs(static_cast<double>(a) - static_cast<double>(b));
      coulomb(a, b) = 1.0 / std::sqrt(r * r + soft * soft);
    }

  FermionTensors t = FermionTensors::zeros(n, atoms);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      const double r = spacing * std::abs(static_cast<double>(a) - static_cast<double>(b));
      t.one_body(a, b) = -hopping * std::exp(-(r - spacing) / spacing * 2.0);
    }
    t.one_body(a, a) = -coulomb.row(a).sum();
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) t.core_energy += coulomb(a, b);

  // Charge distribution of the orbital pair (p,q) over atoms.
  auto density = [&](std::size_t p, std::size_t q) {
    Eigen::VectorXd rho = Eigen::VectorXd::Zero(n);
    if (p == q) {
      rho(p) = 1.0;
    } else if (p + 1 == q || q + 1 == p) {
      rho(p) = rho(q) = 0.5 * bond_charge;
    }
    return rho;
  };
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      const Eigen::VectorXd a = density(p, q);
      if (a.isZero()) continue;
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) {
          const Eigen::VectorXd b = density(r, s);
          if (b.isZero()) continue;
          t.v(p, q, r, s) = a.dot(coulomb * b);
        }
    }

  if (basis == OrbitalBasis::Localized) return t;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.one_body);
  Eigen::MatrixXd u = es.eigenvectors().transpose();
  // Fix column signs so the result does not depend on the eigensolver's sign choice.
  for (Eigen::Index k = 0; k < u.rows(); ++k) {
    Eigen::Index arg = 0;
    u.row(k).cwiseAbs().maxCoeff(&arg);
    if (u(k, arg) < 0) u.row(k) *= -1.0;
  }
  return orbital_rotate(t, u);
}

}  // namespace pfq
