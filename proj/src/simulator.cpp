#include "pfq/simulator.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pfq/error.hpp"
#include "pfq/kernels.hpp"

namespace pfq {

namespace {

std::atomic<std::size_t> g_dense_limit{14};

// ω = sign · i^{#Y}, so that P|b⟩ = ω (−1)^{|b∧z|} |b ⊕ x⟩.
cplx pauli_phase(const PauliString& p) {
  static const cplx powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return static_cast<double>(p.sign()) * powers[p.y_count() % 4];
}

void check_match(const StateVector& psi, const PauliString& p) {
  if (psi.n_qubits != p.n_qubits())
    throw DimensionError("state has " + std::to_string(psi.n_qubits) + " qubits but Pauli string has " +
                         std::to_string(p.n_qubits()));
}

void check_match(const StateVector& psi, const PauliHamiltonian& h) {
  if (psi.n_qubits != h.n_qubits())
    throw DimensionError("state has " + std::to_string(psi.n_qubits) + " qubits but Hamiltonian has " +
                         std::to_string(h.n_qubits()));
}

}  // namespace

std::size_t dense_limit() { return g_dense_limit.load(); }
void set_dense_limit(std::size_t n) {
  if (n > 30) throw ConfigError("dense limit above 30 qubits is not supported");
  g_dense_limit.store(n);
}

void check_dense(std::size_t n) {
  if (n > dense_limit())
    throw DimensionError(std::to_string(n) + " qubits exceeds the dense limit of " + std::to_string(dense_limit()));
}

StateVector::StateVector(std::size_t n) : n_qubits(n) {
  check_dense(n);
  amplitudes = Eigen::VectorXcd::Zero(Eigen::Index{1} << n);
  amplitudes(0) = 1.0;
}

StateVector::StateVector(std::size_t n, Eigen::VectorXcd amps) : n_qubits(n), amplitudes(std::move(amps)) {
  check_dense(n);
  if (amplitudes.size() != (Eigen::Index{1} << n)) throw DimensionError("amplitude count does not match 2^n");
  normalize();
}

StateVector StateVector::basis(std::size_t n, std::uint64_t index) {
  StateVector s(n);
  if (index >= s.dim()) throw DimensionError("basis index out of range");
  s.amplitudes(0) = 0.0;
  s.amplitudes(static_cast<Eigen::Index>(index)) = 1.0;
  return s;
}

void StateVector::normalize() {
  const double nrm = amplitudes.norm();
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw NumericError("cannot normalize a zero or non-finite state");
  amplitudes /= nrm;
}

cplx inner(const StateVector& a, const StateVector& b) {
  if (a.n_qubits != b.n_qubits) throw DimensionError("states have different qubit counts");
  return a.amplitudes.dot(b.amplitudes);
}

double fidelity(const StateVector& a, const StateVector& b) { return std::norm(inner(a, b)); }

Eigen::MatrixXcd pauli_matrix(const PauliString& p) {
  check_dense(p.n_qubits());
  const std::size_t dim = std::size_t{1} << p.n_qubits();
  const std::uint64_t x = p.x_mask(), z = p.z_mask();
  const cplx w = pauli_phase(p);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::uint64_t b = 0; b < dim; ++b)
    m(static_cast<Eigen::Index>(b ^ x), static_cast<Eigen::Index>(b)) = (std::popcount(b & z) & 1) ? -w : w;
  return m;
}

Eigen::MatrixXcd dense_matrix(const PauliHamiltonian& h) {
  check_dense(h.n_qubits());
  const std::size_t dim = std::size_t{1} << h.n_qubits();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& t : h.terms()) {
    const std::uint64_t x = t.pauli.x_mask(), z = t.pauli.z_mask();
    const cplx w = t.coeff * pauli_phase(t.pauli);
    for (std::uint64_t b = 0; b < dim; ++b)
      m(static_cast<Eigen::Index>(b ^ x), static_cast<Eigen::Index>(b)) += (std::popcount(b & z) & 1) ? -w : w;
  }
  return m;
}

SpectralData diagonalize(const PauliHamiltonian& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense_matrix(h));
  if (es.info() != Eigen::Success) throw NumericError("dense eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

GroundState ground_state(const PauliHamiltonian& h) {
  const SpectralData spec = diagonalize(h);
  return {spec.energies(0), StateVector(h.n_qubits(), spec.vectors.col(0))};
}

Eigen::MatrixXcd evolution_matrix(const SpectralData& spec, double t) {
  Eigen::VectorXcd phases(spec.energies.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) phases(k) = std::polar(1.0, -t * spec.energies(k));
  return spec.vectors * phases.asDiagonal() * spec.vectors.adjoint();
}

StateVector exact_evolve(const SpectralData& spec, double t, const StateVector& psi) {
  if (spec.vectors.rows() != static_cast<Eigen::Index>(psi.dim())) throw DimensionError("spectrum does not match the state");
  Eigen::VectorXcd c = spec.vectors.adjoint() * psi.amplitudes;
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::polar(1.0, -t * spec.energies(k));
  StateVector out = psi;
  out.amplitudes = spec.vectors * c;
  return out;
}

StateVector exact_evolve(const PauliHamiltonian& h, double t, const StateVector& psi) {
  check_match(psi, h);
  return exact_evolve(diagonalize(h), t, psi);
}

void apply_pauli(StateVector& psi, const PauliString& p) {
  check_match(psi, p);
  kernels::mix(psi.amplitudes.data(), psi.dim(), p.x_mask(), p.z_mask(), 0.0, pauli_phase(p));
}

void apply_pauli_rotation(StateVector& psi, const PauliString& p, double phi) {
  check_match(psi, p);
  const cplx w = cplx(0.0, -std::sin(phi)) * pauli_phase(p);
  kernels::mix(psi.amplitudes.data(), psi.dim(), p.x_mask(), p.z_mask(), std::cos(phi), w);
}

void apply_pauli_rotation(Eigen::MatrixXcd& columns, const PauliString& p, double phi) {
  if (columns.rows() != (Eigen::Index{1} << p.n_qubits())) throw DimensionError("matrix rows do not match the Pauli string");
  const cplx w = cplx(0.0, -std::sin(phi)) * pauli_phase(p);
  const double c = std::cos(phi);
  for (Eigen::Index j = 0; j < columns.cols(); ++j)
    kernels::mix(columns.col(j).data(), static_cast<std::size_t>(columns.rows()), p.x_mask(), p.z_mask(), c, w);
}

Eigen::VectorXcd apply_hamiltonian(const PauliHamiltonian& h, const Eigen::VectorXcd& psi) {
  if (psi.size() != (Eigen::Index{1} << h.n_qubits())) throw DimensionError("vector length does not match the Hamiltonian");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.size());
  Eigen::VectorXcd tmp(psi.size());
  for (const auto& t : h.terms()) {
    tmp = psi;
    kernels::mix(tmp.data(), static_cast<std::size_t>(tmp.size()), t.pauli.x_mask(), t.pauli.z_mask(), 0.0,
                 t.coeff * pauli_phase(t.pauli));
    out += tmp;
  }
  return out;
}

cplx expectation(const StateVector& psi, const PauliString& p) {
  check_match(psi, p);
  return pauli_phase(p) * kernels::expect(psi.amplitudes.data(), psi.dim(), p.x_mask(), p.z_mask());
}

double expectation(const StateVector& psi, const PauliHamiltonian& h) {
  check_match(psi, h);
  double e = 0.0;
  for (const auto& t : h.terms()) e += t.coeff * expectation(psi, t.pauli).real();
  return e;
}

cplx signal_g(const SpectralData& spec, const StateVector& psi, double t) {
  const Eigen::VectorXcd c = spec.vectors.adjoint() * psi.amplitudes;
  cplx g = 0.0;
  for (Eigen::Index k = 0; k < c.size(); ++k) g += std::norm(c(k)) * std::polar(1.0, -t * spec.energies(k));
  return g;
}

cplx signal_g(const PauliHamiltonian& h, const StateVector& psi, double t) {
  check_match(psi, h);
  return signal_g(diagonalize(h), psi, t);
}

Eigen::VectorXd overlaps(const SpectralData& spec, const StateVector& psi) {
  return (spec.vectors.adjoint() * psi.amplitudes).cwiseAbs2();
}

std::vector<PauliHamiltonian> term_slots(const PauliHamiltonian& h) {
  std::vector<PauliHamiltonian> slots;
  slots.reserve(h.size());
  for (const auto& t : h.terms()) slots.emplace_back(h.n_qubits(), std::vector<PauliTerm>{t});
  return slots;
}

PauliHamiltonian sum_slots(const std::vector<PauliHamiltonian>& slots) {
  if (slots.empty()) throw ConfigError("no slot Hamiltonians given");
  PauliHamiltonian out(slots.front().n_qubits());
  for (const auto& s : slots) {
    if (s.n_qubits() != out.n_qubits()) throw DimensionError("slot Hamiltonians have different qubit counts");
    for (const auto& t : s.terms()) out.add_term(t.coeff, t.pauli);
  }
  return out;
}

Eigen::MatrixXcd formula_matrix(const std::vector<PauliHamiltonian>& slots, const ProductFormulaSchedule& schedule,
                                double delta) {
  if (slots.size() != schedule.n_slots)
    throw ConfigError("schedule has " + std::to_string(schedule.n_slots) + " slots but " + std::to_string(slots.size()) +
                      " Hamiltonians were given");
  const std::size_t n = slots.empty() ? 0 : slots.front().n_qubits();
  check_dense(n);
  const auto dim = Eigen::Index{1} << n;
  std::vector<SpectralData> spectra(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i)
    if (slots[i].size() > 1) spectra[i] = diagonalize(slots[i]);
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Identity(dim, dim);
  for (const auto& e : schedule.entries) {
    const PauliHamiltonian& slot = slots[e.term];
    const double t = e.fraction * delta;
    if (slot.size() == 1) {
      apply_pauli_rotation(s, slot[0].pauli, slot[0].coeff * t);
    } else if (slot.size() > 1) {
      s = evolution_matrix(spectra[e.term], t) * s;
    }
  }
  return s;
}

double formula_ground_energy(const std::vector<PauliHamiltonian>& slots, const ProductFormulaSchedule& schedule,
                             double delta) {
  if (delta == 0.0) throw ConfigError("formula_ground_energy needs a nonzero step");
  const PauliHamiltonian h = sum_slots(slots);
  const SpectralData spec = diagonalize(h);
  const double radius = spec.energies.cwiseAbs().maxCoeff();
  if (std::abs(delta) * radius >= std::numbers::pi) {
    std::ostringstream msg;
    msg << "step " << delta << " times spectral radius " << radius << " is at least pi; the phase is ambiguous";
    throw NumericError(msg.str());
  }
  const Eigen::MatrixXcd s = formula_matrix(slots, schedule, delta);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(s);
  if (es.info() != Eigen::Success) throw NumericError("eigensolver failed on the product formula");
  const Eigen::VectorXcd g = spec.vectors.col(0);
  Eigen::Index best = 0;
  double best_overlap = -1.0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const auto v = es.eigenvectors().col(k);
    const double ov = std::abs(g.dot(v)) / v.norm();
    if (ov > best_overlap) {
      best_overlap = ov;
      best = k;
    }
  }
  return -std::arg(es.eigenvalues()(best)) / delta;
}

double formula_ground_energy(const PauliHamiltonian& h, const ProductFormulaSchedule& schedule, double delta) {
  return formula_ground_energy(term_slots(h), schedule, delta);
}

}  // namespace pfq
