#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "pfq/pauli.hpp"
#include "pfq/schedule.hpp"

namespace pfq {

// Largest qubit count the dense routines accept. Defaults to 14.
std::size_t dense_limit();
void set_dense_limit(std::size_t n_qubits);
// Throws DimensionError when n exceeds the dense limit.
void check_dense(std::size_t n_qubits);

struct StateVector {
  std::size_t n_qubits = 0;
  Eigen::VectorXcd amplitudes;

  StateVector() = default;
  explicit StateVector(std::size_t n);  // |0…0⟩
  StateVector(std::size_t n, Eigen::VectorXcd amps);

  static StateVector basis(std::size_t n, std::uint64_t index);
  std::size_t dim() const { return static_cast<std::size_t>(amplitudes.size()); }
  double norm() const { return amplitudes.norm(); }
  void normalize();
};

// |⟨a|b⟩|², insensitive to global phase.
double fidelity(const StateVector& a, const StateVector& b);
cplx inner(const StateVector& a, const StateVector& b);

struct SpectralData {
  Eigen::VectorXd energies;   // ascending
  Eigen::MatrixXcd vectors;   // column k is the eigenvector of energies[k]
};

Eigen::MatrixXcd pauli_matrix(const PauliString& p);
Eigen::MatrixXcd dense_matrix(const PauliHamiltonian& h);
SpectralData diagonalize(const PauliHamiltonian& h);

struct GroundState {
  double energy = 0.0;
  StateVector state;
};
GroundState ground_state(const PauliHamiltonian& h);

StateVector exact_evolve(const PauliHamiltonian& h, double t, const StateVector& psi);
StateVector exact_evolve(const SpectralData& spec, double t, const StateVector& psi);
// e^{−itH} as a dense matrix.
Eigen::MatrixXcd evolution_matrix(const SpectralData& spec, double t);

// In place: ψ ← Pψ and ψ ← e^{−iφP}ψ = cos φ ψ − i sin φ Pψ. Signs on P are honoured.
void apply_pauli(StateVector& psi, const PauliString& p);
void apply_pauli_rotation(StateVector& psi, const PauliString& p, double phi);
// Same operations on every column of a matrix of states.
void apply_pauli_rotation(Eigen::MatrixXcd& columns, const PauliString& p, double phi);

// Hψ without forming the matrix.
Eigen::VectorXcd apply_hamiltonian(const PauliHamiltonian& h, const Eigen::VectorXcd& psi);
cplx expectation(const StateVector& psi, const PauliString& p);
double expectation(const StateVector& psi, const PauliHamiltonian& h);

// ⟨ψ|e^{−iHt}|ψ⟩.
cplx signal_g(const PauliHamiltonian& h, const StateVector& psi, double t);
cplx signal_g(const SpectralData& spec, const StateVector& psi, double t);
// Ground-state overlaps c_k = |⟨ψ_k|ψ⟩|².
Eigen::VectorXd overlaps(const SpectralData& spec, const StateVector& psi);

// Dense S(δ) for a schedule over slot Hamiltonians. A slot holding a single Pauli term
// uses the closed-form rotation; larger slots are exponentiated through their spectrum.
Eigen::MatrixXcd formula_matrix(const std::vector<PauliHamiltonian>& slots, const ProductFormulaSchedule& schedule,
                                double delta);
// One slot per term of h.
std::vector<PauliHamiltonian> term_slots(const PauliHamiltonian& h);

// Effective ground energy −arg(μ)/δ of S(δ), where μ is the eigenvalue whose eigenvector
// overlaps most with the exact ground state. Throws NumericError if |δ|·ρ(H) ≥ π.
double formula_ground_energy(const PauliHamiltonian& h, const ProductFormulaSchedule& schedule, double delta);
double formula_ground_energy(const std::vector<PauliHamiltonian>& slots, const ProductFormulaSchedule& schedule,
                             double delta);

// Sum of the slot Hamiltonians as one Pauli Hamiltonian.
PauliHamiltonian sum_slots(const std::vector<PauliHamiltonian>& slots);

}  // namespace pfq
