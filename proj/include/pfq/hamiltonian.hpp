#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "pfq/pauli.hpp"

namespace pfq {

// ---- Pauli files ---------------------------------------------------------
// Format: optional '#' comment lines, a header "qubits <n>", then one "<coeff> <string>"
// per term. Coefficients are written with 17 significant digits, so save/load is exact.
PauliHamiltonian load_pauli_file(const std::string& path);
void save_pauli_file(const std::string& path, const PauliHamiltonian& h);
PauliHamiltonian parse_pauli_text(const std::string& text);
std::string format_pauli_text(const PauliHamiltonian& h);

// ---- Fermionic tensors ---------------------------------------------------
// H = core + Σ h_pq a†_pσ a_qσ + ½ Σ h_pqrs a†_pσ a†_rτ a_sτ a_qσ over spatial orbitals.
struct FermionTensors {
  std::size_t n_orbitals = 0;
  std::size_t n_electrons = 0;
  double core_energy = 0.0;
  Eigen::MatrixXd one_body;
  std::vector<double> two_body;  // index ((p*N + q)*N + r)*N + s

  static FermionTensors zeros(std::size_t n_orbitals, std::size_t n_electrons);

  std::size_t index(std::size_t p, std::size_t q, std::size_t r, std::size_t s) const {
    return ((p * n_orbitals + q) * n_orbitals + r) * n_orbitals + s;
  }
  double v(std::size_t p, std::size_t q, std::size_t r, std::size_t s) const { return two_body[index(p, q, r, s)]; }
  double& v(std::size_t p, std::size_t q, std::size_t r, std::size_t s) { return two_body[index(p, q, r, s)]; }
  // Writes value to all eight symmetry-related positions.
  void set_symmetric(std::size_t p, std::size_t q, std::size_t r, std::size_t s, double value);

  // Two-body tensor as the N²×N² matrix over pair indices (pq),(rs).
  Eigen::MatrixXd pair_matrix() const;
};

// Throws ConfigError naming the first violated symmetry.
void check_symmetries(const FermionTensors& t, double tol = 1e-10);

// Structured text: first line "pfq-tensors 1", then orbitals/electrons/core_energy lines,
// the dense one-body block, and a sparse two-body list with one entry per symmetry class.
FermionTensors load_tensor_file(const std::string& path);
void save_tensor_file(const std::string& path, const FermionTensors& t);
FermionTensors parse_tensor_text(const std::string& text);
std::string format_tensor_text(const FermionTensors& t);

// Jordan-Wigner qubit of spin orbital (p, σ): up at 2p, down at 2p+1.
inline std::size_t jw_qubit(std::size_t p, int spin) { return 2 * p + static_cast<std::size_t>(spin); }

struct QubitHamiltonian {
  PauliHamiltonian paulis;  // identity removed, terms in lexicographic order
  double constant = 0.0;    // identity coefficient including the core energy
};

// Expands the Majorana form of H under Jordan-Wigner with γ_0 = a† + a, γ_1 = i(a† − a).
QubitHamiltonian majorana_pauli_decompose(const FermionTensors& t, double drop_tol = 1e-13);

// λ of the qubit Hamiltonian, identity excluded.
double pauli_weight(const FermionTensors& t);

// ---- Factorization -------------------------------------------------------
struct Factor {
  Eigen::VectorXd eigenvalues;  // λ_k, sorted by decreasing magnitude, length ρ
  Eigen::MatrixXd rotation;     // N×N orthogonal; column k pairs with eigenvalues[k]
  double weight = 0.0;          // eigenvalue of the pair matrix this factor came from

  std::size_t rank() const { return static_cast<std::size_t>(eigenvalues.size()); }
  // u diag(λ) uᵀ over the retained eigenvalues.
  Eigen::MatrixXd matrix() const;
};

struct FactorizedHamiltonian {
  std::size_t n_orbitals = 0;
  Eigen::MatrixXd one_body_modified;  // h_pq − ½ Σ_r h_prrq
  std::vector<Factor> factors;        // sorted by decreasing pair-matrix eigenvalue
  double dropped_weight = 0.0;        // Σ of discarded pair-matrix eigenvalues

  std::size_t rank() const { return factors.size(); }
  std::vector<std::size_t> ranks() const;
  // Σ_j L^(j)_pq L^(j)_rs in the FermionTensors index layout.
  std::vector<double> reconstruct_two_body() const;
};

FactorizedHamiltonian double_factorize(const FermionTensors& t, double first_tol);
FactorizedHamiltonian truncate_second_factorization(const FactorizedHamiltonian& f, double eps_prime);

// Adds Σ_j [f_j A_j + ½ f_j² (N̂ − n)](N̂ − n) with A_j = Σ L^(j)_pq E_pq. The n-electron
// spectrum is unchanged; the constant ½ n² Σ f_j² is folded into core_energy.
FermionTensors symmetry_shift(const FermionTensors& t, const FactorizedHamiltonian& f,
                              const std::vector<double>& shifts);

// h' = u h uᵀ and the matching four-index transform.
FermionTensors orbital_rotate(const FermionTensors& t, const Eigen::MatrixXd& u);

// Exponential of the antisymmetric matrix built from the strictly upper triangle `params`.
Eigen::MatrixXd rotation_from_params(std::size_t n, const std::vector<double>& params);

struct LambdaOptConfig {
  int max_iterations = 200;        // gradient steps across all blocks
  double relative_tolerance = 1e-6;
  double fd_step = 1e-5;
  double initial_step = 0.1;
  bool factor_init = true;         // start from the eigenbasis of the largest factor
  bool optimize_shift = false;     // alternate rotation and symmetry-shift blocks
  int max_blocks = 4;
  double first_tol = 1e-10;
  std::uint64_t seed = 0;
  double init_noise = 0.0;         // optional random start perturbation of the rotation
};

struct LambdaOptResult {
  FermionTensors tensors;
  Eigen::MatrixXd rotation;        // total u applied (shifts are applied afterwards)
  std::vector<double> shifts;
  std::vector<double> history;     // λ after each accepted step, non-increasing
  bool converged = false;
};

LambdaOptResult optimize_lambda(const FermionTensors& t, const LambdaOptConfig& config = {});

// Synthetic hydrogen-chain-like model: soft Coulomb kernel between atoms, exponentially
// decaying hopping, and a small bond-charge term. The localized basis is the site basis;
// the canonical basis diagonalizes the one-body matrix.
enum class OrbitalBasis { Localized, Canonical };
FermionTensors synthetic_chain(std::size_t atoms, double spacing, OrbitalBasis basis = OrbitalBasis::Canonical);

}  // namespace pfq
