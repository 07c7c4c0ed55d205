#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pfq/pauli.hpp"
#include "pfq/rng.hpp"
#include "pfq/schedule.hpp"
#include "pfq/simulator.hpp"

namespace pfq {

// ---- Sampled circuits ----------------------------------------------------
// Rotation: e^{−i·angle·P} drawn at random. Pauli: a bare P. Exp: a deterministic
// e^{−i·angle·P} coming from a product-formula term (term and fraction are recorded).
enum class GateKind { Rotation, Pauli, Exp };

struct Gate {
  GateKind kind = GateKind::Rotation;
  PauliString pauli;
  double angle = 0.0;
  std::size_t term = 0;
  double fraction = 0.0;
};

struct SampledCircuit {
  std::size_t n_qubits = 0;
  std::vector<Gate> gates;  // applied in order
  cplx phase{1.0, 0.0};     // global factor of the sampled branch, ±1 for RTE
  double normalization = 1.0;  // B; the estimator is B·⟨ψ|W|ψ⟩
  std::uint64_t seed = 0;

  std::size_t rotation_count() const;  // Rotation and Exp gates
};

// ψ ← phase · W ψ.
void apply_circuit(const SampledCircuit& c, StateVector& psi);
// ⟨ψ|phase·W|ψ⟩.
cplx circuit_amplitude(const SampledCircuit& c, const StateVector& psi);

// One gate per line: "R <pauli> <angle>", "P <pauli>", "E <pauli> <angle> <term> <fraction>",
// after a header with qubits, seed, normalization and phase.
std::string serialize_circuit(const SampledCircuit& c);
SampledCircuit parse_circuit(const std::string& text);

// ---- qDRIFT --------------------------------------------------------------
// r rotations e^{−i arctan(τ) P_l} with l drawn from p_l. Works on the normalized H.
SampledCircuit qdrift_sample(const NormalizedHamiltonian& h, double tau, std::size_t r, std::uint64_t seed);
// (1+τ²)^{−r/2} ⟨ψ|(I − iτH)^r|ψ⟩ with H = Σ p_l P_l, by repeated application.
cplx qdrift_expectation(const NormalizedHamiltonian& h, const StateVector& psi, double tau, std::size_t r);
// Same quantity from spectral data of Σ p_l P_l.
cplx qdrift_expectation(const SpectralData& spec, const StateVector& psi, double tau, std::size_t r);
// Per-eigenvalue factor (1 − iτE)/√(1+τ²).
cplx qdrift_factor(double energy, double tau);

// ---- Randomized Taylor expansion -----------------------------------------
// c_n = τⁿ/n! · √(1 + τ²/(n+1)²) for even n ≤ n_max (index n/2).
std::vector<double> rte_order_weights(double tau, int n_max);
// One-segment normalization Σ c_n.
double rte_normalization(double tau, int n_max);
// φ_n = arctan(τ/(n+1)); τ may be negative for backward evolution.
double rte_angle(double tau, int n);
// Σ_{even n ≤ n_max} [(−iτE)ⁿ/n! + (−iτE)^{n+1}/(n+1)!]: what one segment does to an
// eigenvalue E before dividing by the normalization.
cplx rte_segment_factor(double energy, double tau, int n_max);
// Tail Σ_{n > n_max+1} |τ|ⁿ/n!, bounding one segment's truncation error in operator norm.
double rte_truncation_bound(double tau, int n_max);

// Appends one segment, (−1)^{n/2} V_l(φ_n) P_{l_n}⋯P_{l_1}, to c.
void rte_append_segment(SampledCircuit& c, const NormalizedHamiltonian& h, double tau, int n_max, Rng& rng);

SampledCircuit rte_sample(const NormalizedHamiltonian& h, double tau, std::size_t r, int n_max, std::uint64_t seed);
// B^{-1} ⟨ψ|T(τH)^r|ψ⟩ with T the truncated segment series, evaluated through spectral data.
cplx rte_expectation(const SpectralData& spec, const StateVector& psi, double tau, std::size_t r, int n_max);

// ---- Partial randomization -----------------------------------------------
struct PartialSplit {
  std::size_t n_qubits = 0;
  PauliHamiltonian deterministic;   // the L_D largest-weight terms, original order
  PauliHamiltonian randomized;      // the rest, original order
  std::vector<std::size_t> deterministic_index;  // positions in the input Hamiltonian
  double lambda = 0.0;
  double lambda_d = 0.0;
  double lambda_r = 0.0;
};

PartialSplit partial_split(const PauliHamiltonian& h, std::size_t l_d);
// Slot Hamiltonians for schedules with the randomized slot: each deterministic term, then H_R.
std::vector<PauliHamiltonian> partial_slots(const PartialSplit& split);

struct PartialStep {
  std::size_t term = 0;   // slot index; == deterministic.size() for the randomized slot
  double fraction = 0.0;
  std::size_t r = 0;      // RTE segments for randomized steps
  double tau = 0.0;       // signed segment step for randomized steps (in units of normalized H_R)
};

struct PartialPlan {
  ProductFormulaSchedule schedule;
  double delta = 0.0;
  std::size_t repetitions = 0;  // s
  double kappa = 0.0;
  int n_max = 8;
  double delta_tilde = 0.0;     // Σ |δ_i| over randomized steps of one S_p(δ)
  std::vector<PartialStep> steps;
  double normalization = 1.0;   // Π B_i over all s repetitions
  std::size_t randomized_rotations = 0;  // Σ r_i · s
  std::size_t deterministic_rotations = 0;
};

PartialPlan partial_plan(const PartialSplit& split, int order, double delta, std::size_t s, double kappa, int n_max = 8);
// Backward plans use −δ; for symmetric schedules this realizes S_p(δ)^† per repetition.
SampledCircuit partial_random_sample(const PartialSplit& split, const PartialPlan& plan, std::uint64_t seed);
// Dense expected operator B·E[W] = Π over steps of e^{−iδ_i H_l} or T(τ_i H_R)^{r_i}.
Eigen::MatrixXcd partial_expected_operator(const PartialSplit& split, const PartialPlan& plan);

// Same plan with δ negated.
PartialPlan reversed_plan(const PartialPlan& plan);

}  // namespace pfq
