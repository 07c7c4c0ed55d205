#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "pfq/pauli.hpp"

namespace pfq {

enum class GateMetric { Toffoli, TwoQubit };

struct ResourceReport {
  std::string method;
  double gates_total = 0;            // in the chosen metric
  double gates_max_per_circuit = 0;
  double toffoli_total = 0;
  double toffoli_max_per_circuit = 0;
  double two_qubit_total = 0;
  double rotations_total = 0;        // r_tot
  double rotations_max = 0;          // r_max
  double circuits = 0;
  std::size_t logical_qubits = 0;
  std::size_t ancilla_qubits = 0;
  bool feasible = true;
  std::string note;
  // Every intermediate parameter (δ, M, K_M, J, K, κ, L_D, ε split, ...), sorted by name.
  std::map<std::string, double> params;
};

struct CostModelInputs {
  double lambda = 0.0;
  double lambda_r = 0.0;
  std::size_t n_terms = 0;           // L
  std::size_t l_d = 0;
  double c_gs = 0.0;
  int order = 2;
  double epsilon = 1.5e-3;
  double epsilon_synth = 1e-4;
  double xi = 1.0;
  double mean_support = 0.0;         // average Pauli support |P̄|
  std::size_t rotations_per_stage = 0;  // n_rot; 0 means L
  std::vector<std::size_t> ranks;    // double-factorized ranks, optional
  std::size_t n_qubits = 0;
  GateMetric metric = GateMetric::Toffoli;
  int hwp_group = 10;                // K for Hamming-weight phasing of randomized rotations
  double g_det = 0.0;                // gates per deterministic exponential; 0 derives it
  double g_rand = 0.0;               // gates per randomized rotation; 0 derives it
};

// Sample schedule constants shared with the estimation module.
inline constexpr double kBaseSamples = 11.0;
inline constexpr double kSampleRamp = 4.11;

// T gates to synthesize one rotation to error ε′: 1.14 log₂(1/ε′) + 9.2; one Toffoli per 2 T.
double synthesis_t_count(double eps_prime);
double synthesis_toffoli_count(double eps_prime);

// Stages of the order-p Suzuki formula: 1 for p = 1, 2·5^{k−1} for p = 2k.
std::size_t stage_count(int order);

// Trotter step and error split minimizing 1/(ε_qpe·ε_trot^{1/p}) under ε² = ε_qpe² + ε_trot².
struct ErrorSplit {
  double epsilon_qpe = 0, epsilon_trotter = 0, delta = 0;
};
ErrorSplit optimal_error_split(double epsilon, double c_gs, int order);

ResourceReport deterministic_cost(const CostModelInputs& in);

enum class RandomizedMethod { Qdrift, Rte };
ResourceReport randomized_cost(double lambda, double epsilon, double xi, RandomizedMethod method, int hwp_group = 10,
                               double mean_support = 0.0, std::size_t n_qubits = 0);

struct HwpRate {
  long numerator = 0;    // Toffolis per rotation = numerator / denominator, exactly
  long denominator = 1;
  std::size_t ancillas = 0;
  double rate() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
};
// 1 + (J − 2)/K Toffolis per rotation and K + 2J − 2 ancillas.
HwpRate hwp_rate(int group_size, int angle_bits);

struct PartialConstants {
  double deterministic = 30.0;       // multiplies G_det N_stage L_D e^{2/κ} (0.1π)/(δ ε_qpe)
  double randomized = 280.0 / 9.0;   // multiplies G_rand κ e^{2/κ} (0.1πλ_R)²/ε_qpe²
};
// The same two constants derived from N_M and D: 2(N_M + D) and 8(N_M/3 + D/9).
PartialConstants schedule_partial_constants(double base = kBaseSamples, double ramp = kSampleRamp);

// Optimal κ for a·e^{2/κ} + b·κ·e^{2/κ} by bracketed root search of the derivative.
double optimal_kappa(double a, double b);

// Minimizes over κ and δ (δ fixed when fixed_delta > 0). ε_qpe = √(ε² − C_gs² δ^{2p}).
ResourceReport partial_cost(const CostModelInputs& in, double g_det, double g_rand, double fixed_delta = 0.0,
                            const PartialConstants& constants = {});

struct PartitionSweep {
  std::size_t best_l_d = 0;
  ResourceReport best;
  std::vector<double> lambda_r;      // per L_D = 0..L
  std::vector<double> costs;         // per L_D
};
// h must be sorted by decreasing |h_l|. g_det may depend on L_D (e.g. the mean support of
// the deterministic terms).
PartitionSweep sweep_partition(const PauliHamiltonian& h, double c_gs, double epsilon,
                               const std::function<double(std::size_t l_d)>& g_det, double g_rand,
                               const CostModelInputs& base = {});

// Mean over terms of max(2|P| − 3, 0).
double pauli_two_qubit_cost(const PauliHamiltonian& h);

struct DfStageCost {
  std::size_t givens = 0;            // basis changes, including the one-body change
  std::size_t diagonal_two_qubit = 0;
  std::size_t rotations = 0;         // Σ ρ_l (N − 4), clamped at zero
  std::size_t two_qubit() const { return givens + diagonal_two_qubit; }
};
DfStageCost df_cost(std::size_t n_orbitals, const std::vector<std::size_t>& ranks);

struct BitwiseReport {
  int n_bits = 0;
  double delta = 0;
  std::vector<std::size_t> terms_per_bit;   // L_J for J = 1..n_bits (index J−1)
  std::size_t integer_turns = 0;            // Σ ⌊|h|δ/π⌋, applied as exact signs
  std::vector<double> residual_angle;       // per term, in units of π
  double residual_weight = 0;               // Σ residual·π/δ, moved into H_R
  std::vector<double> toffoli_per_rotation; // per bit, Hamming-weight phasing with group K
  double toffoli_per_stage = 0;
};
BitwiseReport bitwise_decompose_report(const PauliHamiltonian& h_d, int n_bits, double delta, int group_size = 12);

// Record lines "key=value" for every field of a report.
std::string format_report(const ResourceReport& r);

}  // namespace pfq
