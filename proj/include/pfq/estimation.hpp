#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "pfq/formulas.hpp"
#include "pfq/rng.hpp"
#include "pfq/simulator.hpp"

namespace pfq {

// ---- Hadamard test -------------------------------------------------------
// One ±1 outcome of a Hadamard test whose controlled unitary has ⟨ψ|U|ψ⟩ = amplitude:
// P(+1) = (1 + Re e^{iθ}·amplitude)/2.
int hadamard_shot(cplx amplitude, double theta, Rng& rng);

// Bases used for the two components of a complex sample: E[x + iy] = ⟨ψ|U|ψ⟩.
inline constexpr double kThetaReal = 0.0;
inline constexpr double kThetaImag = -1.5707963267948966;

struct HadamardOutcome {
  int x = 1;
  int y = 1;
  cplx z() const { return {static_cast<double>(x), static_cast<double>(y)}; }
};

// Statevector Hadamard tests on a sampled circuit, on exact evolution e^{−iHt}, and in
// sign mode, where the ancilla selects between a forward and a backward circuit so the
// mean is Re e^{iθ}⟨W_back ψ|W_fwd ψ⟩.
int hadamard_sample(const StateVector& psi, const SampledCircuit& c, double theta, Rng& rng);
int hadamard_sample(const SpectralData& spec, const StateVector& psi, double t, double theta, Rng& rng);
cplx sign_mode_amplitude(const StateVector& psi, const SampledCircuit& forward, const SampledCircuit& backward);
int hadamard_sample_sign_mode(const StateVector& psi, const SampledCircuit& forward, const SampledCircuit& backward,
                              double theta, Rng& rng);

// Source of Hadamard amplitudes: called with a per-test seed, returns ⟨ψ|U|ψ⟩ for a fresh
// circuit built from that seed (or the same value every time for exact evolution).
using AmplitudeSource = std::function<cplx(std::uint64_t seed)>;

// Mean of n samples x + iy; every Hadamard test draws its own circuit.
cplx estimate_Z(const AmplitudeSource& source, std::size_t n, std::uint64_t seed);

// ---- Robust phase estimation ---------------------------------------------
double angle_distance(double a, double b);
// Wraps into (−π, π].
double wrap_angle(double a);

// Refines θ round by round: θ_m is the solution of k_m θ ≡ φ_m (mod 2π) closest to θ_{m−1}.
// multipliers defaults to 2^m.
double rpe_core(const std::vector<double>& angles, const std::vector<double>& multipliers = {});

enum class Method { Exact, Qdrift, Rte, Partial };
const char* method_name(Method m);
Method parse_method(const std::string& name);

struct RPEConfig {
  int rounds = 6;            // M
  double xi = 1.0;           // ξ ∈ (0, 1]
  double base_samples = 11;  // N_M
  double ramp = 4.11;        // D
  double overhead = 0.0;     // 0 picks 1 for exact evolution and e otherwise
  double last_multiplier = 0.0;  // K_M; 0 means 2^M
  Method method = Method::Exact;
  int n_max = 8;             // RTE truncation
  // Partial randomization: the phase unit is δ (normalized units) and round m applies S_p(δ)^{2^m}.
  int order = 2;
  double delta = 0.0;
  double kappa = 2.0;
  std::size_t deterministic_terms = 0;
  bool statevector = false;  // sample circuits on a statevector instead of using exact expectations
  std::uint64_t seed = 0;
};

// Picks M = ⌈log₂(ξ/ε)⌉ and K_M = ⌈ξ/ε⌉ for a target error ε on the normalized Hamiltonian.
RPEConfig rpe_config_for(double epsilon, double xi, Method method);

struct RoundPlan {
  int m = 0;
  double multiplier = 1.0;  // t_m for time evolution, s_m for partial
  std::size_t samples = 0;  // N_m complex samples, i.e. 2N_m Hadamard tests
  std::size_t depth = 0;    // rotations per circuit
  double tau = 0.0;         // step for randomized methods
};

// N_M is inflated to N_M·⌈1/ξ²⌉ when ξ < 1; every round's count is ⌈overhead·(N_M + D(M−m))⌉.
std::vector<RoundPlan> rpe_schedule(const RPEConfig& config);

struct RPEResult {
  double theta = 0.0;       // raw RPE output in (−π, π]
  double estimate = 0.0;    // energy; normalized units from the signal-model runner
  std::vector<double> angles;
  std::vector<RoundPlan> rounds;
  double r_tot = 0, r_max = 0, t_tot = 0, t_max = 0, circuits = 0;
};

// The signal in normalized units. mean() is the Hadamard amplitude expected for a round;
// draw() returns the amplitude of one sampled circuit.
class SignalModel {
 public:
  virtual ~SignalModel() = default;
  virtual cplx mean(const RoundPlan& round) const = 0;
  virtual cplx draw(const RoundPlan& round, std::uint64_t /*seed*/) const { return mean(round); }
  // Rotations per circuit; the schedule's value unless the model knows better.
  virtual std::size_t depth(const RoundPlan& round) const { return round.depth; }
};

// Closed form Σ_k c_k f(E_k)^r over a spectrum, for exact evolution, qDRIFT and RTE.
class SpectralSignal : public SignalModel {
 public:
  SpectralSignal(std::vector<double> energies, std::vector<double> weights, Method method, int n_max = 8);
  cplx mean(const RoundPlan& round) const override;

 private:
  std::vector<double> energies_, weights_;
  Method method_;
  int n_max_;
};

// Samples circuits on a statevector. H is normalized.
class CircuitSignal : public SignalModel {
 public:
  CircuitSignal(NormalizedHamiltonian h, StateVector psi, Method method, int n_max = 8);
  cplx mean(const RoundPlan& round) const override;
  cplx draw(const RoundPlan& round, std::uint64_t seed) const override;

 private:
  NormalizedHamiltonian h_;
  StateVector psi_;
  SpectralSignal spectral_;
  Method method_;
  int n_max_;
};

// Partially randomized product formula; round multiplier is the repetition count s.
class PartialSignal : public SignalModel {
 public:
  PartialSignal(PartialSplit split, StateVector psi, int order, double delta, double kappa, int n_max = 8);
  cplx mean(const RoundPlan& round) const override;
  cplx draw(const RoundPlan& round, std::uint64_t seed) const override;
  std::size_t depth(const RoundPlan& round) const override;
  PartialPlan plan(std::size_t s) const;

 private:
  PartialSplit split_;
  StateVector psi_;
  int order_;
  double delta_, kappa_;
  int n_max_;
};

// Runs the rounds on a normalized-units signal and fills costs. With statevector=false the
// outcome of each Hadamard test is drawn from mean(); otherwise from draw() per test.
RPEResult rpe_run(const SignalModel& signal, const RPEConfig& config);

// Normalizes H (identity terms become an energy offset), builds the signal model for the
// configured method and returns the estimate in the units of H.
RPEResult rpe_run(const PauliHamiltonian& h, const StateVector& psi, const RPEConfig& config);

}  // namespace pfq
