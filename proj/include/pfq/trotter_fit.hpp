#pragma once

#include <vector>

#include "pfq/pauli.hpp"
#include "pfq/simulator.hpp"

namespace pfq {

struct ErrorCurve {
  int order = 1;
  std::vector<double> deltas;     // strictly increasing
  std::vector<double> gs_errors;  // |E₀ − Ẽ₀(δ)|
  std::vector<double> op_errors;  // ‖e^{−iδH} − S_p(δ)‖ (spectral norm)
};

// Slot form covers lumped decompositions; the plain form uses one slot per term.
ErrorCurve measure_error_curve(const std::vector<PauliHamiltonian>& slots, int order, const std::vector<double>& deltas);
ErrorCurve measure_error_curve(const PauliHamiltonian& h, int order, const std::vector<double>& deltas);

struct PowerLawFit {
  double constant = 0.0;
  double exponent = 0.0;
  double r_squared = 0.0;
  bool acceptable() const { return r_squared >= 0.99; }
};

// Unweighted least squares of log y on log x. Needs ≥ 3 positive points.
PowerLawFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys);

// Fits only the points whose y exceeds floor (useful to drop rounding-limited errors).
PowerLawFit fit_power_law_above(const std::vector<double>& xs, const std::vector<double>& ys, double floor);

// 4 Σ_{a<b} |h_a h_b| over anticommuting pairs, i.e. Σ_{a≠b} of the commutator norms.
double alpha_commutator(const PauliHamiltonian& h);

// 12 log-spaced points per decade over [10^−2.5, 10^−0.5]/λ.
std::vector<double> default_delta_grid(double lambda);
std::vector<double> log_grid(double lo, double hi, int points_per_decade);

struct PartialErrorPoint {
  std::size_t l_d = 0;
  double randomized_fraction = 0.0;  // λ_R/λ
  double c_gs = 0.0;                 // C in |E₀ − Ẽ₀| ≈ C δ^p
  PowerLawFit fit;
};

// For each L_D, measures C_gs of the decomposition (top-L_D terms, H_R as one slot).
// The constant is fitted with the exponent pinned to max(p, 2) unless every error is
// below the floor, in which case C_gs = 0.
std::vector<PartialErrorPoint> partial_error_sweep(const PauliHamiltonian& h, int order,
                                                   const std::vector<std::size_t>& l_d_values,
                                                   const std::vector<double>& deltas);

// Least-squares C for y ≈ C x^k with k fixed (in log space).
double fit_constant(const std::vector<double>& xs, const std::vector<double>& ys, double exponent);

}  // namespace pfq
