#include "pfq/trotter_fit.hpp"

#include <algorithm>
#include <cmath>

#include "pfq/error.hpp"
#include "pfq/formulas.hpp"
#include "pfq/parallel.hpp"

namespace pfq {

ErrorCurve measure_error_curve(const std::vector<PauliHamiltonian>& slots, int order, const std::vector<double>& deltas) {
  for (std::size_t i = 1; i < deltas.size(); ++i)
    if (!(deltas[i] > deltas[i - 1])) throw ConfigError("delta grid must be strictly increasing");
  const ProductFormulaSchedule sched = suzuki_schedule(order, slots.size());
  const PauliHamiltonian h = sum_slots(slots);
  const SpectralData spec = diagonalize(h);
  const double e0 = spec.energies(0);
  ErrorCurve c;
  c.order = order;
  c.deltas = deltas;
  c.gs_errors.assign(deltas.size(), 0.0);
  c.op_errors.assign(deltas.size(), 0.0);
  parallel_for(deltas.size(), [&](std::size_t i) {
    const double d = deltas[i];
    const Eigen::MatrixXcd diff = evolution_matrix(spec, d) - formula_matrix(slots, sched, d);
    c.op_errors[i] = Eigen::JacobiSVD<Eigen::MatrixXcd>(diff).singularValues()(0);
    c.gs_errors[i] = std::abs(e0 - formula_ground_energy(slots, sched, d));
  });
  return c;
}

ErrorCurve measure_error_curve(const PauliHamiltonian& h, int order, const std::vector<double>& deltas) {
  return measure_error_curve(term_slots(h), order, deltas);
}

PowerLawFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw ConfigError("fit needs equally many x and y values");
  if (xs.size() < 3) throw ConfigError("fit needs at least 3 points");
  const auto n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0) || !(ys[i] > 0)) throw NumericError("power-law fit needs positive data");
    const double lx = std::log(xs[i]), ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
  }
  const double vxx = sxx - sx * sx / n, vxy = sxy - sx * sy / n, vyy = syy - sy * sy / n;
  if (vxx <= 0) throw NumericError("power-law fit needs distinct x values");
  PowerLawFit f;
  f.exponent = vxy / vxx;
  f.constant = std::exp((sy - f.exponent * sx) / n);
  f.r_squared = vyy > 0 ? (vxy * vxy) / (vxx * vyy) : 1.0;
  return f;
}

PowerLawFit fit_power_law_above(const std::vector<double>& xs, const std::vector<double>& ys, double floor) {
  std::vector<double> fx, fy;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (ys[i] > floor) {
      fx.push_back(xs[i]);
      fy.push_back(ys[i]);
    }
  return fit_power_law(fx, fy);
}

double fit_constant(const std::vector<double>& xs, const std::vector<double>& ys, double exponent) {
  double s = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0) || !(ys[i] > 0)) continue;
    s += std::log(ys[i]) - exponent * std::log(xs[i]);
    ++n;
  }
  if (n == 0) throw NumericError("no positive points to fit");
  return std::exp(s / static_cast<double>(n));
}

double alpha_commutator(const PauliHamiltonian& h) {
  double a = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i)
    for (std::size_t j = i + 1; j < h.size(); ++j)
      if (!commutes(h[i].pauli, h[j].pauli)) a += std::abs(h[i].coeff * h[j].coeff);
  // Each unordered pair appears twice in the ordered sum and ‖[P, Q]‖ = 2.
  return 4.0 * a;
}

std::vector<double> log_grid(double lo, double hi, int per_decade) {
  if (!(lo > 0) || !(hi > lo) || per_decade < 1) throw ConfigError("log grid needs 0 < lo < hi");
  const double decades = std::log10(hi / lo);
  const int n = static_cast<int>(std::lround(decades * per_decade));
  std::vector<double> g;
  for (int i = 0; i <= n; ++i) g.push_back(lo * std::pow(10.0, decades * i / n));
  return g;
}

std::vector<double> default_delta_grid(double lambda) {
  if (!(lambda > 0)) throw ConfigError("lambda must be positive");
  return log_grid(std::pow(10.0, -2.5) / lambda, std::pow(10.0, -0.5) / lambda, 12);
}

std::vector<PartialErrorPoint> partial_error_sweep(const PauliHamiltonian& h, int order,
                                                   const std::vector<std::size_t>& l_d_values,
                                                   const std::vector<double>& deltas) {
  const double lambda = weight_lambda(h);
  const double k = std::max(order, 2);
  std::vector<PartialErrorPoint> out;
  for (std::size_t l_d : l_d_values) {
    const PartialSplit split = partial_split(h, l_d);
    std::vector<PauliHamiltonian> slots = term_slots(split.deterministic);
    if (!split.randomized.empty()) slots.push_back(split.randomized);
    PartialErrorPoint pt;
    pt.l_d = l_d;
    pt.randomized_fraction = lambda > 0 ? split.lambda_r / lambda : 0.0;
    const ErrorCurve c = measure_error_curve(slots, order, deltas);
    // Rounding in the dense eigensolver sits near 1e−13·λ; below that nothing is measurable.
    const double floor = 1e-11 * std::max(lambda, 1.0);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < deltas.size(); ++i)
      if (c.gs_errors[i] > floor) {
        xs.push_back(deltas[i]);
        ys.push_back(c.gs_errors[i]);
      }
    if (xs.empty()) {
      pt.c_gs = 0.0;
    } else {
      pt.c_gs = fit_constant(xs, ys, k);
      if (xs.size() >= 3) pt.fit = fit_power_law(xs, ys);
    }
    out.push_back(pt);
  }
  return out;
}

}  // namespace pfq
