#include "pfq/resources.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <numbers>
#include <sstream>

#include "pfq/error.hpp"
#include "pfq/estimation.hpp"

namespace pfq {

namespace {

constexpr double kPi = std::numbers::pi;

double choose2(double n) { return n < 2 ? 0.0 : n * (n - 1) / 2; }

double rounds_circuits(int big_m, double overhead) {
  double c = 0;
  for (int m = 0; m <= big_m; ++m) c += 2 * std::ceil(overhead * (kBaseSamples + kSampleRamp * (big_m - m)) - 1e-9);
  return c;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double synthesis_t_count(double eps_prime) {
  if (!(eps_prime > 0) || eps_prime >= 1) throw ConfigError("synthesis error must lie in (0, 1)");
  return 1.14 * std::log2(1.0 / eps_prime) + 9.2;
}

double synthesis_toffoli_count(double eps_prime) { return synthesis_t_count(eps_prime) / 2.0; }

std::size_t stage_count(int order) {
  if (order == 1) return 1;
  if (order < 1 || order % 2 != 0) throw ConfigError("order must be 1 or even");
  std::size_t n = 2;
  for (int k = 2; k <= order / 2; ++k) n *= 5;
  return n;
}

ErrorSplit optimal_error_split(double epsilon, double c_gs, int order) {
  if (!(epsilon > 0)) throw ConfigError("epsilon must be positive");
  if (!(c_gs > 0)) throw ConfigError("C_gs must be positive");
  const double p = order;
  ErrorSplit s;
  s.epsilon_qpe = epsilon * std::sqrt(p / (p + 1));
  s.epsilon_trotter = epsilon / std::sqrt(p + 1);
  s.delta = std::pow(s.epsilon_trotter / c_gs, 1.0 / p);
  return s;
}

ResourceReport deterministic_cost(const CostModelInputs& in) {
  if (in.metric == GateMetric::Toffoli && !(in.epsilon > in.epsilon_synth && in.epsilon_synth >= 0))
    throw ConfigError("need epsilon > epsilon_synth >= 0");
  if (in.n_terms == 0) throw ConfigError("deterministic cost needs at least one term");
  const int p = in.order;
  const double pd = p;
  const ErrorSplit split = optimal_error_split(in.epsilon, in.c_gs, p);
  const double n_stage = static_cast<double>(stage_count(p));
  const double l = static_cast<double>(in.n_terms);
  const double n_rot = in.rotations_per_stage ? static_cast<double>(in.rotations_per_stage) : l;

  ResourceReport r;
  r.method = "deterministic";
  const double eps_prime = in.epsilon_synth * split.delta / (n_stage * n_rot);
  double g_det = in.g_det;
  if (g_det <= 0) {
    if (in.metric == GateMetric::Toffoli) {
      if (!(in.epsilon_synth > 0)) throw ConfigError("Toffoli counts need a positive synthesis budget");
      g_det = synthesis_toffoli_count(eps_prime);
    } else {
      g_det = std::max(2 * in.mean_support - 3, 0.0);
    }
  }
  // Phase-estimation applications of S_p(δ), halved by the sign-controlled Hadamard test.
  const double applications = 0.5 * 5 * kPi / (split.epsilon_qpe * split.delta);
  const int big_m = std::max(0, static_cast<int>(std::ceil(std::log2(0.08 * kPi / (split.epsilon_qpe * split.delta)))));
  r.rotations_total = applications * n_stage * l;
  r.gates_total = 0.5 * 5 * kPi * n_stage * l * g_det * std::sqrt(std::pow(pd + 1, 1 + 1 / pd) / pd) *
                  std::pow(in.c_gs, 1 / pd) / std::pow(in.epsilon, 1 + 1 / pd);
  r.rotations_max = n_stage * l * std::ldexp(1.0, big_m - 1);
  r.gates_max_per_circuit = r.rotations_max * g_det;
  if (in.metric == GateMetric::Toffoli) {
    r.toffoli_total = r.gates_total;
    r.toffoli_max_per_circuit = r.gates_max_per_circuit;
  } else {
    r.two_qubit_total = r.gates_total;
  }
  r.circuits = rounds_circuits(big_m, 1.0);
  r.logical_qubits = in.n_qubits + 1;
  r.params = {{"epsilon", in.epsilon},
              {"epsilon_qpe", split.epsilon_qpe},
              {"epsilon_trotter", split.epsilon_trotter},
              {"epsilon_synth", in.epsilon_synth},
              {"delta", split.delta},
              {"delta_printed_formula", std::pow(in.epsilon / in.c_gs, 1 / pd) * std::pow(pd / (1 + pd), 1 / (2 * pd))},
              {"M", big_m},
              {"N_stage", n_stage},
              {"L", l},
              {"n_rot", n_rot},
              {"eps_prime", eps_prime},
              {"G_det", g_det},
              {"C_gs", in.c_gs},
              {"order", pd}};
  return r;
}

HwpRate hwp_rate(int k, int j) {
  if (k < 1 || j < 2) throw ConfigError("Hamming-weight phasing needs K >= 1 and J >= 2");
  HwpRate h;
  h.numerator = k + j - 2;
  h.denominator = k;
  const long g = std::gcd(h.numerator, h.denominator);
  h.numerator /= g;
  h.denominator /= g;
  h.ancillas = static_cast<std::size_t>(k + 2 * j - 2);
  return h;
}

ResourceReport randomized_cost(double lambda, double epsilon, double xi, RandomizedMethod method, int hwp_group,
                               double mean_support, std::size_t n_qubits) {
  if (!(epsilon > 0) || !(lambda > epsilon)) throw ConfigError("randomized cost needs 0 < epsilon < lambda");
  if (!(xi > 0) || xi > 1) throw ConfigError("xi must lie in (0, 1]");
  RPEConfig cfg = rpe_config_for(epsilon / lambda, xi, method == RandomizedMethod::Rte ? Method::Rte : Method::Qdrift);
  if (cfg.rounds == 0) cfg.last_multiplier = 1;
  const auto rounds = rpe_schedule(cfg);
  ResourceReport r;
  r.method = method == RandomizedMethod::Rte ? "rte" : "qdrift";
  for (const auto& round : rounds) {
    r.rotations_total += 2.0 * static_cast<double>(round.samples) * static_cast<double>(round.depth);
    r.circuits += 2.0 * static_cast<double>(round.samples);
  }
  r.rotations_max = static_cast<double>(rounds.back().depth);
  const int j = std::max(2, static_cast<int>(std::ceil(std::log2(lambda / (kPi * epsilon)))));
  const HwpRate h = hwp_rate(hwp_group, j);
  r.toffoli_total = r.rotations_total * h.rate();
  r.toffoli_max_per_circuit = r.rotations_max * h.rate();
  r.two_qubit_total = r.rotations_total * std::max(2 * mean_support - 3, 0.0);
  r.gates_total = r.toffoli_total;
  r.gates_max_per_circuit = r.toffoli_max_per_circuit;
  r.ancilla_qubits = h.ancillas;
  r.logical_qubits = n_qubits + 1 + h.ancillas;
  const double calibrated = (method == RandomizedMethod::Rte ? 16.3 : 16.3 / 2) * lambda * lambda / (epsilon * epsilon);
  r.params = {{"lambda", lambda},
              {"epsilon", epsilon},
              {"xi", xi},
              {"M", cfg.rounds},
              {"K_M", cfg.last_multiplier},
              {"J", j},
              {"K", hwp_group},
              {"toffoli_per_rotation", h.rate()},
              {"tau_last", rounds.back().tau},
              {"r_tot_calibrated", calibrated},
              {"toffoli_total_calibrated", calibrated * h.rate()}};
  return r;
}

PartialConstants schedule_partial_constants(double base, double ramp) {
  return {2 * (base + ramp), 8 * (base / 3 + ramp / 9)};
}

double optimal_kappa(double a, double b) {
  if (a < 0 || b < 0) throw ConfigError("cost coefficients must be non-negative");
  if (b == 0) return std::numeric_limits<double>::infinity();
  // d/dκ [(a + bκ) e^{2/κ}] has the sign of bκ² − 2bκ − 2a.
  auto g = [&](double k) { return b * k * k - 2 * b * k - 2 * a; };
  double lo = 0.05, hi = 100.0;
  while (g(hi) < 0) hi *= 2;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ResourceReport partial_cost(const CostModelInputs& in, double g_det, double g_rand, double fixed_delta,
                            const PartialConstants& constants) {
  if (!(in.epsilon > 0)) throw ConfigError("epsilon must be positive");
  if (!(in.c_gs > 0)) throw ConfigError("C_gs must be positive");
  if (in.lambda_r < 0 || g_det < 0 || g_rand < 0) throw ConfigError("weights and gate costs must be non-negative");
  const int p = in.order;
  const double n_stage = static_cast<double>(stage_count(p));
  const double l_d = static_cast<double>(in.l_d);
  const double eps = in.epsilon;
  const double delta_max = std::pow(eps / in.c_gs, 1.0 / p);

  struct Eval {
    double delta, eps_qpe, a, b, kappa, total;
  };
  auto eval = [&](double delta, const PartialConstants& c) {
    Eval e{};
    e.delta = delta;
    const double trot = in.c_gs * std::pow(delta, p);
    e.eps_qpe = std::sqrt(std::max(eps * eps - trot * trot, 0.0));
    e.a = l_d > 0 ? c.deterministic * g_det * n_stage * l_d * 0.1 * kPi / (delta * e.eps_qpe) : 0.0;
    e.b = c.randomized * g_rand * std::pow(0.1 * kPi * in.lambda_r, 2) / (e.eps_qpe * e.eps_qpe);
    e.kappa = optimal_kappa(e.a, e.b);
    e.total = std::isinf(e.kappa) ? e.a : (e.a + e.b * e.kappa) * std::exp(2 / e.kappa);
    return e;
  };

  ResourceReport r;
  r.method = "partial";
  Eval best{};
  if (fixed_delta > 0) {
    if (in.c_gs * std::pow(fixed_delta, p) >= eps) {
      r.feasible = false;
      r.note = "Trotter bias C_gs*delta^p exceeds epsilon";
      r.params = {{"delta", fixed_delta}, {"C_gs", in.c_gs}, {"epsilon", eps}};
      return r;
    }
    best = eval(fixed_delta, constants);
  } else if (in.l_d == 0) {
    // Without deterministic terms the step only eats into the error budget.
    best = eval(delta_max * 1e-12, constants);
    best.delta = 0;
    best.eps_qpe = eps;
  } else {
    // Coarse log scan, then golden-section refinement around the best grid point.
    const int n = 400;
    const double lo = std::log(delta_max * 1e-6), hi = std::log(delta_max) - 1e-12;
    std::vector<double> xs(n + 1);
    int arg = 0;
    double fmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i) {
      xs[i] = lo + (hi - lo) * i / n;
      const double f = eval(std::exp(xs[i]), constants).total;
      if (f < fmin) {
        fmin = f;
        arg = i;
      }
    }
    double a = xs[std::max(arg - 1, 0)], b = xs[std::min(arg + 1, n)];
    const double phi = (std::sqrt(5.0) - 1) / 2;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = eval(std::exp(c), constants).total, fd = eval(std::exp(d), constants).total;
    for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - phi * (b - a);
        fc = eval(std::exp(c), constants).total;
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + phi * (b - a);
        fd = eval(std::exp(d), constants).total;
      }
    }
    best = eval(std::exp(0.5 * (a + b)), constants);
    if (fmin < best.total) best = eval(std::exp(xs[arg]), constants);
  }

  const double boost = std::isinf(best.kappa) ? 1.0 : std::exp(2 / best.kappa);
  const double det_term = best.a * boost;
  const double rand_term = std::isinf(best.kappa) ? 0.0 : best.b * best.kappa * boost;
  r.gates_total = det_term + rand_term;
  if (in.metric == GateMetric::Toffoli)
    r.toffoli_total = r.gates_total;
  else
    r.two_qubit_total = r.gates_total;
  r.rotations_total = (g_det > 0 ? det_term / g_det : 0.0) + (g_rand > 0 ? rand_term / g_rand : 0.0);

  // Deepest circuit: 2^{M−1} deterministic stages plus κλ_R²δ²4^M randomized rotations.
  int big_m = 0;
  if (best.delta > 0)
    big_m = std::max(0, static_cast<int>(std::ceil(std::log2(0.08 * kPi / (best.eps_qpe * best.delta)))));
  else
    big_m = std::max(0, static_cast<int>(std::ceil(std::log2(in.lambda_r / eps))));
  const double kappa_f = std::isinf(best.kappa) ? 0.0 : best.kappa;
  const double r_rand_max = best.delta > 0 ? kappa_f * std::pow(in.lambda_r * best.delta, 2) * std::ldexp(1.0, 2 * big_m)
                                           : kappa_f * std::pow(in.lambda_r / eps, 2);
  const double r_det_max = l_d * n_stage * std::ldexp(1.0, big_m - 1);
  r.rotations_max = r_rand_max + r_det_max;
  r.gates_max_per_circuit = r_rand_max * g_rand + r_det_max * g_det;
  if (in.metric == GateMetric::Toffoli) r.toffoli_max_per_circuit = r.gates_max_per_circuit;
  r.circuits = rounds_circuits(big_m, boost * boost);
  r.logical_qubits = in.n_qubits + 1;

  // Same point evaluated with the schedule-derived constants, for side-by-side reporting.
  const PartialConstants sched = schedule_partial_constants();
  const double a_s = constants.deterministic > 0 ? best.a * sched.deterministic / constants.deterministic : 0.0;
  const double b_s = constants.randomized > 0 ? best.b * sched.randomized / constants.randomized : 0.0;
  const double total_sched = std::isinf(best.kappa) ? a_s : (a_s + b_s * best.kappa) * boost;

  r.params = {{"delta", best.delta},
              {"epsilon", eps},
              {"epsilon_qpe", best.eps_qpe},
              {"epsilon_trotter", in.c_gs * std::pow(best.delta, p)},
              {"kappa", std::isinf(best.kappa) ? -1.0 : best.kappa},
              {"L_D", l_d},
              {"lambda_R", in.lambda_r},
              {"M", big_m},
              {"N_stage", n_stage},
              {"G_det", g_det},
              {"G_rand", g_rand},
              {"deterministic_term", det_term},
              {"randomized_term", rand_term},
              {"constant_deterministic", constants.deterministic},
              {"constant_randomized", constants.randomized},
              {"constant_deterministic_schedule", sched.deterministic},
              {"constant_randomized_schedule", sched.randomized},
              {"gates_total_schedule_constants", total_sched}};
  return r;
}

PartitionSweep sweep_partition(const PauliHamiltonian& h, double c_gs, double epsilon,
                               const std::function<double(std::size_t)>& g_det, double g_rand,
                               const CostModelInputs& base) {
  const std::size_t l = h.size();
  for (std::size_t i = 1; i < l; ++i)
    if (std::abs(h[i].coeff) > std::abs(h[i - 1].coeff)) throw ConfigError("sweep_partition needs terms sorted by decreasing weight");
  PartitionSweep out;
  out.lambda_r.assign(l + 1, 0.0);
  for (std::size_t i = l; i-- > 0;) out.lambda_r[i] = out.lambda_r[i + 1] + std::abs(h[i].coeff);
  CostModelInputs in = base;
  in.c_gs = c_gs;
  in.epsilon = epsilon;
  in.n_terms = l;
  in.lambda = out.lambda_r[0];
  in.n_qubits = h.n_qubits();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t l_d = 0; l_d <= l; ++l_d) {
    in.l_d = l_d;
    in.lambda_r = out.lambda_r[l_d];
    ResourceReport rep = partial_cost(in, g_det(l_d), g_rand);
    out.costs.push_back(rep.gates_total);
    if (rep.gates_total < best) {
      best = rep.gates_total;
      out.best_l_d = l_d;
      out.best = std::move(rep);
    }
  }
  return out;
}

double pauli_two_qubit_cost(const PauliHamiltonian& h) {
  if (h.empty()) return 0.0;
  double s = 0;
  for (const auto& t : h.terms()) s += std::max(2.0 * static_cast<double>(t.pauli.support()) - 3.0, 0.0);
  return s / static_cast<double>(h.size());
}

DfStageCost df_cost(std::size_t n, const std::vector<std::size_t>& ranks) {
  DfStageCost c;
  const double nd = static_cast<double>(n);
  double givens = 2 * choose2(nd), diag = 0, rot = 0;
  for (std::size_t rho : ranks) {
    if (rho > n) throw ConfigError("factor rank " + std::to_string(rho) + " exceeds N = " + std::to_string(n));
    const double r = static_cast<double>(rho);
    givens += 2 * (choose2(nd) - choose2(nd - r));
    diag += 2 * choose2(r);
    rot += r * (nd - 4);
  }
  c.givens = static_cast<std::size_t>(givens);
  c.diagonal_two_qubit = static_cast<std::size_t>(diag);
  c.rotations = static_cast<std::size_t>(std::max(rot, 0.0));
  return c;
}

BitwiseReport bitwise_decompose_report(const PauliHamiltonian& h_d, int n_bits, double delta, int group_size) {
  if (!(delta > 0)) throw ConfigError("delta must be positive");
  if (n_bits < 0 || n_bits > 52) throw ConfigError("bit count must lie in [0, 52]");
  BitwiseReport rep;
  rep.n_bits = n_bits;
  rep.delta = delta;
  rep.terms_per_bit.assign(static_cast<std::size_t>(n_bits), 0);
  for (const auto& t : h_d.terms()) {
    double x = std::abs(t.coeff) * delta / kPi;
    const double whole = std::floor(x);
    rep.integer_turns += static_cast<std::size_t>(whole);
    x -= whole;
    // Doubling and subtracting 1 are exact, so the expansion loses nothing.
    for (int j = 1; j <= n_bits; ++j) {
      x *= 2;
      if (x >= 1) {
        ++rep.terms_per_bit[static_cast<std::size_t>(j - 1)];
        x -= 1;
      }
    }
    const double residual = std::ldexp(x, -n_bits);
    rep.residual_angle.push_back(residual);
    rep.residual_weight += residual * kPi / delta;
  }
  for (int j = 1; j <= n_bits; ++j) {
    // A rotation by π/2 is a Pauli up to phase and costs no Toffoli.
    const double rate = j == 1 ? 0.0 : hwp_rate(group_size, j).rate();
    rep.toffoli_per_rotation.push_back(rate);
    rep.toffoli_per_stage += rate * static_cast<double>(rep.terms_per_bit[static_cast<std::size_t>(j - 1)]);
  }
  return rep;
}

std::string format_report(const ResourceReport& r) {
  std::ostringstream out;
  out << "method=" << r.method << "\n";
  out << "feasible=" << (r.feasible ? 1 : 0) << "\n";
  if (!r.note.empty()) out << "note=" << r.note << "\n";
  out << "gates_total=" << num(r.gates_total) << "\n";
  out << "gates_max_per_circuit=" << num(r.gates_max_per_circuit) << "\n";
  out << "toffoli_total=" << num(r.toffoli_total) << "\n";
  out << "toffoli_max_per_circuit=" << num(r.toffoli_max_per_circuit) << "\n";
  out << "two_qubit_total=" << num(r.two_qubit_total) << "\n";
  out << "rotations_total=" << num(r.rotations_total) << "\n";
  out << "rotations_max=" << num(r.rotations_max) << "\n";
  out << "circuits=" << num(r.circuits) << "\n";
  out << "logical_qubits=" << r.logical_qubits << "\n";
  out << "ancilla_qubits=" << r.ancilla_qubits << "\n";
  for (const auto& [k, v] : r.params) out << "param." << k << "=" << num(v) << "\n";
  return out.str();
}

}  // namespace pfq
