#include <algorithm>
#include <cmath>
#include <numeric>

#include "pfq/error.hpp"
#include "pfq/formulas.hpp"

namespace pfq {

std::size_t SampledCircuit::rotation_count() const {
  return static_cast<std::size_t>(
      std::count_if(gates.begin(), gates.end(), [](const Gate& g) { return g.kind != GateKind::Pauli; }));
}

void apply_circuit(const SampledCircuit& c, StateVector& psi) {
  if (c.n_qubits != psi.n_qubits) throw DimensionError("circuit and state have different qubit counts");
  for (const auto& g : c.gates) {
    if (g.kind == GateKind::Pauli)
      apply_pauli(psi, g.pauli);
    else
      apply_pauli_rotation(psi, g.pauli, g.angle);
  }
  psi.amplitudes *= c.phase;
}

cplx circuit_amplitude(const SampledCircuit& c, const StateVector& psi) {
  StateVector out = psi;
  apply_circuit(c, out);
  return inner(psi, out);
}

// ---- qDRIFT ----------------------------------------------------------------

namespace {

void check_normalized(const NormalizedHamiltonian& h) {
  if (h.probs.empty() || h.probs.size() != h.paulis.size()) throw ConfigError("normalized Hamiltonian has no terms");
}

std::discrete_distribution<std::size_t> term_distribution(const NormalizedHamiltonian& h) {
  return std::discrete_distribution<std::size_t>(h.probs.begin(), h.probs.end());
}

}  // namespace

SampledCircuit qdrift_sample(const NormalizedHamiltonian& h, double tau, std::size_t r, std::uint64_t seed) {
  check_normalized(h);
  if (!(tau > 0)) throw ConfigError("qDRIFT step must be positive");
  Rng rng(seed);
  auto pick = term_distribution(h);
  SampledCircuit c;
  c.n_qubits = h.n_qubits;
  c.seed = seed;
  c.gates.reserve(r);
  const double phi = std::atan(tau);
  for (std::size_t k = 0; k < r; ++k) {
    Gate g;
    g.kind = GateKind::Rotation;
    g.pauli = h.paulis[pick(rng)];
    g.angle = phi;
    c.gates.push_back(std::move(g));
  }
  return c;
}

cplx qdrift_factor(double energy, double tau) { return cplx(1.0, -tau * energy) / std::sqrt(1.0 + tau * tau); }

cplx qdrift_expectation(const NormalizedHamiltonian& h, const StateVector& psi, double tau, std::size_t r) {
  check_normalized(h);
  const PauliHamiltonian hn = denormalize(NormalizedHamiltonian{h.n_qubits, 1.0, h.probs, h.paulis});
  Eigen::VectorXcd v = psi.amplitudes;
  const double scale = 1.0 / std::sqrt(1.0 + tau * tau);
  for (std::size_t k = 0; k < r; ++k) v = scale * (v - cplx(0.0, tau) * apply_hamiltonian(hn, v));
  return psi.amplitudes.dot(v);
}

cplx qdrift_expectation(const SpectralData& spec, const StateVector& psi, double tau, std::size_t r) {
  const Eigen::VectorXd c = overlaps(spec, psi);
  cplx g = 0.0;
  for (Eigen::Index k = 0; k < c.size(); ++k)
    g += c(k) * std::pow(qdrift_factor(spec.energies(k), tau), static_cast<double>(r));
  return g;
}

// ---- RTE -------------------------------------------------------------------

namespace {

void check_order(int n_max) {
  if (n_max < 0 || n_max % 2 != 0) throw ConfigError("RTE truncation order must be even and non-negative");
}

}  // namespace

std::vector<double> rte_order_weights(double tau, int n_max) {
  check_order(n_max);
  std::vector<double> w;
  double term = 1.0;  // τⁿ/n!
  for (int n = 0; n <= n_max; n += 2) {
    if (n > 0) term *= tau * tau / (static_cast<double>(n) * (n - 1));
    const double a = tau / (n + 1);
    w.push_back(term * std::sqrt(1.0 + a * a));
  }
  return w;
}

double rte_normalization(double tau, int n_max) {
  const auto w = rte_order_weights(tau, n_max);
  // Sum from the small end for accuracy.
  return std::accumulate(w.rbegin(), w.rend(), 0.0);
}

double rte_angle(double tau, int n) { return std::atan(tau / (n + 1)); }

cplx rte_segment_factor(double energy, double tau, int n_max) {
  check_order(n_max);
  const cplx x(0.0, -tau * energy);
  cplx term = 1.0, sum = 1.0;
  for (int k = 1; k <= n_max + 1; ++k) {
    term *= x / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

double rte_truncation_bound(double tau, int n_max) {
  check_order(n_max);
  const double a = std::abs(tau);
  double term = 1.0;
  for (int k = 1; k <= n_max + 1; ++k) term *= a / k;
  double sum = 0.0;
  for (int k = n_max + 2; k < n_max + 200; ++k) {
    term *= a / k;
    sum += term;
    if (term < 1e-300 || term < 1e-18 * sum) break;
  }
  return sum;
}

void rte_append_segment(SampledCircuit& c, const NormalizedHamiltonian& h, double tau, int n_max, Rng& rng) {
  const auto w = rte_order_weights(tau, n_max);
  std::discrete_distribution<int> order(w.begin(), w.end());
  auto pick = term_distribution(h);
  const int n = 2 * order(rng);
  for (int k = 0; k < n; ++k) {
    Gate g;
    g.kind = GateKind::Pauli;
    g.pauli = h.paulis[pick(rng)];
    c.gates.push_back(std::move(g));
  }
  Gate g;
  g.kind = GateKind::Rotation;
  g.pauli = h.paulis[pick(rng)];
  g.angle = rte_angle(tau, n);
  c.gates.push_back(std::move(g));
  if ((n / 2) % 2 == 1) c.phase = -c.phase;
}

SampledCircuit rte_sample(const NormalizedHamiltonian& h, double tau, std::size_t r, int n_max, std::uint64_t seed) {
  check_normalized(h);
  check_order(n_max);
  if (tau == 0.0) throw ConfigError("RTE step must be nonzero");
  Rng rng(seed);
  SampledCircuit c;
  c.n_qubits = h.n_qubits;
  c.seed = seed;
  for (std::size_t k = 0; k < r; ++k) rte_append_segment(c, h, tau, n_max, rng);
  c.normalization = std::pow(rte_normalization(tau, n_max), static_cast<double>(r));
  return c;
}

cplx rte_expectation(const SpectralData& spec, const StateVector& psi, double tau, std::size_t r, int n_max) {
  const Eigen::VectorXd c = overlaps(spec, psi);
  const double b = rte_normalization(tau, n_max);
  cplx g = 0.0;
  for (Eigen::Index k = 0; k < c.size(); ++k)
    g += c(k) * std::pow(rte_segment_factor(spec.energies(k), tau, n_max) / b, static_cast<double>(r));
  return g;
}

// ---- Partial randomization -------------------------------------------------

PartialSplit partial_split(const PauliHamiltonian& h, std::size_t l_d) {
  if (l_d > h.size()) throw ConfigError("L_D exceeds the number of terms");
  std::vector<std::size_t> order(h.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double wa = std::abs(h[a].coeff), wb = std::abs(h[b].coeff);
    if (wa != wb) return wa > wb;
    return h[a].pauli.unsigned_copy() < h[b].pauli.unsigned_copy();
  });
  std::vector<bool> det(h.size(), false);
  for (std::size_t k = 0; k < l_d; ++k) det[order[k]] = true;
  PartialSplit s;
  s.n_qubits = h.n_qubits();
  s.deterministic = PauliHamiltonian(h.n_qubits());
  s.randomized = PauliHamiltonian(h.n_qubits());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double w = std::abs(h[i].coeff);
    if (det[i]) {
      s.deterministic.add_term(h[i].coeff, h[i].pauli);
      s.deterministic_index.push_back(i);
      s.lambda_d += w;
    } else {
      s.randomized.add_term(h[i].coeff, h[i].pauli);
      s.lambda_r += w;
    }
  }
  s.lambda = s.lambda_d + s.lambda_r;
  return s;
}

std::vector<PauliHamiltonian> partial_slots(const PartialSplit& split) {
  std::vector<PauliHamiltonian> slots = term_slots(split.deterministic);
  slots.push_back(split.randomized);
  return slots;
}

PartialPlan partial_plan(const PartialSplit& split, int order, double delta, std::size_t s, double kappa, int n_max) {
  if (order < 2 || order % 2 != 0) throw ConfigError("partial randomization needs an even (symmetric) order");
  if (s < 1) throw ConfigError("repetition count must be at least 1");
  if (!(kappa > 0)) throw ConfigError("kappa must be positive");
  if (delta == 0.0) throw ConfigError("step must be nonzero");
  check_order(n_max);
  PartialPlan plan;
  plan.schedule = suzuki_schedule(order, split.deterministic.size(), true);
  plan.delta = delta;
  plan.repetitions = s;
  plan.kappa = kappa;
  plan.n_max = n_max;
  const std::size_t slot_r = split.deterministic.size();
  for (const auto& e : plan.schedule.entries)
    if (e.term == slot_r) plan.delta_tilde += std::abs(e.fraction * delta);
  double log_b = 0.0;
  const double lr = split.lambda_r;
  for (const auto& e : plan.schedule.entries) {
    PartialStep step{e.term, e.fraction, 0, 0.0};
    if (e.term == slot_r) {
      if (lr == 0.0) continue;
      const double di = e.fraction * delta;
      step.r = static_cast<std::size_t>(std::max(1.0, std::ceil(kappa * lr * lr * std::abs(di) * plan.delta_tilde * s)));
      step.tau = lr * di / static_cast<double>(step.r);
      log_b += static_cast<double>(step.r) * std::log(rte_normalization(step.tau, n_max));
      plan.randomized_rotations += step.r * s;
    } else {
      plan.deterministic_rotations += s;
    }
    plan.steps.push_back(step);
  }
  plan.normalization = std::exp(log_b * static_cast<double>(s));
  return plan;
}

PartialPlan reversed_plan(const PartialPlan& plan) {
  PartialPlan out = plan;
  out.delta = -plan.delta;
  for (auto& st : out.steps) st.tau = -st.tau;
  return out;
}

SampledCircuit partial_random_sample(const PartialSplit& split, const PartialPlan& plan, std::uint64_t seed) {
  Rng rng(seed);
  SampledCircuit c;
  c.n_qubits = split.n_qubits;
  c.seed = seed;
  c.normalization = plan.normalization;
  const std::size_t slot_r = split.deterministic.size();
  NormalizedHamiltonian hr;
  if (split.lambda_r > 0) hr = normalize(split.randomized);
  for (std::size_t rep = 0; rep < plan.repetitions; ++rep) {
    for (const auto& st : plan.steps) {
      if (st.term == slot_r) {
        for (std::size_t k = 0; k < st.r; ++k) rte_append_segment(c, hr, st.tau, plan.n_max, rng);
        continue;
      }
      const PauliTerm& t = split.deterministic[st.term];
      Gate g;
      g.kind = GateKind::Exp;
      g.pauli = t.coeff < 0 ? t.pauli.negated() : t.pauli;
      g.angle = std::abs(t.coeff) * st.fraction * plan.delta;
      g.term = st.term;
      g.fraction = st.fraction;
      c.gates.push_back(std::move(g));
    }
  }
  return c;
}

Eigen::MatrixXcd partial_expected_operator(const PartialSplit& split, const PartialPlan& plan) {
  check_dense(split.n_qubits);
  const auto dim = Eigen::Index{1} << split.n_qubits;
  const std::size_t slot_r = split.deterministic.size();
  // One repetition, then the power.
  Eigen::MatrixXcd one = Eigen::MatrixXcd::Identity(dim, dim);
  SpectralData spec_r;
  if (split.lambda_r > 0) {
    const NormalizedHamiltonian hr = normalize(split.randomized);
    spec_r = diagonalize(denormalize(NormalizedHamiltonian{hr.n_qubits, 1.0, hr.probs, hr.paulis}));
  }
  for (const auto& st : plan.steps) {
    if (st.term == slot_r) {
      Eigen::VectorXcd f(spec_r.energies.size());
      for (Eigen::Index k = 0; k < f.size(); ++k)
        f(k) = std::pow(rte_segment_factor(spec_r.energies(k), st.tau, plan.n_max), static_cast<double>(st.r));
      one = spec_r.vectors * f.asDiagonal() * spec_r.vectors.adjoint() * one;
    } else {
      const PauliTerm& t = split.deterministic[st.term];
      apply_pauli_rotation(one, t.pauli, t.coeff * st.fraction * plan.delta);
    }
  }
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(dim, dim);
  for (std::size_t rep = 0; rep < plan.repetitions; ++rep) out = one * out;
  return out;
}

}  // namespace pfq
