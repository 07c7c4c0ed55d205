#include "pfq/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pfq/error.hpp"
#include "pfq/parallel.hpp"

namespace pfq {

// ---- Hadamard test ---------------------------------------------------------

int hadamard_shot(cplx amplitude, double theta, Rng& rng) {
  const double mean = (std::polar(1.0, theta) * amplitude).real();
  const double p_plus = std::clamp(0.5 * (1.0 + mean), 0.0, 1.0);
  return std::bernoulli_distribution(p_plus)(rng) ? 1 : -1;
}

int hadamard_sample(const StateVector& psi, const SampledCircuit& c, double theta, Rng& rng) {
  return hadamard_shot(circuit_amplitude(c, psi), theta, rng);
}

int hadamard_sample(const SpectralData& spec, const StateVector& psi, double t, double theta, Rng& rng) {
  return hadamard_shot(signal_g(spec, psi, t), theta, rng);
}

cplx sign_mode_amplitude(const StateVector& psi, const SampledCircuit& forward, const SampledCircuit& backward) {
  StateVector f = psi, b = psi;
  apply_circuit(forward, f);
  apply_circuit(backward, b);
  return inner(b, f);
}

int hadamard_sample_sign_mode(const StateVector& psi, const SampledCircuit& forward, const SampledCircuit& backward,
                              double theta, Rng& rng) {
  return hadamard_shot(sign_mode_amplitude(psi, forward, backward), theta, rng);
}

cplx estimate_Z(const AmplitudeSource& source, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ConfigError("estimate_Z needs at least one sample");
  std::vector<int> outcomes(2 * n);
  parallel_for(2 * n, [&](std::size_t k) {
    const std::uint64_t s = derive_seed(seed, k);
    const cplx a = source(s);
    Rng rng(splitmix64(s));
    outcomes[k] = hadamard_shot(a, k % 2 == 0 ? kThetaReal : kThetaImag, rng);
  });
  double x = 0, y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    x += outcomes[2 * i];
    y += outcomes[2 * i + 1];
  }
  return {x / static_cast<double>(n), y / static_cast<double>(n)};
}

// ---- RPE core --------------------------------------------------------------

double wrap_angle(double a) {
  constexpr double two_pi = 2 * std::numbers::pi;
  double r = std::fmod(a, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  if (r > std::numbers::pi) r -= two_pi;
  return r;
}

double angle_distance(double a, double b) { return std::abs(wrap_angle(a - b)); }

double rpe_core(const std::vector<double>& angles, const std::vector<double>& multipliers) {
  if (angles.empty()) throw ConfigError("rpe_core needs at least one angle");
  if (!multipliers.empty() && multipliers.size() != angles.size())
    throw ConfigError("rpe_core needs one multiplier per angle");
  auto k_of = [&](std::size_t m) { return multipliers.empty() ? std::ldexp(1.0, static_cast<int>(m)) : multipliers[m]; };
  constexpr double two_pi = 2 * std::numbers::pi;
  double theta = wrap_angle(angles[0]) / k_of(0);
  for (std::size_t m = 1; m < angles.size(); ++m) {
    const double k = k_of(m);
    const double j = std::round((k * theta - angles[m]) / two_pi);
    theta = (angles[m] + two_pi * j) / k;
  }
  return wrap_angle(theta);
}

const char* method_name(Method m) {
  switch (m) {
    case Method::Exact: return "exact";
    case Method::Qdrift: return "qdrift";
    case Method::Rte: return "rte";
    case Method::Partial: return "partial";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "exact") return Method::Exact;
  if (name == "qdrift") return Method::Qdrift;
  if (name == "rte") return Method::Rte;
  if (name == "partial") return Method::Partial;
  throw ConfigError("unknown method '" + name + "' (expected exact, qdrift, rte or partial)");
}

// ---- Schedule --------------------------------------------------------------

RPEConfig rpe_config_for(double epsilon, double xi, Method method) {
  if (!(epsilon > 0) || !(xi > 0) || xi > 1) throw ConfigError("need epsilon > 0 and 0 < xi <= 1");
  RPEConfig c;
  c.method = method;
  c.xi = xi;
  c.rounds = std::max(0, static_cast<int>(std::ceil(std::log2(xi / epsilon))));
  c.last_multiplier = std::ceil(xi / epsilon);
  return c;
}

std::vector<RoundPlan> rpe_schedule(const RPEConfig& c) {
  if (c.rounds < 0) throw ConfigError("round count must be non-negative");
  if (!(c.xi > 0) || c.xi > 1) throw ConfigError("xi must lie in (0, 1]");
  const int big_m = c.rounds;
  const double top = std::ldexp(1.0, big_m);
  double k_last = c.last_multiplier > 0 ? c.last_multiplier : top;
  if (big_m > 0 && (k_last <= top / 2 || k_last > top))
    throw ConfigError("last multiplier must satisfy 2^(M-1) < K_M <= 2^M");
  if (big_m == 0 && k_last != 1.0) throw ConfigError("with M = 0 the multiplier is 1");
  const double overhead = c.overhead > 0 ? c.overhead : (c.method == Method::Exact ? 1.0 : std::numbers::e);
  const double base = c.xi < 1 ? c.base_samples * std::ceil(1.0 / (c.xi * c.xi)) : c.base_samples;
  std::vector<RoundPlan> out;
  for (int m = 0; m <= big_m; ++m) {
    RoundPlan r;
    r.m = m;
    r.multiplier = m == big_m ? k_last : std::ldexp(1.0, m);
    r.samples = static_cast<std::size_t>(std::max(1.0, std::ceil(overhead * (base + c.ramp * (big_m - m)) - 1e-9)));
    const double t = r.multiplier;
    switch (c.method) {
      case Method::Qdrift:
        r.depth = static_cast<std::size_t>(t * t);
        r.tau = t / static_cast<double>(r.depth);
        break;
      case Method::Rte:
        r.depth = static_cast<std::size_t>(2 * t * t);
        r.tau = t / static_cast<double>(r.depth);
        break;
      default:
        break;
    }
    out.push_back(r);
  }
  return out;
}

// ---- Signal models ---------------------------------------------------------

SpectralSignal::SpectralSignal(std::vector<double> energies, std::vector<double> weights, Method method, int n_max)
    : energies_(std::move(energies)), weights_(std::move(weights)), method_(method), n_max_(n_max) {
  if (energies_.size() != weights_.size() || energies_.empty()) throw ConfigError("spectral signal needs matching energies and weights");
  if (method_ == Method::Partial) throw ConfigError("partial randomization has no spectral closed form");
}

cplx SpectralSignal::mean(const RoundPlan& round) const {
  cplx g = 0.0;
  const double r = static_cast<double>(round.depth);
  const double b = method_ == Method::Rte ? rte_normalization(round.tau, n_max_) : 1.0;
  for (std::size_t k = 0; k < energies_.size(); ++k) {
    const double e = energies_[k];
    switch (method_) {
      case Method::Exact:
        g += weights_[k] * std::polar(1.0, -e * round.multiplier);
        break;
      case Method::Qdrift:
        g += weights_[k] * std::pow(qdrift_factor(e, round.tau), r);
        break;
      case Method::Rte:
        g += weights_[k] * std::pow(rte_segment_factor(e, round.tau, n_max_) / b, r);
        break;
      case Method::Partial:
        break;
    }
  }
  return g;
}

namespace {

SpectralSignal spectral_of(const NormalizedHamiltonian& h, const StateVector& psi, Method method, int n_max) {
  const SpectralData spec = diagonalize(denormalize(NormalizedHamiltonian{h.n_qubits, 1.0, h.probs, h.paulis}));
  const Eigen::VectorXd c = overlaps(spec, psi);
  return SpectralSignal(std::vector<double>(spec.energies.data(), spec.energies.data() + spec.energies.size()),
                        std::vector<double>(c.data(), c.data() + c.size()), method, n_max);
}

}  // namespace

CircuitSignal::CircuitSignal(NormalizedHamiltonian h, StateVector psi, Method method, int n_max)
    : h_(std::move(h)), psi_(std::move(psi)), spectral_(spectral_of(h_, psi_, method, n_max)), method_(method), n_max_(n_max) {}

cplx CircuitSignal::mean(const RoundPlan& round) const { return spectral_.mean(round); }

cplx CircuitSignal::draw(const RoundPlan& round, std::uint64_t seed) const {
  switch (method_) {
    case Method::Qdrift: return circuit_amplitude(qdrift_sample(h_, round.tau, round.depth, seed), psi_);
    case Method::Rte: return circuit_amplitude(rte_sample(h_, round.tau, round.depth, n_max_, seed), psi_);
    default: return mean(round);
  }
}

PartialSignal::PartialSignal(PartialSplit split, StateVector psi, int order, double delta, double kappa, int n_max)
    : split_(std::move(split)), psi_(std::move(psi)), order_(order), delta_(delta), kappa_(kappa), n_max_(n_max) {
  if (!(delta_ > 0)) throw ConfigError("partial randomization needs a positive step");
}

PartialPlan PartialSignal::plan(std::size_t s) const { return partial_plan(split_, order_, delta_, s, kappa_, n_max_); }

cplx PartialSignal::mean(const RoundPlan& round) const {
  const PartialPlan p = plan(static_cast<std::size_t>(round.multiplier));
  const Eigen::MatrixXcd op = partial_expected_operator(split_, p);
  return psi_.amplitudes.dot(op * psi_.amplitudes) / p.normalization;
}

cplx PartialSignal::draw(const RoundPlan& round, std::uint64_t seed) const {
  return circuit_amplitude(partial_random_sample(split_, plan(static_cast<std::size_t>(round.multiplier)), seed), psi_);
}

std::size_t PartialSignal::depth(const RoundPlan& round) const {
  const PartialPlan p = plan(static_cast<std::size_t>(round.multiplier));
  return p.randomized_rotations + p.deterministic_rotations;
}

// ---- Runner ----------------------------------------------------------------

RPEResult rpe_run(const SignalModel& signal, const RPEConfig& config) {
  RPEResult res;
  res.rounds = rpe_schedule(config);
  const double time_unit = config.method == Method::Partial ? config.delta : 1.0;
  std::vector<double> multipliers;
  for (auto& round : res.rounds) {
    round.depth = signal.depth(round);
    const std::uint64_t round_seed = derive_seed(config.seed, static_cast<std::uint64_t>(round.m));
    cplx z;
    if (config.statevector) {
      z = estimate_Z([&](std::uint64_t s) { return signal.draw(round, s); }, round.samples, round_seed);
    } else {
      const cplx mean = signal.mean(round);
      z = estimate_Z([mean](std::uint64_t) { return mean; }, round.samples, round_seed);
    }
    res.angles.push_back(z == cplx(0.0) ? 0.0 : -std::arg(z));
    multipliers.push_back(round.multiplier);
    const double tests = 2.0 * static_cast<double>(round.samples);
    res.circuits += tests;
    res.t_tot += tests * round.multiplier * time_unit;
    res.r_tot += tests * static_cast<double>(round.depth);
  }
  res.t_max = res.rounds.back().multiplier * time_unit;
  res.r_max = static_cast<double>(res.rounds.back().depth);
  res.theta = rpe_core(res.angles, multipliers);
  switch (config.method) {
    case Method::Qdrift: {
      const double tau = res.rounds.back().tau;
      res.estimate = std::tan(tau * res.theta) / tau;
      break;
    }
    case Method::Partial:
      res.estimate = res.theta / config.delta;
      break;
    default:
      res.estimate = res.theta;
  }
  return res;
}

RPEResult rpe_run(const PauliHamiltonian& h, const StateVector& psi, const RPEConfig& config) {
  PauliHamiltonian rest(h.n_qubits());
  double offset = 0.0;
  for (const auto& t : h.terms()) {
    if (t.pauli.is_identity())
      offset += t.coeff * t.pauli.sign();
    else
      rest.add_term(t.coeff, t.pauli);
  }
  const NormalizedHamiltonian nh = normalize(rest);
  RPEResult res;
  if (config.method == Method::Partial) {
    const PartialSplit split = partial_split(denormalize(NormalizedHamiltonian{nh.n_qubits, 1.0, nh.probs, nh.paulis}),
                                             config.deterministic_terms);
    res = rpe_run(PartialSignal(split, psi, config.order, config.delta, config.kappa, config.n_max), config);
  } else if (config.statevector) {
    res = rpe_run(CircuitSignal(nh, psi, config.method, config.n_max), config);
  } else {
    res = rpe_run(spectral_of(nh, psi, config.method, config.n_max), config);
  }
  res.estimate = res.estimate * nh.lambda + offset;
  return res;
}

}  // namespace pfq
