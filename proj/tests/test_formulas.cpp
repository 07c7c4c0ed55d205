#include <doctest.h>

#include <algorithm>
#include <map>

#include "oracles.hpp"
#include "pfq/error.hpp"
#include "pfq/formulas.hpp"
#include "pfq/schedule.hpp"
#include "pfq/trotter_fit.hpp"

using namespace pfq;

namespace {

oracle::Vec vec(const StateVector& s) { return s.amplitudes; }

PauliHamiltonian gapped_random(oracle::Gen& g, std::size_t n, std::size_t l) {
  for (;;) {
    auto h = oracle::random_hamiltonian(g, n, l);
    if (oracle::min_gap_to_ground(oracle::hamiltonian(h)) > 0.05) return h;
  }
}

}  // namespace

// ---- Schedules

TEST_CASE("first and second order schedules") {
  const auto s1 = suzuki_schedule(1, 2);
  REQUIRE(s1.entries.size() == 2);
  CHECK(s1.entries[0].term == 0);
  CHECK(s1.entries[0].fraction == 1.0);
  CHECK(s1.entries[1].term == 1);
  CHECK(s1.n_stages == 1);

  const auto s2 = suzuki_schedule(2, 2);
  REQUIRE(s2.entries.size() == 4);
  const std::size_t terms[] = {0, 1, 1, 0};
  for (int i = 0; i < 4; ++i) {
    CHECK(s2.entries[i].term == terms[i]);
    CHECK(s2.entries[i].fraction == 0.5);
  }
  CHECK(s2.n_stages == 2);
  CHECK_THROWS_AS(suzuki_schedule(3, 2), ConfigError);
  CHECK_THROWS_AS(suzuki_schedule(0, 2), ConfigError);
}

TEST_CASE("higher order schedules: sizes, sums, negative stage") {
  for (int p : {2, 4, 6}) {
    const auto s = suzuki_schedule(p, 3);
    std::size_t stages = 2;
    for (int k = 2; k <= p / 2; ++k) stages *= 5;
    CHECK(s.n_stages == stages);
    CHECK(s.entries.size() == stages * 3);
    for (double f : slot_fraction_sums(s)) CHECK(f == doctest::Approx(1.0).epsilon(1e-13));
    for (std::size_t i = 0; i < s.entries.size(); ++i) {
      CHECK(s.entries[i].term == s.entries[s.entries.size() - 1 - i].term);
      CHECK(s.entries[i].fraction == doctest::Approx(s.entries[s.entries.size() - 1 - i].fraction));
    }
  }
  const auto s4 = suzuki_schedule(4, 2);
  const double u = suzuki_u(2);
  CHECK(u == doctest::Approx(1.0 / (4.0 - std::cbrt(4.0))));
  bool has_negative = false;
  for (const auto& e : s4.entries) has_negative = has_negative || e.fraction == doctest::Approx((1 - 4 * u) / 2);
  CHECK(has_negative);
  CHECK(1 - 4 * u < 0);
  const auto with_slot = suzuki_schedule(2, 2, true);
  CHECK(with_slot.n_slots == 3);
  CHECK(with_slot.entries.size() == 6);
}

TEST_CASE("symmetric formulas are unitary and time-reversible") {
  oracle::Gen g(3);
  const auto h = oracle::random_hamiltonian(g, 3, 5);
  const Eigen::Index dim = 8;
  for (int p : {2, 4}) {
    const auto s = suzuki_schedule(p, h.size());
    const oracle::Mat f = formula_matrix(term_slots(h), s, 0.3);
    CHECK((f * f.adjoint() - oracle::Mat::Identity(dim, dim)).norm() < 1e-10);
    CHECK((formula_matrix(term_slots(h), s, -0.3) - f.adjoint()).norm() < 1e-10);
  }
}

TEST_CASE("operator-norm error exponent is p + 1") {
  oracle::Gen g(4);
  const auto h = gapped_random(g, 3, 6);
  const double lambda = weight_lambda(h);
  for (int p : {1, 2, 4}) {
    const auto grid = log_grid(0.01 / lambda, 0.1 / lambda, 8);
    const auto curve = measure_error_curve(h, p, grid);
    CHECK(fit_power_law_above(grid, curve.op_errors, 1e-12).exponent == doctest::Approx(p + 1).epsilon(0.1 / (p + 1)));
  }
}

// ---- qDRIFT

TEST_CASE("qDRIFT sampler structure and determinism") {
  PauliHamiltonian single(2);
  single.add_term(-0.8, "XY");
  const auto nh1 = normalize(single);
  const auto c1 = qdrift_sample(nh1, 0.2, 5, 1);
  REQUIRE(c1.gates.size() == 5);
  for (const auto& gate : c1.gates) {
    CHECK(gate.kind == GateKind::Rotation);
    CHECK(gate.pauli.str() == "-XY");
    CHECK(gate.angle == doctest::Approx(std::atan(0.2)));
  }
  CHECK(c1.normalization == 1.0);

  oracle::Gen g(5);
  const auto nh = normalize(oracle::random_hamiltonian(g, 3, 4));
  const auto a = qdrift_sample(nh, 0.1, 50, 99), b = qdrift_sample(nh, 0.1, 50, 99);
  CHECK(serialize_circuit(a) == serialize_circuit(b));
  CHECK(serialize_circuit(a) != serialize_circuit(qdrift_sample(nh, 0.1, 50, 100)));
  const auto replay = parse_circuit(serialize_circuit(a));
  CHECK(serialize_circuit(replay) == serialize_circuit(a));
  CHECK_THROWS_AS(qdrift_sample(nh, 0.0, 3, 1), ConfigError);
}

TEST_CASE("qDRIFT index frequencies follow p_l") {
  oracle::Gen g(6);
  const auto nh = normalize(oracle::random_hamiltonian(g, 3, 5));
  const std::size_t draws = 100000;
  const auto c = qdrift_sample(nh, 0.1, draws, 7);
  std::map<std::string, std::size_t> counts;
  for (const auto& gate : c.gates) ++counts[gate.pauli.str()];
  for (std::size_t l = 0; l < nh.probs.size(); ++l) {
    const double p = nh.probs[l];
    const double sigma = std::sqrt(draws * p * (1 - p));
    CHECK(std::abs(static_cast<double>(counts[nh.paulis[l].str()]) - draws * p) < 4 * sigma);
  }
}

TEST_CASE("qDRIFT enumeration over all 9 sequences at L = 3, r = 2") {
  oracle::Gen g(7);
  const auto h = oracle::random_hamiltonian(g, 2, 3);
  const auto nh = normalize(h);
  const auto mix = oracle::pauli_mix(nh);
  const StateVector psi(2, oracle::random_state(g, 2));
  const double tau = 0.3;
  const std::vector<oracle::Step> steps(2, oracle::qdrift_step(mix, tau));
  CHECK(oracle::branch_count(steps) == 9);
  const cplx enumerated = oracle::enumerate_amplitude(steps, vec(psi));
  const oracle::Mat hn = oracle::hamiltonian(denormalize(NormalizedHamiltonian{2, 1.0, nh.probs, nh.paulis}));
  const oracle::Mat step = oracle::Mat::Identity(4, 4) - cplx(0, tau) * hn;
  const cplx closed = psi.amplitudes.dot(step * step * psi.amplitudes) / (1 + tau * tau);
  CHECK(std::abs(enumerated - closed) < 1e-12);
  CHECK(std::abs(qdrift_expectation(nh, psi, tau, 2) - closed) < 1e-12);
}

TEST_CASE("qDRIFT closed form") {
  oracle::Gen g(8);
  const auto nh = normalize(oracle::random_hamiltonian(g, 3, 5));
  const StateVector psi(3, oracle::random_state(g, 3));
  CHECK(std::abs(qdrift_expectation(nh, psi, 0.2, 0) - cplx(1, 0)) < 1e-14);
  const auto spec = diagonalize(denormalize(NormalizedHamiltonian{3, 1.0, nh.probs, nh.paulis}));
  for (std::size_t r : {1, 3, 10}) CHECK(std::abs(qdrift_expectation(nh, psi, 0.2, r) - qdrift_expectation(spec, psi, 0.2, r)) < 1e-12);
  const StateVector eig(3, spec.vectors.col(1));
  const double e = spec.energies(1), tau = 0.25;
  const std::size_t r = 6;
  const cplx expect = std::pow(cplx(1, -tau * e), 6.0) / std::pow(1 + tau * tau, 3.0);
  CHECK(std::abs(qdrift_expectation(nh, eig, tau, r) - expect) < 1e-12);
  CHECK(std::abs(qdrift_expectation(nh, eig, tau, r)) == doctest::Approx(std::pow((1 + e * e * tau * tau) / (1 + tau * tau), 3.0)));
}

TEST_CASE("qDRIFT Monte Carlo mean matches the closed form within 5 sigma") {
  oracle::Gen g(9);
  const auto nh = normalize(oracle::random_hamiltonian(g, 3, 4));
  const StateVector psi(3, oracle::random_state(g, 3));
  const double tau = 0.3;
  const std::size_t r = 4, samples = 4000;
  cplx sum = 0;
  double sq_re = 0, sq_im = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    const cplx a = circuit_amplitude(qdrift_sample(nh, tau, r, 1000 + k), psi);
    sum += a;
    sq_re += a.real() * a.real();
    sq_im += a.imag() * a.imag();
  }
  const double n = static_cast<double>(samples);
  const cplx mean = sum / n;
  const cplx exact = qdrift_expectation(nh, psi, tau, r);
  const double se_re = std::sqrt((sq_re / n - mean.real() * mean.real()) / n);
  const double se_im = std::sqrt((sq_im / n - mean.imag() * mean.imag()) / n);
  CHECK(std::abs(mean.real() - exact.real()) < 5 * se_re + 1e-12);
  CHECK(std::abs(mean.imag() - exact.imag()) < 5 * se_im + 1e-12);
}

// ---- RTE

TEST_CASE("RTE normalization") {
  CHECK(rte_normalization(0.0, 8) == 1.0);
  CHECK(rte_normalization(0.37, 0) == doctest::Approx(std::sqrt(1 + 0.37 * 0.37)).epsilon(1e-15));
  // Long-double series with 64 terms as the reference.
  long double ref = 0, term = 1;
  const long double tau = 0.1L;
  for (int n = 0; n < 64; ++n) {
    if (n > 0) term *= tau / n;
    if (n % 2 == 0 && n <= 8) ref += term * std::sqrt(1.0L + tau * tau / ((n + 1.0L) * (n + 1.0L)));
  }
  CHECK(std::abs(rte_normalization(0.1, 8) - static_cast<double>(ref)) < 1e-14);
  for (double t : {0.05, 0.3, 1.0}) {
    CHECK(rte_normalization(t, 8) >= 1.0);
    CHECK(rte_normalization(t, 8) <= std::exp(t * t));
  }
  CHECK_THROWS_AS(rte_normalization(0.1, 3), ConfigError);
}

TEST_CASE("RTE sampler structure") {
  oracle::Gen g(10);
  const auto nh = normalize(oracle::random_hamiltonian(g, 3, 4));
  // Tiny τ: every segment is order zero, the qDRIFT gate pattern.
  const auto c = rte_sample(nh, 1e-9, 30, 8, 3);
  CHECK(c.gates.size() == 30);
  for (const auto& gate : c.gates) CHECK(gate.kind == GateKind::Rotation);
  for (double tau : {0.1, 0.5}) {
    const std::size_t r = 20;
    const auto s = rte_sample(nh, tau, r, 8, 4);
    CHECK(s.normalization <= std::exp(tau * tau * r));
    CHECK(s.normalization >= 1.0);
    CHECK(s.rotation_count() == r);
    CHECK(serialize_circuit(s) == serialize_circuit(rte_sample(nh, tau, r, 8, 4)));
  }
}

TEST_CASE("RTE enumeration at L = 2, r = 1, n_max = 2 within the Taylor remainder") {
  oracle::Gen g(11);
  const auto nh = normalize(oracle::random_hamiltonian(g, 2, 2));
  const auto mix = oracle::pauli_mix(nh);
  const StateVector psi(2, oracle::random_state(g, 2));
  const oracle::Mat hn = oracle::hamiltonian(denormalize(NormalizedHamiltonian{2, 1.0, nh.probs, nh.paulis}));
  for (double tau : {0.05, 0.1, 0.2}) {
    const cplx enumerated = oracle::enumerate_amplitude({oracle::rte_step(mix, tau, 2)}, vec(psi));
    const cplx exact = psi.amplitudes.dot(oracle::evolve(hn, tau) * psi.amplitudes);
    CHECK(std::abs(enumerated - exact) <= oracle::taylor_tail(tau, 4) + 1e-14);
    const auto spec = diagonalize(denormalize(NormalizedHamiltonian{2, 1.0, nh.probs, nh.paulis}));
    CHECK(std::abs(rte_normalization(tau, 2) * rte_expectation(spec, psi, tau, 1, 2) - enumerated) < 1e-13);
  }
}

TEST_CASE("RTE Monte Carlo mean matches the expectation within 5 sigma") {
  oracle::Gen g(12);
  const auto nh = normalize(oracle::random_hamiltonian(g, 3, 4));
  const StateVector psi(3, oracle::random_state(g, 3));
  const auto spec = diagonalize(denormalize(NormalizedHamiltonian{3, 1.0, nh.probs, nh.paulis}));
  const double tau = 0.4;
  const std::size_t r = 3, samples = 4000;
  cplx sum = 0;
  double sq = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    const cplx a = circuit_amplitude(rte_sample(nh, tau, r, 6, 500 + k), psi);
    sum += a;
    sq += std::norm(a);
  }
  const double n = static_cast<double>(samples);
  const cplx mean = sum / n;
  const double se = std::sqrt((sq / n - std::norm(mean)) / n);
  CHECK(std::abs(mean - rte_expectation(spec, psi, tau, r, 6)) < 5 * se);
}

TEST_CASE("RTE truncation bound is the Taylor tail past n_max + 1") {
  for (double tau : {0.1, 0.3, 1.0})
    for (int n_max : {0, 2, 6}) CHECK(rte_truncation_bound(tau, n_max) == doctest::Approx(oracle::taylor_tail(tau, n_max + 2)).epsilon(1e-12));
}

// ---- Partial randomization

TEST_CASE("partial split picks the heaviest terms") {
  oracle::Gen g(13);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t l = 4 + trial % 6;
    const auto h = oracle::random_hamiltonian(g, 3, l);
    for (std::size_t l_d = 0; l_d <= l; ++l_d) {
      const auto s = partial_split(h, l_d);
      CHECK(s.deterministic.size() == l_d);
      CHECK(s.deterministic.size() + s.randomized.size() == l);
      CHECK(s.lambda_d + s.lambda_r == doctest::Approx(weight_lambda(h)).epsilon(1e-12));
      // Exhaustive check: no subset of L − L_D terms weighs less than H_R.
      double best = 1e300;
      for (std::uint32_t mask = 0; mask < (1u << l); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != l - l_d) continue;
        double w = 0;
        for (std::size_t i = 0; i < l; ++i)
          if (mask >> i & 1) w += std::abs(h[i].coeff);
        best = std::min(best, w);
      }
      CHECK(s.lambda_r == doctest::Approx(best).epsilon(1e-12));
    }
    CHECK(partial_split(h, l).lambda_r == 0.0);
    CHECK(partial_split(h, 0).lambda_r == doctest::Approx(weight_lambda(h)));
  }
  PauliHamiltonian tie(2);
  tie.add_term(0.5, "ZZ");
  tie.add_term(-0.5, "XI");
  CHECK(partial_split(tie, 1).deterministic[0].pauli.str() == "XI");
  CHECK_THROWS_AS(partial_split(tie, 3), ConfigError);
}

TEST_CASE("partial plan step rule and normalization bound") {
  oracle::Gen g(14);
  const auto h = oracle::random_hamiltonian(g, 3, 6);
  for (std::size_t l_d : {0, 2, 4}) {
    const auto split = partial_split(h, l_d);
    for (std::size_t s : {1, 3}) {
      const double delta = 0.2, kappa = 1.5;
      const auto plan = partial_plan(split, 2, delta, s, kappa);
      double dt = 0;
      for (const auto& e : plan.schedule.entries)
        if (e.term == l_d) dt += std::abs(e.fraction * delta);
      CHECK(plan.delta_tilde == doctest::Approx(dt));
      for (const auto& st : plan.steps) {
        if (st.term != l_d) continue;
        const double di = st.fraction * delta;
        const double want = std::max(1.0, std::ceil(kappa * split.lambda_r * split.lambda_r * std::abs(di) * dt * s));
        CHECK(static_cast<double>(st.r) == want);
        CHECK(st.tau == doctest::Approx(split.lambda_r * di / want));
      }
      CHECK(plan.normalization >= 1.0);
      CHECK(plan.normalization <= std::exp(1.0 / kappa) * (1 + 1e-12));
    }
  }
  // λ_R = 0: a deterministic circuit with B = 1.
  const auto all = partial_split(h, h.size());
  const auto plan = partial_plan(all, 2, 0.1, 2, 2.0);
  CHECK(plan.normalization == 1.0);
  const auto c = partial_random_sample(all, plan, 5);
  for (const auto& gate : c.gates) CHECK(gate.kind == GateKind::Exp);
  CHECK(c.gates.size() == 2 * 2 * h.size());
  CHECK_THROWS_AS(partial_plan(all, 1, 0.1, 1, 2.0), ConfigError);
}

TEST_CASE("partial plan with no deterministic terms reduces to RTE") {
  oracle::Gen g(15);
  const auto h = oracle::random_hamiltonian(g, 3, 5);
  const auto split = partial_split(h, 0);
  const double delta = 0.3, kappa = 2.0;
  const std::size_t s = 4;
  const auto plan = partial_plan(split, 2, delta, s, kappa);
  // Two adjacent half-step slots of H_R per repetition.
  REQUIRE(plan.steps.size() == 2);
  const double lr = split.lambda_r;
  const std::size_t per = static_cast<std::size_t>(std::ceil(kappa * lr * lr * (delta / 2) * delta * s));
  for (const auto& st : plan.steps) CHECK(st.r == std::max<std::size_t>(1, per));
  CHECK(plan.randomized_rotations == 2 * std::max<std::size_t>(1, per) * s);
  const auto c = partial_random_sample(split, plan, 8);
  CHECK(c.rotation_count() == plan.randomized_rotations);
  CHECK(serialize_circuit(c) == serialize_circuit(partial_random_sample(split, plan, 8)));
}

TEST_CASE("partial expected operator approaches the formula with H_R as one slot") {
  oracle::Gen g(16);
  const auto h = oracle::random_hamiltonian(g, 3, 5);
  const auto split = partial_split(h, 2);
  const double delta = 0.25;
  for (std::size_t s : {1, 2}) {
    const auto plan = partial_plan(split, 2, delta, s, 2.0, 16);
    const oracle::Mat op = partial_expected_operator(split, plan);
    oracle::Mat f = formula_matrix(partial_slots(split), suzuki_schedule(2, 2, true), delta);
    oracle::Mat fs = oracle::Mat::Identity(8, 8);
    for (std::size_t k = 0; k < s; ++k) fs = f * fs;
    CHECK((op - fs).norm() < 1e-12);
    // Reversed plan gives the adjoint exactly for the symmetric formula.
    const oracle::Mat back = partial_expected_operator(split, reversed_plan(partial_plan(split, 2, delta, s, 2.0, 4)));
    const oracle::Mat fwd = partial_expected_operator(split, partial_plan(split, 2, delta, s, 2.0, 4));
    CHECK((back - fwd.adjoint()).norm() < 1e-12);
  }
}

TEST_CASE("partial sampler Monte Carlo mean matches the expected operator") {
  oracle::Gen g(17);
  const auto h = oracle::random_hamiltonian(g, 3, 5);
  const auto split = partial_split(h, 2);
  const auto plan = partial_plan(split, 2, 0.4, 2, 1.0, 4);
  const StateVector psi(3, oracle::random_state(g, 3));
  const cplx exact = psi.amplitudes.dot(partial_expected_operator(split, plan) * psi.amplitudes);
  const std::size_t samples = 3000;
  cplx sum = 0;
  double sq = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    const auto c = partial_random_sample(split, plan, 77 + k);
    const cplx a = c.normalization * circuit_amplitude(c, psi);
    sum += a;
    sq += std::norm(a);
  }
  const double n = static_cast<double>(samples);
  const cplx mean = sum / n;
  const double se = std::sqrt((sq / n - std::norm(mean)) / n);
  CHECK(std::abs(mean - exact) < 5 * se);
}

TEST_CASE("circuit text format") {
  SampledCircuit c;
  c.n_qubits = 2;
  c.seed = 42;
  c.normalization = 1.25;
  c.phase = cplx(-1, 0);
  c.gates.push_back({GateKind::Rotation, PauliString::parse("XZ"), 0.1, 0, 0});
  c.gates.push_back({GateKind::Pauli, PauliString::parse("-YY"), 0, 0, 0});
  c.gates.push_back({GateKind::Exp, PauliString::parse("ZI"), -0.3, 1, 0.5});
  const auto text = serialize_circuit(c);
  const auto back = parse_circuit(text);
  CHECK(back.gates.size() == 3);
  CHECK(back.seed == 42);
  CHECK(back.normalization == 1.25);
  CHECK(back.phase == cplx(-1, 0));
  CHECK(back.gates[1].pauli.str() == "-YY");
  CHECK(back.gates[2].fraction == 0.5);
  CHECK(serialize_circuit(back) == text);
  CHECK_THROWS_AS(parse_circuit("pfq-circuit 1\nqubits 2\nbogus\n"), IoError);
}
