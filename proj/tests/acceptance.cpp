// Acceptance checks, one line per criterion. Exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <string>

#include "oracles.hpp"
#include "pfq/estimation.hpp"
#include "pfq/formulas.hpp"
#include "pfq/hamiltonian.hpp"
#include "pfq/resources.hpp"
#include "pfq/simulator.hpp"
#include "pfq/trotter_fit.hpp"

using namespace pfq;
using oracle::Mat;
using oracle::Vec;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

PauliHamiltonian unit_weight(const NormalizedHamiltonian& nh) {
  return denormalize(NormalizedHamiltonian{nh.n_qubits, 1.0, nh.probs, nh.paulis});
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// 1. Exhaustive qDRIFT enumeration against the closed form.
Outcome qdrift_enumeration() {
  oracle::Gen g(101);
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = 1 + i % 4, l = 1 + (i / 4) % 4, r = 1 + (i / 3) % 4;
    const double tau = i % 2 ? 0.3 : 0.1;
    const auto nh = normalize(oracle::random_hamiltonian(g, n, std::min<std::size_t>(l, (std::size_t(1) << (2 * n)) - 1)));
    const Vec psi = oracle::random_state(g, n);
    const auto mix = oracle::pauli_mix(nh);
    const cplx enumerated = oracle::enumerate_amplitude(std::vector<oracle::Step>(r, oracle::qdrift_step(mix, tau)), psi);
    const Mat step = Mat::Identity(psi.size(), psi.size()) - cplx(0, tau) * oracle::hamiltonian(unit_weight(nh));
    Mat pw = Mat::Identity(psi.size(), psi.size());
    for (std::size_t k = 0; k < r; ++k) pw = step * pw;
    const cplx closed = std::pow(1 + tau * tau, -0.5 * static_cast<double>(r)) * psi.dot(pw * psi);
    const cplx library = qdrift_expectation(nh, StateVector(n, psi), tau, r);
    worst = std::max({worst, std::abs(enumerated - closed), std::abs(library - closed)});
  }
  return {worst <= 1e-10, fmt("50 instances, max deviation %.2e (tolerance 1e-10)", worst)};
}

// 2. Randomized Taylor expansion: enumerated mean against exact evolution.
Outcome rte_enumeration() {
  oracle::Gen g(202);
  bool ok = true;
  double worst_ratio = 0, worst_lib = 0;
  int cases = 0;
  for (int i = 0; i < 6; ++i) {
    const std::size_t n = 1 + i % 3;
    const auto nh = normalize(oracle::random_hamiltonian(g, n, 2));
    const Vec psi = oracle::random_state(g, n);
    const auto mix = oracle::pauli_mix(nh);
    const Mat h = oracle::hamiltonian(unit_weight(nh));
    const auto spec = diagonalize(unit_weight(nh));
    for (double tau : {0.1, 0.2, 0.3})
      for (std::size_t r : {1, 2}) {
        const cplx mean = oracle::enumerate_amplitude(std::vector<oracle::Step>(r, oracle::rte_step(mix, tau, 6)), psi);
        const cplx exact = psi.dot(oracle::evolve(h, tau * static_cast<double>(r)) * psi);
        const double bound = 2.0 * static_cast<double>(r) * oracle::taylor_tail(tau, 7);
        const double dev = std::abs(mean - exact);
        ok = ok && dev <= bound;
        worst_ratio = std::max(worst_ratio, dev / bound);
        const double b = std::pow(rte_normalization(tau, 6), static_cast<double>(r));
        worst_lib = std::max(worst_lib, std::abs(b * rte_expectation(spec, StateVector(n, psi), tau, r, 6) - mean));
        ++cases;
      }
  }
  ok = ok && worst_lib < 1e-12;
  return {ok, fmt("%g cases, max deviation/bound %.3f, library vs enumeration %.1e", cases, worst_ratio, worst_lib)};
}

// 3. Partially randomized formula: enumerated expected operator against S_2(δ)^s.
Outcome partial_enumeration() {
  oracle::Gen g(303);
  const int n_max = 4;
  bool ok = true;
  double worst_ratio = 0, worst_lib = 0;
  int cases = 0;
  for (int inst = 0; inst < 3; ++inst) {
    const auto h = oracle::random_hamiltonian(g, 3, 4);
    const auto split = partial_split(h, 2);
    const Vec psi = oracle::random_state(g, 3);
    const auto nr = normalize(split.randomized);
    const auto mix = oracle::pauli_mix(nr);
    // Reference: the second-order formula on slots (H_D1, H_D2, H_R) from dense exponentials.
    std::vector<Mat> slot_mats;
    for (const auto& t : split.deterministic.terms()) slot_mats.push_back(t.coeff * oracle::pauli(t.pauli));
    slot_mats.push_back(oracle::hamiltonian(split.randomized));
    const auto sched = suzuki_schedule(2, 2, true);
    for (double delta : {0.1, 0.3})
      for (std::size_t s : {1, 2}) {
        // κ small enough that every randomized step is a single segment.
        const double kappa = 0.5 / (split.lambda_r * split.lambda_r * delta * delta * static_cast<double>(s));
        const auto plan = partial_plan(split, 2, delta, s, kappa, n_max);
        Mat one = Mat::Identity(8, 8);
        for (const auto& e : sched.entries) one = oracle::evolve(slot_mats[e.term], e.fraction * delta) * one;
        Mat ref = Mat::Identity(8, 8);
        for (std::size_t k = 0; k < s; ++k) ref = one * ref;
        const cplx target = psi.dot(ref * psi);

        std::vector<oracle::Step> steps;
        double tails = 0, growth = 0;
        for (std::size_t rep = 0; rep < s; ++rep)
          for (const auto& st : plan.steps) {
            if (st.term < split.deterministic.size()) {
              steps.push_back({{1.0, oracle::evolve(slot_mats[st.term], st.fraction * delta)}});
              continue;
            }
            for (std::size_t seg = 0; seg < st.r; ++seg) {
              steps.push_back(oracle::rte_step(mix, st.tau, n_max));
              tails += oracle::taylor_tail(st.tau, n_max + 2);
              growth += std::abs(st.tau);
            }
          }
        for (const auto& st : plan.steps) ok = ok && (st.term < split.deterministic.size() || st.r == 1);
        const cplx mean = oracle::enumerate_amplitude(steps, psi);
        // Each truncated segment has norm ≤ e^{|τ|}; telescoping gives the bound.
        const double bound = tails * std::exp(growth);
        const double dev = std::abs(mean - target);
        ok = ok && dev <= bound;
        worst_ratio = std::max(worst_ratio, dev / bound);
        const cplx lib = psi.dot(partial_expected_operator(split, plan) * psi);
        worst_lib = std::max(worst_lib, std::abs(lib - mean));
        ++cases;
      }
  }
  ok = ok && worst_lib < 1e-10;
  return {ok, fmt("%g cases, max deviation/bound %.3f, library vs enumeration %.1e", cases, worst_ratio, worst_lib)};
}

// 4. Trotter error exponents on random real 3-qubit Hamiltonians.
Outcome trotter_exponents() {
  oracle::Gen g(404);
  bool ok = true;
  std::string detail;
  for (int p : {1, 2, 4}) {
    double op_lo = 1e9, op_hi = -1e9, gs_lo = 1e9, gs_hi = -1e9;
    for (int i = 0; i < 20; ++i) {
      PauliHamiltonian h(3);
      do h = oracle::random_real_hamiltonian(g, 3, 6);
      while (oracle::min_gap_to_ground(oracle::hamiltonian(h)) < 0.05);
      const double lambda = weight_lambda(h);
      const auto c = measure_error_curve(h, p, default_delta_grid(lambda));
      const double floor = 1e-11 * lambda;
      const auto op = fit_power_law_above(c.deltas, c.op_errors, floor);
      const auto gs = fit_power_law_above(c.deltas, c.gs_errors, floor);
      op_lo = std::min(op_lo, op.exponent);
      op_hi = std::max(op_hi, op.exponent);
      gs_lo = std::min(gs_lo, gs.exponent);
      gs_hi = std::max(gs_hi, gs.exponent);
    }
    const double gs_want = std::max(p, 2);
    ok = ok && std::abs(op_lo - (p + 1)) <= 0.1 && std::abs(op_hi - (p + 1)) <= 0.1;
    ok = ok && std::abs(gs_lo - gs_want) <= 0.15 && std::abs(gs_hi - gs_want) <= 0.15;
    detail += fmt("p=%g op [%.3f, %.3f]", p, op_lo, op_hi) + fmt(" gs [%.3f, %.3f]; ", gs_lo, gs_hi);
  }
  return {ok, detail};
}

// 5. RPE constants on the closed-form signal, one eigenvalue per seed.
Outcome rpe_constants() {
  bool ok = true;
  std::string detail;
  double lo_tot = 1e9, hi_tot = 0, lo_max = 1e9, hi_max = 0, lo_rte = 1e9, hi_rte = 0, lo_qd = 1e9, hi_qd = 0;
  for (int big_m = 4; big_m <= 10; ++big_m) {
    for (Method method : {Method::Exact, Method::Rte, Method::Qdrift}) {
      RPEConfig c;
      c.rounds = big_m;
      c.method = method;
      double sq = 0, t_tot = 0, t_max = 0, r_tot = 0;
      const int seeds = 500;
      for (int s = 0; s < seeds; ++s) {
        Rng rng(derive_seed(5000 + static_cast<std::uint64_t>(big_m), static_cast<std::uint64_t>(s)));
        const double e = std::uniform_real_distribution<double>(-1, 1)(rng);
        const SpectralSignal signal({e}, {1.0}, method);
        c.seed = derive_seed(9000 + static_cast<std::uint64_t>(big_m), static_cast<std::uint64_t>(s));
        const auto r = rpe_run(signal, c);
        sq += (r.estimate - e) * (r.estimate - e);
        t_tot = r.t_tot;
        t_max = r.t_max;
        r_tot = r.r_tot;
      }
      const double rmse = std::sqrt(sq / seeds);
      if (method == Method::Exact) {
        const double a = rmse * t_tot / kPi, b = rmse * t_max / kPi;
        lo_tot = std::min(lo_tot, a);
        hi_tot = std::max(hi_tot, a);
        lo_max = std::min(lo_max, b);
        hi_max = std::max(hi_max, b);
        ok = ok && a >= 2.5 && a <= 10 && b >= 0.04 && b <= 0.16;
      } else if (method == Method::Rte) {
        const double k = rmse * rmse * r_tot;
        lo_rte = std::min(lo_rte, k);
        hi_rte = std::max(hi_rte, k);
        ok = ok && k >= 8 && k <= 32;
      } else {
        const double k = rmse * rmse * r_tot;
        lo_qd = std::min(lo_qd, k);
        hi_qd = std::max(hi_qd, k);
      }
    }
  }
  detail = fmt("M=4..10: RMSE*t_tot/pi in [%.2f, %.2f], RMSE*t_max/pi in [%.3f, %.3f]", lo_tot, hi_tot, lo_max, hi_max) +
           fmt("; RTE RMSE^2*r_tot in [%.1f, %.1f] (qDRIFT [%.1f, %.1f], informational)", lo_rte, hi_rte, lo_qd, hi_qd);
  return {ok, detail};
}

// 6. Depth scales as ξ², total cost does not.
Outcome xi_scaling() {
  bool ok = true;
  std::string detail;
  for (auto method : {RandomizedMethod::Qdrift, RandomizedMethod::Rte}) {
    const auto base = randomized_cost(405, 0.0016, 1.0, method);
    double tot_lo = base.rotations_total, tot_hi = base.rotations_total, worst = 0;
    for (double xi : {0.5, 0.1}) {
      const auto r = randomized_cost(405, 0.0016, xi, method);
      const double ratio = r.rotations_max / base.rotations_max / (xi * xi);
      worst = std::max(worst, std::abs(ratio - 1));
      tot_lo = std::min(tot_lo, r.rotations_total);
      tot_hi = std::max(tot_hi, r.rotations_total);
    }
    const double spread = (tot_hi - tot_lo) / tot_lo;
    ok = ok && worst <= 0.2 && spread <= 0.15;
    detail += std::string(method == RandomizedMethod::Rte ? "rte" : "qdrift") +
              fmt(": r_max/xi^2 off by %.4f, r_tot spread %.4f; ", worst, spread);
  }
  return {ok, detail};
}

// 7. Resource arithmetic at the large-instance parameters.
Outcome resource_arithmetic() {
  const auto q = randomized_cost(405, 0.0016, 0.1, RandomizedMethod::Qdrift);
  const auto h = hwp_rate(10, 17);
  bool ok = q.params.at("M") == 15 && q.params.at("K_M") == 25313;
  const double r_max = q.rotations_max;
  // K_M^2 = 640747969 is 6.41e8 to three figures; the published 6.4e8 carries two.
  char two[32];
  std::snprintf(two, sizeof two, "%.1e", r_max);
  ok = ok && r_max == 25313.0 * 25313.0 && std::string(two) == "6.4e+08";
  ok = ok && h.numerator == 5 && h.denominator == 2 && h.ancillas == 42;
  bool t_ok = true;
  for (double e : {1e-3, 1e-6, std::ldexp(1.0, -20), 1e-12}) t_ok = t_ok && synthesis_t_count(e) == 1.14 * std::log2(1 / e) + 9.2;
  t_ok = t_ok && synthesis_t_count(std::ldexp(1.0, -20)) == 1.14 * 20 + 9.2;
  ok = ok && t_ok;
  return {ok, fmt("M=%g K_M=%g r_max=%.0f, hwp(10,17)=", q.params.at("M"), q.params.at("K_M"), r_max) +
                  std::to_string(h.numerator) + "/" + std::to_string(h.denominator) + " with " + std::to_string(h.ancillas) +
                  " ancillas, T-count formula " + (t_ok ? "exact" : "mismatch")};
}

// 8. Eight-qubit synthetic chain from tensors to phase estimation.
Outcome end_to_end() {
  const auto dir = std::filesystem::temp_directory_path() / "pfq_acceptance";
  std::filesystem::create_directories(dir);
  const auto tensors = synthetic_chain(4, 1.4);
  save_tensor_file((dir / "chain4.tensors").string(), tensors);
  const auto loaded = load_tensor_file((dir / "chain4.tensors").string());
  const auto q = majorana_pauli_decompose(loaded);
  PauliHamiltonian h(q.paulis.n_qubits());
  h.add_term(q.constant, std::string(q.paulis.n_qubits(), 'I'));
  for (const auto& t : q.paulis.terms()) h.add_term(t.coeff, t.pauli);
  save_pauli_file((dir / "chain4.pauli").string(), h);
  const auto back = load_pauli_file((dir / "chain4.pauli").string());
  bool ok = approx_equal(back, h, 0.0) && h.n_qubits() == 8;

  const double lambda = weight_lambda(q.paulis);
  const auto curve = measure_error_curve(q.paulis, 2, log_grid(0.01 / lambda, 0.3 / lambda, 4));
  const auto fit = fit_power_law_above(curve.deltas, curve.gs_errors, 1e-11 * lambda);
  ok = ok && fit.acceptable();

  const auto gs = ground_state(back);
  const double eps = 5e-3 * lambda;
  RPEConfig c = rpe_config_for(5e-3, 1.0, Method::Qdrift);
  int within = 0;
  const int seeds = 50;
  for (int s = 0; s < seeds; ++s) {
    c.seed = derive_seed(8080, static_cast<std::uint64_t>(s));
    const auto r = rpe_run(back, gs.state, c);
    if (std::abs(r.estimate - gs.energy) <= eps) ++within;
  }
  // Two seeds on sampled circuits as a cross-check of the closed-form path.
  c.statevector = true;
  int sv_within = 0;
  for (int s = 0; s < 2; ++s) {
    c.seed = derive_seed(8081, static_cast<std::uint64_t>(s));
    if (std::abs(rpe_run(back, gs.state, c).estimate - gs.energy) <= eps) ++sv_within;
  }
  ok = ok && within >= 45;
  return {ok, fmt("8 qubits, lambda=%.3f, Trotter gs exponent %.3f (r2 %.4f), ", lambda, fit.exponent, fit.r_squared) +
                  fmt("%g/50 seeds within eps=%.4g; sampled circuits %g/2", within, eps, sv_within)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"1 qDRIFT enumeration matches the closed form", qdrift_enumeration},
      {"2 randomized Taylor series within its truncation bound", rte_enumeration},
      {"3 partially randomized formula within its truncation bound", partial_enumeration},
      {"4 Trotter error exponents", trotter_exponents},
      {"5 robust phase estimation constants", rpe_constants},
      {"6 depth and total cost scaling with xi", xi_scaling},
      {"7 resource arithmetic", resource_arithmetic},
      {"8 end-to-end eight-qubit phase estimation", end_to_end},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures;
}
