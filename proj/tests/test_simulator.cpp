#include <doctest.h>

#include <numbers>

#include "oracles.hpp"
#include "pfq/error.hpp"
#include "pfq/schedule.hpp"
#include "pfq/simulator.hpp"
#include "pfq/trotter_fit.hpp"

using namespace pfq;
constexpr double kPi = std::numbers::pi;

TEST_CASE("ground states of single Paulis") {
  PauliHamiltonian z(1);
  z.add_term(1.0, "Z");
  const auto gz = ground_state(z);
  CHECK(gz.energy == doctest::Approx(-1.0));
  CHECK(fidelity(gz.state, StateVector::basis(1, 1)) == doctest::Approx(1.0));

  PauliHamiltonian x(1);
  x.add_term(1.0, "X");
  const auto gx = ground_state(x);
  CHECK(gx.energy == doctest::Approx(-1.0));
  Eigen::VectorXcd minus(2);
  minus << 1, -1;
  CHECK(fidelity(gx.state, StateVector(1, minus)) == doctest::Approx(1.0));
}

TEST_CASE("ground state matches independent diagonalization") {
  oracle::Gen g(6);
  const auto h = oracle::random_hamiltonian(g, 6, 20);
  const oracle::Mat m = oracle::hamiltonian(h);
  Eigen::ComplexEigenSolver<oracle::Mat> ces(m);
  double e0 = 1e300;
  for (Eigen::Index i = 0; i < ces.eigenvalues().size(); ++i) e0 = std::min(e0, ces.eigenvalues()(i).real());
  const auto gs = ground_state(h);
  CHECK(gs.energy == doctest::Approx(e0).epsilon(1e-12));
  const double residual = (m * gs.state.amplitudes - gs.energy * gs.state.amplitudes).norm();
  CHECK(residual <= 1e-9 * m.norm());
  CHECK(gs.state.norm() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK((dense_matrix(h) - m).norm() < 1e-12);
}

TEST_CASE("spectral data is sorted and orthonormal") {
  oracle::Gen g(7);
  const auto spec = diagonalize(oracle::random_hamiltonian(g, 4, 9));
  for (Eigen::Index i = 1; i < spec.energies.size(); ++i) CHECK(spec.energies(i) >= spec.energies(i - 1));
  const oracle::Mat gram = spec.vectors.adjoint() * spec.vectors;
  CHECK((gram - oracle::Mat::Identity(16, 16)).norm() < 1e-10);
}

TEST_CASE("exact evolution") {
  oracle::Gen g(8);
  const auto h = oracle::random_hamiltonian(g, 4, 8);
  const StateVector psi(4, oracle::random_state(g, 4));
  CHECK(fidelity(exact_evolve(h, 0.0, psi), psi) == doctest::Approx(1.0));
  const StateVector out = exact_evolve(h, 0.7, psi);
  const oracle::Vec ref = oracle::evolve(oracle::hamiltonian(h), 0.7) * psi.amplitudes;
  CHECK((out.amplitudes - ref).norm() < 1e-10);
  CHECK(out.norm() == doctest::Approx(1.0).epsilon(1e-10));
  const StateVector two = exact_evolve(h, 0.4, exact_evolve(h, 0.3, psi));
  CHECK((two.amplitudes - out.amplitudes).norm() < 1e-9);

  PauliHamiltonian z(1);
  z.add_term(1.0, "Z");
  Eigen::VectorXcd plus(2), minus(2);
  plus << 1, 1;
  minus << 1, -1;
  CHECK(fidelity(exact_evolve(z, kPi / 2, StateVector(1, plus)), StateVector(1, minus)) == doctest::Approx(1.0));
}

TEST_CASE("Pauli rotations match dense exponentials") {
  oracle::Gen g(9);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + trial % 5;
    const auto p = PauliString::parse((trial % 2 ? "-" : "") + oracle::random_letters(g, n, true));
    const double phi = oracle::uniform(g, -3, 3);
    StateVector psi(n, oracle::random_state(g, n));
    const oracle::Vec ref = oracle::evolve(oracle::pauli(p), phi) * psi.amplitudes;
    StateVector rot = psi;
    apply_pauli_rotation(rot, p, phi);
    CHECK((rot.amplitudes - ref).norm() < 1e-12);
    CHECK(rot.norm() == doctest::Approx(1.0).epsilon(1e-12));
    StateVector bare = psi;
    apply_pauli(bare, p);
    CHECK((bare.amplitudes - oracle::pauli(p) * psi.amplitudes).norm() < 1e-12);
    CHECK(std::abs(expectation(psi, p) - psi.amplitudes.dot(oracle::pauli(p) * psi.amplitudes)) < 1e-12);
    // The matrix form rotates each column.
    Eigen::MatrixXcd cols(psi.dim(), 2);
    cols.col(0) = psi.amplitudes;
    cols.col(1) = bare.amplitudes;
    apply_pauli_rotation(cols, p, phi);
    CHECK((cols.col(0) - ref).norm() < 1e-12);
  }
  StateVector zero(1);
  apply_pauli_rotation(zero, PauliString::parse("Z"), kPi / 2);
  CHECK(std::abs(zero.amplitudes(0) - std::polar(1.0, -kPi / 2)) < 1e-15);
  StateVector same(2, oracle::random_state(g, 2));
  StateVector copy = same;
  apply_pauli_rotation(copy, PauliString::parse("XY"), 0.0);
  CHECK((copy.amplitudes - same.amplitudes).norm() == 0.0);
}

TEST_CASE("Hamiltonian application and energy expectation") {
  oracle::Gen g(10);
  const auto h = oracle::random_hamiltonian(g, 5, 12);
  const oracle::Vec psi = oracle::random_state(g, 5);
  CHECK((apply_hamiltonian(h, psi) - oracle::hamiltonian(h) * psi).norm() < 1e-12);
  CHECK(expectation(StateVector(5, psi), h) == doctest::Approx(psi.dot(oracle::hamiltonian(h) * psi).real()));
}

TEST_CASE("signal g(t)") {
  oracle::Gen g(11);
  const auto h = oracle::random_hamiltonian(g, 3, 6);
  const StateVector psi(3, oracle::random_state(g, 3));
  CHECK(std::abs(signal_g(h, psi, 0.0) - cplx(1, 0)) < 1e-12);
  const auto spec = diagonalize(h);
  const Eigen::VectorXd c = overlaps(spec, psi);
  CHECK(c.sum() == doctest::Approx(1.0));
  for (double t : {0.3, 1.7, -2.2}) {
    cplx sum = 0;
    for (Eigen::Index k = 0; k < c.size(); ++k) sum += c(k) * std::polar(1.0, -spec.energies(k) * t);
    const cplx s = signal_g(h, psi, t);
    CHECK(std::abs(s - sum) < 1e-12);
    CHECK(std::abs(s) <= 1 + 1e-12);
    CHECK(std::abs(signal_g(h, psi, -t) - std::conj(s)) < 1e-12);
    CHECK(std::abs(signal_g(spec, psi, t) - s) < 1e-12);
  }
  const StateVector eig(3, spec.vectors.col(2));
  CHECK(std::abs(signal_g(h, eig, 0.9) - std::polar(1.0, -spec.energies(2) * 0.9)) < 1e-12);
}

TEST_CASE("dense limit is enforced") {
  const std::size_t old = dense_limit();
  set_dense_limit(3);
  PauliHamiltonian big(4);
  big.add_term(1.0, "ZZZZ");
  CHECK_THROWS_AS(ground_state(big), DimensionError);
  CHECK_THROWS_AS(check_dense(4), NumericError);
  set_dense_limit(old);
  CHECK_NOTHROW(ground_state(big));
}

TEST_CASE("formula matrix equals the product of exponentials") {
  oracle::Gen g(12);
  const auto h = oracle::random_hamiltonian(g, 3, 4);
  const double delta = 0.37;
  const auto sched = suzuki_schedule(2, h.size());
  // Second order: forward half steps then backward half steps, last entry leftmost.
  oracle::Mat ref = oracle::Mat::Identity(8, 8);
  std::vector<oracle::Mat> terms;
  for (const auto& t : h.terms()) terms.push_back(t.coeff * oracle::pauli(t.pauli));
  for (std::size_t l = 0; l < terms.size(); ++l) ref = oracle::evolve(terms[l], delta / 2) * ref;
  for (std::size_t l = terms.size(); l-- > 0;) ref = oracle::evolve(terms[l], delta / 2) * ref;
  CHECK((formula_matrix(term_slots(h), sched, delta) - ref).norm() < 1e-12);
}

TEST_CASE("effective ground energy of a product formula") {
  PauliHamiltonian commuting(3);
  commuting.add_term(0.5, "ZZI");
  commuting.add_term(-0.7, "IZZ");
  commuting.add_term(0.3, "ZIZ");
  const double e0 = ground_state(commuting).energy;
  for (int order : {1, 2, 4})
    CHECK(formula_ground_energy(commuting, suzuki_schedule(order, 3), 0.3) == doctest::Approx(e0).epsilon(1e-12));

  oracle::Gen g(13);
  PauliHamiltonian h(3);
  do {
    h = oracle::random_hamiltonian(g, 3, 6);
  } while (oracle::min_gap_to_ground(oracle::hamiltonian(h)) < 0.05);
  const double exact = ground_state(h).energy;
  double prev = 1e300;
  for (double d : {0.2, 0.1, 0.05, 0.025}) {
    const double err = std::abs(formula_ground_energy(h, suzuki_schedule(2, h.size()), d) - exact);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-3);
  const double rho = diagonalize(h).energies.cwiseAbs().maxCoeff();
  CHECK_THROWS_AS(formula_ground_energy(h, suzuki_schedule(2, h.size()), 1.01 * kPi / rho), NumericError);
}

TEST_CASE("two-qubit X1 + Z1Z2 at second order follows C delta^2") {
  PauliHamiltonian h(2);
  h.add_term(1.0, "XI");
  h.add_term(1.0, "ZZ");
  const double e0 = ground_state(h).energy;
  std::vector<double> ds, es;
  for (double d = 0.01; d < 0.2; d *= 1.25) {
    ds.push_back(d);
    es.push_back(std::abs(formula_ground_energy(h, suzuki_schedule(2, 2), d) - e0));
  }
  const auto fit = fit_power_law(ds, es);
  CHECK(fit.exponent == doctest::Approx(2.0).epsilon(0.02));
  const double at = std::abs(formula_ground_energy(h, suzuki_schedule(2, 2), 0.1) - e0);
  CHECK(at == doctest::Approx(fit.constant * 0.01).epsilon(0.05));
}

TEST_CASE("first-order formula has a second-order ground-energy bias") {
  oracle::Gen g(14);
  PauliHamiltonian h(3);
  do h = oracle::random_real_hamiltonian(g, 3, 5);
  while (oracle::min_gap_to_ground(oracle::hamiltonian(h)) < 0.05);
  const double e0 = ground_state(h).energy;
  std::vector<double> ds, es;
  for (double d = 0.002; d < 0.03; d *= 1.3) {
    ds.push_back(d);
    es.push_back(std::abs(formula_ground_energy(h, suzuki_schedule(1, h.size()), d) - e0));
  }
  CHECK(fit_power_law(ds, es).exponent == doctest::Approx(2.0).epsilon(0.05));
}
