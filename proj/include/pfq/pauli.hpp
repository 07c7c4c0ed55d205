#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pfq {

using cplx = std::complex<double>;

// Signed Pauli string ±P_0 ⊗ P_1 ⊗ ... in symplectic form. Letter q is (x_q, z_q):
// (0,0)=I, (1,0)=X, (1,1)=Y, (0,1)=Z. Qubit q is character q of the text form and
// bit q of a computational basis index.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::size_t n_qubits);

  // Accepts an optional leading '+' or '-' followed by n letters from IXYZ.
  static PauliString parse(std::string_view text);
  static PauliString single(std::size_t n_qubits, std::size_t qubit, char letter);
  static PauliString from_words(std::size_t n_qubits, std::vector<std::uint64_t> x,
                                std::vector<std::uint64_t> z, int sign = 1);

  std::size_t n_qubits() const { return n_; }
  char letter(std::size_t q) const;
  void set(std::size_t q, char letter);
  int sign() const { return negative_ ? -1 : 1; }
  void set_sign(int s) { negative_ = s < 0; }
  PauliString negated() const;
  PauliString unsigned_copy() const;

  std::size_t support() const;
  bool is_identity() const;  // ignores the sign
  std::size_t y_count() const;

  std::string letters() const;
  std::string str() const;  // letters with a '-' prefix when negative

  const std::vector<std::uint64_t>& x_words() const { return x_; }
  const std::vector<std::uint64_t>& z_words() const { return z_; }
  // Low 64 bits of the masks; the statevector code only needs these.
  std::uint64_t x_mask() const { return x_.empty() ? 0 : x_[0]; }
  std::uint64_t z_mask() const { return z_.empty() ? 0 : z_[0]; }

  // Lexicographic over letters (I < X < Y < Z, qubit 0 most significant), then sign.
  bool operator<(const PauliString& other) const;
  bool operator==(const PauliString& other) const;
  bool operator!=(const PauliString& other) const { return !(*this == other); }
  bool same_letters(const PauliString& other) const;
  std::size_t hash() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> x_, z_;
  bool negative_ = false;
};

struct PauliHash {
  std::size_t operator()(const PauliString& p) const { return p.hash(); }
};

// P·Q = phase · pauli, with the result's sign fixed to +1 and all signs folded into phase.
struct PauliProduct {
  cplx phase;
  PauliString pauli;
};

PauliProduct pauli_mul(const PauliString& p, const PauliString& q);
bool commutes(const PauliString& p, const PauliString& q);

struct PauliTerm {
  double coeff = 0.0;
  PauliString pauli;
};

// Weighted sum of Pauli strings with real coefficients, in insertion order.
class PauliHamiltonian {
 public:
  explicit PauliHamiltonian(std::size_t n_qubits = 0) : n_(n_qubits) {}
  PauliHamiltonian(std::size_t n_qubits, std::vector<PauliTerm> terms);

  void add_term(double coeff, PauliString pauli);
  void add_term(double coeff, std::string_view letters) { add_term(coeff, PauliString::parse(letters)); }

  std::size_t n_qubits() const { return n_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  const PauliTerm& operator[](std::size_t i) const { return terms_[i]; }

 private:
  std::size_t n_;
  std::vector<PauliTerm> terms_;
};

double weight_lambda(const PauliHamiltonian& h);

// H = λ Σ_l p_l P_l with the coefficient signs absorbed into P_l.
struct NormalizedHamiltonian {
  std::size_t n_qubits = 0;
  double lambda = 0.0;
  std::vector<double> probs;
  std::vector<PauliString> paulis;
};

NormalizedHamiltonian normalize(const PauliHamiltonian& h);
// Rebuilds λ Σ p_l P_l with positive coefficients.
PauliHamiltonian denormalize(const NormalizedHamiltonian& nh);

// Drops the smallest-magnitude terms while the dropped weight stays within budget.
PauliHamiltonian truncate(const PauliHamiltonian& h, double weight_budget);
PauliHamiltonian lexicographic_sort(const PauliHamiltonian& h);
// Moves negative coefficients into the Pauli signs.
PauliHamiltonian absorb_signs(const PauliHamiltonian& h);
// Combines terms with equal letters and drops |coeff| <= drop_tol.
PauliHamiltonian simplify(const PauliHamiltonian& h, double drop_tol = 0.0);

bool approx_equal(const PauliHamiltonian& a, const PauliHamiltonian& b, double tol = 1e-12);

}  // namespace pfq
