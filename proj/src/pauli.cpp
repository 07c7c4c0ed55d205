#include "pfq/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "pfq/error.hpp"

namespace pfq {

namespace {

std::size_t word_count(std::size_t n) { return (n + 63) / 64; }

void require_same_size(const PauliString& p, const PauliString& q) {
  if (p.n_qubits() != q.n_qubits())
    throw ConfigError("Pauli strings act on different qubit counts: " + std::to_string(p.n_qubits()) +
                      " vs " + std::to_string(q.n_qubits()));
}

const cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

int letter_rank(bool x, bool z) {
  // I < X < Y < Z
  if (!x && !z) return 0;
  if (x && !z) return 1;
  if (x && z) return 2;
  return 3;
}

}  // namespace

PauliString::PauliString(std::size_t n_qubits)
    : n_(n_qubits), x_(word_count(n_qubits), 0), z_(word_count(n_qubits), 0) {}

PauliString PauliString::parse(std::string_view text) {
  bool negative = false;
  if (!text.empty() && (text.front() == '+' || text.front() == '-')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  PauliString p(text.size());
  for (std::size_t q = 0; q < text.size(); ++q) p.set(q, text[q]);
  p.negative_ = negative;
  return p;
}

PauliString PauliString::single(std::size_t n_qubits, std::size_t qubit, char letter) {
  PauliString p(n_qubits);
  p.set(qubit, letter);
  return p;
}

PauliString PauliString::from_words(std::size_t n_qubits, std::vector<std::uint64_t> x,
                                    std::vector<std::uint64_t> z, int sign) {
  if (x.size() != word_count(n_qubits) || z.size() != word_count(n_qubits))
    throw ConfigError("Pauli mask width does not match qubit count");
  PauliString p;
  p.n_ = n_qubits;
  p.x_ = std::move(x);
  p.z_ = std::move(z);
  p.negative_ = sign < 0;
  return p;
}

char PauliString::letter(std::size_t q) const {
  const bool x = (x_[q / 64] >> (q % 64)) & 1U;
  const bool z = (z_[q / 64] >> (q % 64)) & 1U;
  return "IXYZ"[letter_rank(x, z)];
}

void PauliString::set(std::size_t q, char letter) {
  if (q >= n_) throw ConfigError("qubit index out of range");
  bool x = false, z = false;
  switch (letter) {
    case 'I': break;
    case 'X': x = true; break;
    case 'Y': x = z = true; break;
    case 'Z': z = true; break;
    default: throw ConfigError(std::string("invalid Pauli letter '") + letter + "'");
  }
  const std::uint64_t bit = std::uint64_t{1} << (q % 64);
  x_[q / 64] = x ? (x_[q / 64] | bit) : (x_[q / 64] & ~bit);
  z_[q / 64] = z ? (z_[q / 64] | bit) : (z_[q / 64] & ~bit);
}

PauliString PauliString::negated() const {
  PauliString p = *this;
  p.negative_ = !negative_;
  return p;
}

PauliString PauliString::unsigned_copy() const {
  PauliString p = *this;
  p.negative_ = false;
  return p;
}

std::size_t PauliString::support() const {
  std::size_t s = 0;
  for (std::size_t w = 0; w < x_.size(); ++w) s += std::popcount(x_[w] | z_[w]);
  return s;
}

bool PauliString::is_identity() const {
  for (std::size_t w = 0; w < x_.size(); ++w)
    if (x_[w] | z_[w]) return false;
  return true;
}

std::size_t PauliString::y_count() const {
  std::size_t s = 0;
  for (std::size_t w = 0; w < x_.size(); ++w) s += std::popcount(x_[w] & z_[w]);
  return s;
}

std::string PauliString::letters() const {
  std::string s(n_, 'I');
  for (std::size_t q = 0; q < n_; ++q) s[q] = letter(q);
  return s;
}

std::string PauliString::str() const { return (negative_ ? "-" : "") + letters(); }

bool PauliString::operator<(const PauliString& o) const {
  if (n_ != o.n_) return n_ < o.n_;
  for (std::size_t q = 0; q < n_; ++q) {
    const char a = letter(q), b = o.letter(q);
    if (a != b) return a < b;  // 'I' < 'X' < 'Y' < 'Z' in ASCII
  }
  return !negative_ && o.negative_;
}

bool PauliString::same_letters(const PauliString& o) const { return n_ == o.n_ && x_ == o.x_ && z_ == o.z_; }

bool PauliString::operator==(const PauliString& o) const { return same_letters(o) && negative_ == o.negative_; }

std::size_t PauliString::hash() const {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ n_;
  auto mix = [&h](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  for (std::size_t w = 0; w < x_.size(); ++w) {
    mix(x_[w]);
    mix(z_[w]);
  }
  mix(negative_ ? 1 : 0);
  return static_cast<std::size_t>(h);
}

PauliProduct pauli_mul(const PauliString& p, const PauliString& q) {
  require_same_size(p, q);
  const auto& px = p.x_words();
  const auto& pz = p.z_words();
  const auto& qx = q.x_words();
  const auto& qz = q.z_words();
  std::vector<std::uint64_t> rx(px.size()), rz(px.size());
  // With letter(x,z) = i^{xz} X^x Z^z the product picks up i^{x1z1 + x2z2 - x3z3 + 2 z1x2}.
  long k = 0;
  for (std::size_t w = 0; w < px.size(); ++w) {
    rx[w] = px[w] ^ qx[w];
    rz[w] = pz[w] ^ qz[w];
    k += std::popcount(px[w] & pz[w]) + std::popcount(qx[w] & qz[w]) - std::popcount(rx[w] & rz[w]) +
         2 * std::popcount(pz[w] & qx[w]);
  }
  if (p.sign() * q.sign() < 0) k += 2;
  k = ((k % 4) + 4) % 4;
  return {kIPow[k], PauliString::from_words(p.n_qubits(), std::move(rx), std::move(rz))};
}

bool commutes(const PauliString& p, const PauliString& q) {
  require_same_size(p, q);
  const auto& px = p.x_words();
  const auto& pz = p.z_words();
  const auto& qx = q.x_words();
  const auto& qz = q.z_words();
  std::size_t c = 0;
  for (std::size_t w = 0; w < px.size(); ++w) c += std::popcount((px[w] & qz[w]) ^ (pz[w] & qx[w]));
  return c % 2 == 0;
}

PauliHamiltonian::PauliHamiltonian(std::size_t n_qubits, std::vector<PauliTerm> terms) : n_(n_qubits) {
  terms_.reserve(terms.size());
  for (auto& t : terms) add_term(t.coeff, std::move(t.pauli));
}

void PauliHamiltonian::add_term(double coeff, PauliString pauli) {
  if (pauli.n_qubits() != n_)
    throw ConfigError("term acts on " + std::to_string(pauli.n_qubits()) + " qubits, Hamiltonian has " +
                      std::to_string(n_));
  if (!std::isfinite(coeff)) throw ConfigError("non-finite Pauli coefficient");
  terms_.push_back({coeff, std::move(pauli)});
}

double weight_lambda(const PauliHamiltonian& h) {
  double s = 0.0;
  for (const auto& t : h.terms()) s += std::abs(t.coeff);
  return s;
}

NormalizedHamiltonian normalize(const PauliHamiltonian& h) {
  NormalizedHamiltonian out;
  out.n_qubits = h.n_qubits();
  out.lambda = weight_lambda(h);
  if (!(out.lambda > 0.0)) throw NumericError("cannot normalize a zero Hamiltonian");
  out.probs.reserve(h.size());
  out.paulis.reserve(h.size());
  for (const auto& t : h.terms()) {
    out.probs.push_back(std::abs(t.coeff) / out.lambda);
    out.paulis.push_back(t.coeff < 0 ? t.pauli.negated() : t.pauli);
  }
  return out;
}

PauliHamiltonian denormalize(const NormalizedHamiltonian& nh) {
  PauliHamiltonian h(nh.n_qubits);
  for (std::size_t l = 0; l < nh.probs.size(); ++l) h.add_term(nh.lambda * nh.probs[l], nh.paulis[l]);
  return h;
}

PauliHamiltonian truncate(const PauliHamiltonian& h, double weight_budget) {
  if (weight_budget < 0) throw ConfigError("truncation budget must be non-negative");
  std::vector<std::size_t> order(h.size());
  std::iota(order.begin(), order.end(), 0);
  // Ties drop the later term first so that the result does not depend on sort stability.
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double wa = std::abs(h[a].coeff), wb = std::abs(h[b].coeff);
    return wa != wb ? wa < wb : a > b;
  });
  std::vector<char> keep(h.size(), 1);
  double dropped = 0.0;
  for (std::size_t i : order) {
    const double w = std::abs(h[i].coeff);
    if (dropped + w > weight_budget) break;
    dropped += w;
    keep[i] = 0;
  }
  PauliHamiltonian out(h.n_qubits());
  for (std::size_t i = 0; i < h.size(); ++i)
    if (keep[i]) out.add_term(h[i].coeff, h[i].pauli);
  return out;
}

PauliHamiltonian lexicographic_sort(const PauliHamiltonian& h) {
  std::vector<PauliTerm> terms = h.terms();
  std::stable_sort(terms.begin(), terms.end(),
                   [](const PauliTerm& a, const PauliTerm& b) { return a.pauli < b.pauli; });
  return PauliHamiltonian(h.n_qubits(), std::move(terms));
}

PauliHamiltonian absorb_signs(const PauliHamiltonian& h) {
  PauliHamiltonian out(h.n_qubits());
  for (const auto& t : h.terms())
    out.add_term(std::abs(t.coeff), t.coeff < 0 ? t.pauli.negated() : t.pauli);
  return out;
}

PauliHamiltonian simplify(const PauliHamiltonian& h, double drop_tol) {
  std::unordered_map<PauliString, std::size_t, PauliHash> index;
  std::vector<PauliTerm> acc;
  for (const auto& t : h.terms()) {
    PauliString key = t.pauli.unsigned_copy();
    const double c = t.coeff * t.pauli.sign();
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, acc.size());
      acc.push_back({c, std::move(key)});
    } else {
      acc[it->second].coeff += c;
    }
  }
  PauliHamiltonian out(h.n_qubits());
  for (auto& t : acc)
    if (std::abs(t.coeff) > drop_tol) out.add_term(t.coeff, std::move(t.pauli));
  return out;
}

bool approx_equal(const PauliHamiltonian& a, const PauliHamiltonian& b, double tol) {
  if (a.n_qubits() != b.n_qubits() || a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].pauli.same_letters(b[i].pauli)) return false;
    if (std::abs(a[i].coeff * a[i].pauli.sign() - b[i].coeff * b[i].pauli.sign()) > tol) return false;
  }
  return true;
}

}  // namespace pfq
