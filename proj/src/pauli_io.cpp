#include <algorithm>
#include <array>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "pfq/error.hpp"
#include "pfq/hamiltonian.hpp"

namespace pfq {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  throw IoError("line " + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& tok, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v))
    parse_fail(line, "invalid number '" + tok + "'");
  return v;
}

std::size_t parse_count(const std::string& tok, std::size_t line) {
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
    parse_fail(line, "invalid count '" + tok + "'");
  return static_cast<std::size_t>(std::stoull(tok));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

// Splits into whitespace tokens, skipping blank and '#' lines; keeps 1-based line numbers.
struct Line {
  std::size_t number;
  std::vector<std::string> tokens;
};

std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> lines;
  std::istringstream in(text);
  std::string raw;
  std::size_t n = 0;
  while (std::getline(in, raw)) {
    ++n;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    Line l{n, {}};
    std::string tok;
    while (ls >> tok) l.tokens.push_back(tok);
    if (!l.tokens.empty()) lines.push_back(std::move(l));
  }
  return lines;
}

}  // namespace

PauliHamiltonian parse_pauli_text(const std::string& text) {
  const auto lines = tokenize(text);
  if (lines.empty()) throw IoError("line 1: missing 'qubits <n>' header");
  const Line& head = lines.front();
  if (head.tokens.size() != 2 || head.tokens[0] != "qubits") parse_fail(head.number, "expected 'qubits <n>'");
  const std::size_t n = parse_count(head.tokens[1], head.number);
  PauliHamiltonian h(n);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const Line& l = lines[i];
    if (l.tokens.size() != 2) parse_fail(l.number, "expected '<coeff> <pauli>'");
    const double c = parse_double(l.tokens[0], l.number);
    PauliString p;
    try {
      p = PauliString::parse(l.tokens[1]);
    } catch (const ConfigError& e) {
      parse_fail(l.number, e.what());
    }
    if (p.n_qubits() != n)
      parse_fail(l.number, "Pauli string has " + std::to_string(p.n_qubits()) + " qubits, header says " +
                               std::to_string(n));
    h.add_term(c, std::move(p));
  }
  return h;
}

std::string format_pauli_text(const PauliHamiltonian& h) {
  std::string out = "qubits " + std::to_string(h.n_qubits()) + "\n";
  for (const auto& t : h.terms()) out += fmt17(t.coeff) + " " + t.pauli.str() + "\n";
  return out;
}

PauliHamiltonian load_pauli_file(const std::string& path) {
  try {
    return parse_pauli_text(read_file(path));
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

void save_pauli_file(const std::string& path, const PauliHamiltonian& h) { write_file(path, format_pauli_text(h)); }

// ---- tensors ---------------------------------------------------------------

FermionTensors FermionTensors::zeros(std::size_t n_orbitals, std::size_t n_electrons) {
  FermionTensors t;
  t.n_orbitals = n_orbitals;
  t.n_electrons = n_electrons;
  t.one_body = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_orbitals), static_cast<Eigen::Index>(n_orbitals));
  t.two_body.assign(n_orbitals * n_orbitals * n_orbitals * n_orbitals, 0.0);
  return t;
}

namespace {

std::array<std::array<std::size_t, 4>, 8> symmetry_images(std::size_t p, std::size_t q, std::size_t r,
                                                          std::size_t s) {
  return {{{p, q, r, s}, {p, q, s, r}, {q, p, r, s}, {q, p, s, r},
           {r, s, p, q}, {r, s, q, p}, {s, r, p, q}, {s, r, q, p}}};
}

}  // namespace

void FermionTensors::set_symmetric(std::size_t p, std::size_t q, std::size_t r, std::size_t s, double value) {
  for (const auto& im : symmetry_images(p, q, r, s)) v(im[0], im[1], im[2], im[3]) = value;
}

Eigen::MatrixXd FermionTensors::pair_matrix() const {
  const auto n2 = static_cast<Eigen::Index>(n_orbitals * n_orbitals);
  Eigen::MatrixXd m(n2, n2);
  for (Eigen::Index a = 0; a < n2; ++a)
    for (Eigen::Index b = 0; b < n2; ++b) m(a, b) = two_body[static_cast<std::size_t>(a * n2 + b)];
  return m;
}

void check_symmetries(const FermionTensors& t, double tol) {
  const std::size_t n = t.n_orbitals;
  if (static_cast<std::size_t>(t.one_body.rows()) != n || static_cast<std::size_t>(t.one_body.cols()) != n)
    throw ConfigError("one-body block has wrong shape");
  if (t.two_body.size() != n * n * n * n) throw ConfigError("two-body block has wrong size");
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      if (std::abs(t.one_body(p, q) - t.one_body(q, p)) > tol)
        throw ConfigError("one-body tensor not symmetric at (" + std::to_string(p) + "," + std::to_string(q) + ")");
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) {
          const double ref = t.v(p, q, r, s);
          for (const auto& im : symmetry_images(p, q, r, s))
            if (std::abs(t.v(im[0], im[1], im[2], im[3]) - ref) > tol)
              throw ConfigError("two-body tensor breaks 8-fold symmetry at (" + std::to_string(p) + "," +
                                std::to_string(q) + "," + std::to_string(r) + "," + std::to_string(s) + ")");
        }
}

std::string format_tensor_text(const FermionTensors& t) {
  check_symmetries(t);
  const std::size_t n = t.n_orbitals;
  std::string out = "pfq-tensors 1\n";
  out += "orbitals " + std::to_string(n) + "\n";
  out += "electrons " + std::to_string(t.n_electrons) + "\n";
  out += "core_energy " + fmt17(t.core_energy) + "\n";
  out += "one_body\n";
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) out += (q ? " " : "") + fmt17(t.one_body(p, q));
    out += "\n";
  }
  std::vector<std::string> rows;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) {
          const double val = t.v(p, q, r, s);
          if (val == 0.0) continue;
          const std::array<std::size_t, 4> me{p, q, r, s};
          bool canonical = true;
          for (const auto& im : symmetry_images(p, q, r, s))
            if (im < me) canonical = false;
          if (!canonical) continue;
          rows.push_back(std::to_string(p) + " " + std::to_string(q) + " " + std::to_string(r) + " " +
                         std::to_string(s) + " " + fmt17(val));
        }
  out += "two_body " + std::to_string(rows.size()) + "\n";
  for (const auto& r : rows) out += r + "\n";
  return out;
}

FermionTensors parse_tensor_text(const std::string& text) {
  const auto lines = tokenize(text);
  std::size_t i = 0;
  auto expect = [&](const char* key, std::size_t ntok) -> const Line& {
    if (i >= lines.size()) throw IoError(std::string("unexpected end of file, expected '") + key + "'");
    const Line& l = lines[i++];
    if (l.tokens.size() != ntok || l.tokens[0] != key) parse_fail(l.number, std::string("expected '") + key + "'");
    return l;
  };
  const Line& tag = expect("pfq-tensors", 2);
  if (tag.tokens[1] != "1") parse_fail(tag.number, "unsupported tensor format version " + tag.tokens[1]);
  const Line& lo = expect("orbitals", 2);
  const std::size_t n = parse_count(lo.tokens[1], lo.number);
  const Line& le = expect("electrons", 2);
  const std::size_t ne = parse_count(le.tokens[1], le.number);
  if (ne > 2 * n) parse_fail(le.number, "more electrons than spin orbitals");
  FermionTensors t = FermionTensors::zeros(n, ne);
  const Line& lc = expect("core_energy", 2);
  t.core_energy = parse_double(lc.tokens[1], lc.number);
  expect("one_body", 1);
  for (std::size_t p = 0; p < n; ++p) {
    if (i >= lines.size()) throw IoError("unexpected end of file in one_body block");
    const Line& l = lines[i++];
    if (l.tokens.size() != n) parse_fail(l.number, "one_body row needs " + std::to_string(n) + " values");
    for (std::size_t q = 0; q < n; ++q) t.one_body(p, q) = parse_double(l.tokens[q], l.number);
  }
  const Line& lt = expect("two_body", 2);
  const std::size_t count = parse_count(lt.tokens[1], lt.number);
  std::set<std::array<std::size_t, 4>> seen;
  for (std::size_t k = 0; k < count; ++k) {
    if (i >= lines.size()) throw IoError("unexpected end of file in two_body block");
    const Line& l = lines[i++];
    if (l.tokens.size() != 5) parse_fail(l.number, "expected 'p q r s value'");
    std::array<std::size_t, 4> idx{};
    for (int j = 0; j < 4; ++j) {
      idx[j] = parse_count(l.tokens[j], l.number);
      if (idx[j] >= n) parse_fail(l.number, "orbital index out of range");
    }
    auto images = symmetry_images(idx[0], idx[1], idx[2], idx[3]);
    std::array<std::size_t, 4> canon = *std::min_element(images.begin(), images.end());
    if (!seen.insert(canon).second) parse_fail(l.number, "duplicate entry for a symmetry class");
    t.set_symmetric(idx[0], idx[1], idx[2], idx[3], parse_double(l.tokens[4], l.number));
  }
  if (i != lines.size()) parse_fail(lines[i].number, "trailing content after two_body block");
  try {
    check_symmetries(t);
  } catch (const ConfigError& e) {
    throw IoError(e.what());
  }
  return t;
}

FermionTensors load_tensor_file(const std::string& path) {
  try {
    return parse_tensor_text(read_file(path));
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

void save_tensor_file(const std::string& path, const FermionTensors& t) { write_file(path, format_tensor_text(t)); }

}  // namespace pfq
