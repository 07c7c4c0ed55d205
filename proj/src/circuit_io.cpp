#include <cstdio>
#include <sstream>

#include "pfq/error.hpp"
#include "pfq/formulas.hpp"

namespace pfq {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw IoError("circuit line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::string serialize_circuit(const SampledCircuit& c) {
  std::ostringstream out;
  out << "pfq-circuit 1\n";
  out << "qubits " << c.n_qubits << "\n";
  out << "seed " << c.seed << "\n";
  out << "normalization " << num(c.normalization) << "\n";
  out << "phase " << num(c.phase.real()) << " " << num(c.phase.imag()) << "\n";
  out << "gates " << c.gates.size() << "\n";
  for (const auto& g : c.gates) {
    switch (g.kind) {
      case GateKind::Rotation:
        out << "R " << g.pauli.str() << " " << num(g.angle) << "\n";
        break;
      case GateKind::Pauli:
        out << "P " << g.pauli.str() << "\n";
        break;
      case GateKind::Exp:
        out << "E " << g.pauli.str() << " " << num(g.angle) << " " << g.term << " " << num(g.fraction) << "\n";
        break;
    }
  }
  return out.str();
}

SampledCircuit parse_circuit(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t ln = 0;
  auto next = [&](const char* what) {
    while (std::getline(in, line)) {
      ++ln;
      if (!line.empty() && line[0] != '#') return;
    }
    fail(ln, std::string("unexpected end of input, expected ") + what);
  };
  auto keyed = [&](const char* key) {
    next(key);
    std::istringstream ls(line);
    std::string k;
    ls >> k;
    if (k != key) fail(ln, std::string("expected '") + key + "'");
    return ls.str().substr(k.size());
  };

  next("header");
  if (line != "pfq-circuit 1") fail(ln, "missing 'pfq-circuit 1' header");
  SampledCircuit c;
  std::size_t count = 0;
  double re = 0, im = 0;
  if (!(std::istringstream(keyed("qubits")) >> c.n_qubits)) fail(ln, "bad qubit count");
  if (!(std::istringstream(keyed("seed")) >> c.seed)) fail(ln, "bad seed");
  if (!(std::istringstream(keyed("normalization")) >> c.normalization)) fail(ln, "bad normalization");
  {
    std::istringstream ls(keyed("phase"));
    if (!(ls >> re >> im)) fail(ln, "bad phase");
    c.phase = {re, im};
  }
  if (!(std::istringstream(keyed("gates")) >> count)) fail(ln, "bad gate count");
  c.gates.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    next("gate");
    std::istringstream ls(line);
    std::string kind, pauli;
    Gate g;
    if (!(ls >> kind >> pauli)) fail(ln, "malformed gate");
    try {
      g.pauli = PauliString::parse(pauli);
    } catch (const Error& e) {
      fail(ln, e.what());
    }
    if (g.pauli.n_qubits() != c.n_qubits) fail(ln, "gate acts on the wrong number of qubits");
    if (kind == "R") {
      g.kind = GateKind::Rotation;
      if (!(ls >> g.angle)) fail(ln, "rotation needs an angle");
    } else if (kind == "P") {
      g.kind = GateKind::Pauli;
    } else if (kind == "E") {
      g.kind = GateKind::Exp;
      if (!(ls >> g.angle >> g.term >> g.fraction)) fail(ln, "exp gate needs angle, term and fraction");
    } else {
      fail(ln, "unknown gate kind '" + kind + "'");
    }
    std::string extra;
    if (ls >> extra) fail(ln, "trailing content");
    c.gates.push_back(std::move(g));
  }
  while (std::getline(in, line)) {
    ++ln;
    if (!line.empty() && line[0] != '#' && line.find_first_not_of(" \t\r") != std::string::npos) fail(ln, "content after the last gate");
  }
  return c;
}

}  // namespace pfq
