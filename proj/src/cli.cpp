#include "pfq/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "pfq/error.hpp"
#include "pfq/estimation.hpp"
#include "pfq/hamiltonian.hpp"
#include "pfq/parallel.hpp"
#include "pfq/resources.hpp"
#include "pfq/rng.hpp"
#include "pfq/simulator.hpp"
#include "pfq/trotter_fit.hpp"

namespace pfq {

// ---- Tables ----------------------------------------------------------------

const std::string& Table::cell(std::size_t row, const std::string& column) const {
  const auto it = std::find(columns.begin(), columns.end(), column);
  if (it == columns.end()) throw ConfigError("no column " + column);
  return rows.at(row).at(static_cast<std::size_t>(it - columns.begin()));
}

std::string Table::summary_value(const std::string& key) const {
  for (const auto& [k, v] : summary)
    if (k == key) return v;
  throw ConfigError("no summary entry " + key);
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num(std::size_t v) { return std::to_string(v); }

// Cells and summary values never carry separators.
std::string clean(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::pair<std::string, std::string> split_kv(const std::string& line) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) throw IoError("expected key=value, got '" + line + "'");
  return {line.substr(0, eq), line.substr(eq + 1)};
}

}  // namespace

std::string write_table(const Table& t, OutputFormat format) {
  std::ostringstream out;
  for (const auto& h : t.header) out << "# " << h << "\n";
  if (format == OutputFormat::Csv) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << "\n";
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
      out << "\n";
    }
    for (const auto& [k, v] : t.summary) out << "# summary " << k << "=" << v << "\n";
  } else {
    for (const auto& row : t.rows) {
      out << "\n";
      for (std::size_t i = 0; i < row.size(); ++i) out << t.columns[i] << "=" << row[i] << "\n";
    }
    if (!t.summary.empty()) {
      out << "\n";
      for (const auto& [k, v] : t.summary) out << "summary." << k << "=" << v << "\n";
    }
  }
  return out.str();
}

Table parse_table(const std::string& text, OutputFormat format) {
  Table t;
  std::istringstream in(text);
  std::string line;
  if (format == OutputFormat::Csv) {
    bool have_columns = false;
    while (std::getline(in, line)) {
      if (line.rfind("# summary ", 0) == 0) {
        t.summary.push_back(split_kv(line.substr(10)));
      } else if (line.rfind("# ", 0) == 0) {
        t.header.push_back(line.substr(2));
      } else if (line.empty()) {
        continue;
      } else if (!have_columns) {
        t.columns = split(line, ',');
        have_columns = true;
      } else {
        auto row = split(line, ',');
        if (row.size() != t.columns.size()) throw IoError("row has " + std::to_string(row.size()) + " cells, expected " + std::to_string(t.columns.size()));
        t.rows.push_back(std::move(row));
      }
    }
    return t;
  }
  std::vector<std::pair<std::string, std::string>> block;
  auto flush = [&] {
    if (block.empty()) return;
    if (block.front().first.rfind("summary.", 0) == 0) {
      for (auto& [k, v] : block) t.summary.emplace_back(k.substr(8), v);
    } else {
      if (t.columns.empty())
        for (auto& kv : block) t.columns.push_back(kv.first);
      if (block.size() != t.columns.size()) throw IoError("record block has the wrong number of fields");
      std::vector<std::string> row;
      for (std::size_t i = 0; i < block.size(); ++i) {
        if (block[i].first != t.columns[i]) throw IoError("record field " + block[i].first + " out of order");
        row.push_back(block[i].second);
      }
      t.rows.push_back(std::move(row));
    }
    block.clear();
  };
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      t.header.push_back(line.substr(2));
    } else if (line.empty()) {
      flush();
    } else {
      block.push_back(split_kv(line));
    }
  }
  flush();
  return t;
}

std::string config_hash(const std::string& resolved) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : resolved) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---- Commands ----------------------------------------------------------------

namespace {

struct Common {
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string format = "csv";
  std::string output;
  std::size_t dense_limit = 14;
};

struct Source {
  std::string pauli;
  std::string tensors;
  std::size_t chain_atoms = 0;
  double spacing = 1.4;
  std::string basis = "canonical";
};

OrbitalBasis parse_basis(const std::string& s) {
  if (s == "canonical") return OrbitalBasis::Canonical;
  if (s == "localized") return OrbitalBasis::Localized;
  throw ConfigError("unknown orbital basis '" + s + "'");
}

FermionTensors load_tensors(const Source& s) {
  if (!s.tensors.empty()) return load_tensor_file(s.tensors);
  return synthetic_chain(s.chain_atoms, s.spacing, parse_basis(s.basis));
}

PauliHamiltonian to_pauli(const QubitHamiltonian& q) {
  PauliHamiltonian h(q.paulis.n_qubits());
  if (q.constant != 0.0) h.add_term(q.constant, std::string(q.paulis.n_qubits(), 'I'));
  for (const auto& t : q.paulis.terms()) h.add_term(t.coeff, t.pauli);
  return h;
}

PauliHamiltonian load_hamiltonian(const Source& s) {
  const int given = !s.pauli.empty() + !s.tensors.empty() + (s.chain_atoms > 0);
  if (given != 1) throw ConfigError("give exactly one of --pauli, --tensors, --synthetic-chain");
  if (!s.pauli.empty()) return load_pauli_file(s.pauli);
  return to_pauli(majorana_pauli_decompose(load_tensors(s)));
}

// Identity terms split off as an energy offset.
std::pair<PauliHamiltonian, double> strip_identity(const PauliHamiltonian& h) {
  PauliHamiltonian rest(h.n_qubits());
  double offset = 0.0;
  for (const auto& t : h.terms()) {
    if (t.pauli.is_identity())
      offset += t.coeff * t.pauli.sign();
    else
      rest.add_term(t.coeff, t.pauli);
  }
  return {rest, offset};
}

void add_source_options(CLI::App* sub, Source& s) {
  sub->add_option("--pauli", s.pauli, "Pauli Hamiltonian file");
  sub->add_option("--tensors", s.tensors, "fermionic tensor file");
  sub->add_option("--synthetic-chain", s.chain_atoms, "build the synthetic chain with this many atoms");
  sub->add_option("--spacing", s.spacing, "synthetic chain spacing");
  sub->add_option("--basis", s.basis, "synthetic chain orbitals: canonical or localized");
}

void add_common_options(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "root seed");
  sub->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--format", c.format, "csv or records");
  sub->add_option("--output", c.output, "output path (stdout when empty)");
  sub->add_option("--dense-limit", c.dense_limit, "largest qubit count for dense simulation");
}

std::vector<std::pair<double, std::size_t>> by_weight(const PauliHamiltonian& h) {
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < h.size(); ++i) order.emplace_back(std::abs(h[i].coeff), i);
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  return order;
}

// ---- ingest

struct IngestOptions {
  Source source;
  std::string save;
  std::string save_tensors;
  std::string factors;
  double df_tol = 1e-10;
  bool optimize = false;
  bool optimize_shift = false;
  int max_iterations = 200;
};

Table cmd_ingest(const IngestOptions& o, const Common& c, std::ostream& err) {
  Table t;
  PauliHamiltonian h;
  const bool fermionic = o.source.pauli.empty();
  if (!fermionic && (o.optimize || !o.factors.empty() || !o.save_tensors.empty()))
    throw ConfigError("tensor transforms need a tensor input");
  if (fermionic) {
    const int given = !o.source.tensors.empty() + (o.source.chain_atoms > 0);
    if (given != 1) throw ConfigError("give exactly one of --pauli, --tensors, --synthetic-chain");
    FermionTensors tensors = load_tensors(o.source);
    if (o.optimize) {
      LambdaOptConfig cfg;
      cfg.max_iterations = o.max_iterations;
      cfg.optimize_shift = o.optimize_shift;
      cfg.seed = c.seed;
      const double before = pauli_weight(tensors);
      LambdaOptResult r = optimize_lambda(tensors, cfg);
      tensors = r.tensors;
      t.summary.emplace_back("lambda_before", num(before));
      t.summary.emplace_back("lambda_after", num(pauli_weight(tensors)));
      t.summary.emplace_back("optimizer_steps", num(r.history.size()));
      err << "lambda " << before << " -> " << pauli_weight(tensors) << "\n";
    }
    if (!o.factors.empty()) {
      const FactorizedHamiltonian f = double_factorize(tensors, o.df_tol);
      Table ft;
      ft.header = {"command=ingest", "table=factors", "n_orbitals=" + num(f.n_orbitals)};
      ft.columns = {"factor", "index", "eigenvalue", "pair_weight"};
      for (std::size_t j = 0; j < f.factors.size(); ++j)
        for (Eigen::Index k = 0; k < f.factors[j].eigenvalues.size(); ++k)
          ft.rows.push_back({num(j), num(static_cast<std::size_t>(k)), num(f.factors[j].eigenvalues(k)), num(f.factors[j].weight)});
      ft.summary = {{"rank", num(f.rank())}, {"dropped_weight", num(f.dropped_weight)}};
      std::ofstream fo(o.factors);
      if (!fo) throw IoError("cannot write " + o.factors);
      fo << write_table(ft, OutputFormat::Csv);
      t.summary.emplace_back("factor_rank", num(f.rank()));
    }
    if (!o.save_tensors.empty()) save_tensor_file(o.save_tensors, tensors);
    h = to_pauli(majorana_pauli_decompose(tensors));
  } else {
    h = load_hamiltonian(o.source);
  }
  if (!o.save.empty()) save_pauli_file(o.save, h);

  const auto [rest, constant] = strip_identity(h);
  t.columns = {"rank", "coeff", "abs_coeff", "support", "pauli"};
  std::map<std::size_t, std::size_t> hist;
  double lambda = 0;
  std::size_t rank = 0;
  for (const auto& [w, i] : by_weight(rest)) {
    const auto& term = rest[i];
    lambda += w;
    ++hist[term.pauli.support()];
    t.rows.push_back({num(rank++), num(term.coeff), num(w), num(term.pauli.support()), term.pauli.str()});
  }
  std::string hs;
  for (const auto& [k, v] : hist) hs += (hs.empty() ? "" : ";") + std::to_string(k) + ":" + std::to_string(v);
  t.summary.insert(t.summary.begin(), {{"n_qubits", num(h.n_qubits())},
                                       {"n_terms", num(rest.size())},
                                       {"lambda", num(lambda)},
                                       {"constant", num(constant)},
                                       {"support_histogram", hs}});
  return t;
}

// ---- rpe

struct RpeOptions {
  Source source;
  std::string method = "qdrift";
  double epsilon = 0.0;
  double epsilon_rel = 5e-3;
  double xi = 1.0;
  int rounds = -1;
  std::size_t seeds = 10;
  std::string state = "ground";
  bool statevector = false;
  int n_max = 8;
  int order = 2;
  double delta = 0.0;
  double kappa = 2.0;
  std::size_t deterministic_terms = 0;
};

Table cmd_rpe(const RpeOptions& o, const Common& c) {
  const PauliHamiltonian h = load_hamiltonian(o.source);
  check_dense(h.n_qubits());
  const GroundState gs = ground_state(h);
  StateVector psi = gs.state;
  if (o.state != "ground") {
    if (o.state.rfind("basis:", 0) != 0) throw ConfigError("state must be 'ground' or 'basis:<index>'");
    const std::uint64_t k = std::stoull(o.state.substr(6));
    if (k >> h.n_qubits()) throw ConfigError("basis index out of range");
    psi = StateVector::basis(h.n_qubits(), k);
  }
  const double lambda = weight_lambda(strip_identity(h).first);
  if (!(lambda > 0)) throw NumericError("Hamiltonian has no non-identity terms");
  const double eps = o.epsilon > 0 ? o.epsilon : o.epsilon_rel * lambda;
  if (!(eps > 0)) throw ConfigError("epsilon must be positive");
  const Method method = parse_method(o.method);
  if (method == Method::Partial && !(o.delta > 0)) throw ConfigError("partial randomization needs --delta");
  // For the partial formula the phase per repetition is δ·E, so the target shrinks by δ.
  RPEConfig cfg = rpe_config_for(eps / lambda * (method == Method::Partial ? o.delta : 1.0), o.xi, method);
  if (o.rounds >= 0) {
    cfg.rounds = o.rounds;
    cfg.last_multiplier = 0;
  }
  cfg.statevector = o.statevector;
  cfg.n_max = o.n_max;
  cfg.order = o.order;
  cfg.delta = o.delta;
  cfg.kappa = o.kappa;
  cfg.deterministic_terms = o.deterministic_terms;

  std::vector<RPEResult> results(o.seeds);
  std::vector<std::uint64_t> seeds(o.seeds);
  parallel_for(o.seeds, [&](std::size_t i) {
    RPEConfig local = cfg;
    local.seed = seeds[i] = derive_seed(c.seed, i);
    results[i] = rpe_run(h, psi, local);
  });

  Table t;
  t.columns = {"index", "seed", "estimate", "error", "r_tot", "r_max", "t_tot", "circuits"};
  double sq = 0;
  std::size_t within = 0;
  for (std::size_t i = 0; i < o.seeds; ++i) {
    const auto& r = results[i];
    const double e = r.estimate - gs.energy;
    sq += e * e;
    within += std::abs(e) <= eps;
    t.rows.push_back({num(i), std::to_string(seeds[i]), num(r.estimate), num(e), num(r.r_tot), num(r.r_max), num(r.t_tot), num(r.circuits)});
  }
  t.summary = {{"method", method_name(method)},
               {"ground_energy", num(gs.energy)},
               {"lambda", num(lambda)},
               {"epsilon", num(eps)},
               {"rounds", num(static_cast<std::size_t>(cfg.rounds))},
               {"last_multiplier", num(results.empty() ? 0.0 : results.front().rounds.back().multiplier)},
               {"rmse", num(o.seeds ? std::sqrt(sq / static_cast<double>(o.seeds)) : 0.0)},
               {"fraction_within_epsilon", num(o.seeds ? static_cast<double>(within) / static_cast<double>(o.seeds) : 0.0)}};
  return t;
}

// ---- trotter-fit

struct FitOptions {
  Source source;
  std::vector<int> orders{1, 2};
  std::vector<double> grid;  // lo, hi, points per decade
  std::vector<std::size_t> partial_ld;
};

Table cmd_trotter_fit(const FitOptions& o) {
  const PauliHamiltonian h = strip_identity(load_hamiltonian(o.source)).first;
  check_dense(h.n_qubits());
  const double lambda = weight_lambda(h);
  if (!(lambda > 0)) throw NumericError("Hamiltonian has no non-identity terms");
  std::vector<double> deltas;
  if (o.grid.empty())
    deltas = default_delta_grid(lambda);
  else if (o.grid.size() == 3)
    deltas = log_grid(o.grid[0], o.grid[1], static_cast<int>(o.grid[2]));
  else
    throw ConfigError("--grid takes lo,hi,points_per_decade");

  Table t;
  t.columns = {"order", "delta", "gs_error", "op_error"};
  const double floor = 1e-11 * std::max(lambda, 1.0);
  for (int p : o.orders) {
    const ErrorCurve curve = measure_error_curve(h, p, deltas);
    for (std::size_t i = 0; i < deltas.size(); ++i)
      t.rows.push_back({std::to_string(p), num(deltas[i]), num(curve.gs_errors[i]), num(curve.op_errors[i])});
    const std::string key = "order" + std::to_string(p) + ".";
    const PowerLawFit op = fit_power_law_above(deltas, curve.op_errors, floor);
    t.summary.emplace_back(key + "op_exponent", num(op.exponent));
    t.summary.emplace_back(key + "op_constant", num(op.constant));
    t.summary.emplace_back(key + "op_r_squared", num(op.r_squared));
    try {
      const PowerLawFit gs = fit_power_law_above(deltas, curve.gs_errors, floor);
      t.summary.emplace_back(key + "gs_exponent", num(gs.exponent));
      t.summary.emplace_back(key + "gs_r_squared", num(gs.r_squared));
      t.summary.emplace_back(key + "c_gs", num(fit_constant(deltas, curve.gs_errors, std::max(p, 2))));
    } catch (const ConfigError&) {
      // Fewer than three measurable points: the formula is exact to rounding here.
      t.summary.emplace_back(key + "c_gs", num(0.0));
    }
  }
  if (!o.partial_ld.empty()) {
    const int p = o.orders.empty() ? 2 : o.orders.front();
    for (const auto& pt : partial_error_sweep(h, p, o.partial_ld, deltas)) {
      const std::string key = "partial.l_d" + std::to_string(pt.l_d) + ".";
      t.summary.emplace_back(key + "randomized_fraction", num(pt.randomized_fraction));
      t.summary.emplace_back(key + "c_gs", num(pt.c_gs));
    }
  }
  t.summary.emplace_back("lambda", num(lambda));
  t.summary.emplace_back("n_terms", num(h.size()));
  return t;
}

// ---- resources

struct ResourceOptions {
  Source source;
  std::vector<std::string> methods{"deterministic", "qdrift", "rte", "partial"};
  double lambda = 0.0;
  std::size_t n_terms = 0;
  double c_gs = 0.0;
  double epsilon = 1.5e-3;
  double epsilon_synth = 1e-4;
  double xi = 1.0;
  int order = 2;
  std::string metric = "toffoli";
  int hwp_group = 10;
  double mean_support = 0.0;
  std::size_t n_qubits = 0;
  std::size_t l_d = 0;
  double lambda_r = -1.0;
  double g_det = 0.0;
  double g_rand = 0.0;
  double delta = 0.0;
  std::string constants = "fixed";
  bool sweep = false;
};

double mean_two_qubit(const PauliHamiltonian& h, const std::vector<std::pair<double, std::size_t>>& order,
                      std::size_t from, std::size_t to, bool weighted) {
  double s = 0, w = 0;
  for (std::size_t k = from; k < to; ++k) {
    const double weight = weighted ? order[k].first : 1.0;
    s += weight * std::max(2.0 * static_cast<double>(h[order[k].second].pauli.support()) - 3.0, 0.0);
    w += weight;
  }
  return w > 0 ? s / w : 0.0;
}

std::vector<std::pair<std::string, ResourceReport>> resource_rows(const ResourceOptions& o, Table& t) {
  const bool have_h = !o.source.pauli.empty() || !o.source.tensors.empty() || o.source.chain_atoms > 0;
  PauliHamiltonian h;
  CostModelInputs in;
  in.epsilon = o.epsilon;
  in.epsilon_synth = o.epsilon_synth;
  in.xi = o.xi;
  in.order = o.order;
  in.hwp_group = o.hwp_group;
  if (o.metric == "toffoli")
    in.metric = GateMetric::Toffoli;
  else if (o.metric == "two-qubit")
    in.metric = GateMetric::TwoQubit;
  else
    throw ConfigError("metric must be toffoli or two-qubit");
  std::vector<std::pair<double, std::size_t>> order;
  if (have_h) {
    h = strip_identity(load_hamiltonian(o.source)).first;
    order = by_weight(h);
    in.lambda = weight_lambda(h);
    in.n_terms = h.size();
    in.n_qubits = h.n_qubits();
    in.mean_support = 0;
    for (const auto& term : h.terms()) in.mean_support += static_cast<double>(term.pauli.support());
    in.mean_support /= std::max<std::size_t>(h.size(), 1);
  }
  if (o.lambda > 0) in.lambda = o.lambda;
  if (o.n_terms > 0) in.n_terms = o.n_terms;
  if (o.mean_support > 0) in.mean_support = o.mean_support;
  if (o.n_qubits > 0) in.n_qubits = o.n_qubits;
  if (!(in.lambda > 0)) throw ConfigError("resources need --lambda or a Hamiltonian");
  in.c_gs = o.c_gs;
  std::string c_source = "given";
  const bool needs_c = std::any_of(o.methods.begin(), o.methods.end(), [](const std::string& m) { return m == "deterministic" || m == "partial"; });
  if (needs_c && !(in.c_gs > 0) && have_h && h.n_qubits() <= dense_limit()) {
    in.c_gs = partial_error_sweep(h, o.order, {h.size()}, default_delta_grid(in.lambda)).front().c_gs;
    c_source = "fitted";
  }
  t.summary.emplace_back("c_gs", num(in.c_gs));
  t.summary.emplace_back("c_gs_source", in.c_gs > 0 ? c_source : "missing");
  t.summary.emplace_back("lambda", num(in.lambda));
  t.summary.emplace_back("n_terms", num(in.n_terms));

  const PartialConstants constants = o.constants == "fixed" ? PartialConstants{} : o.constants == "schedule"
                                                                                      ? schedule_partial_constants()
                                                                                      : throw ConfigError("constants must be fixed or schedule");
  const int j_bits = std::max(2, static_cast<int>(std::ceil(std::log2(in.lambda / (std::numbers::pi * o.epsilon)))));
  const double n_stage = static_cast<double>(stage_count(o.order));

  auto g_det_for = [&](std::size_t l_d) {
    if (o.g_det > 0) return o.g_det;
    if (in.metric == GateMetric::TwoQubit)
      return have_h ? mean_two_qubit(h, order, 0, l_d, false) : std::max(2 * in.mean_support - 3, 0.0);
    if (!(in.c_gs > 0)) throw ConfigError("Toffoli counts of deterministic steps need C_gs");
    const double delta = optimal_error_split(o.epsilon, in.c_gs, o.order).delta;
    return synthesis_toffoli_count(o.epsilon_synth * delta / (n_stage * static_cast<double>(std::max<std::size_t>(l_d, 1))));
  };
  auto g_rand_for = [&](std::size_t l_d) {
    if (o.g_rand > 0) return o.g_rand;
    if (in.metric == GateMetric::TwoQubit)
      return have_h ? mean_two_qubit(h, order, l_d, h.size(), true) : std::max(2 * in.mean_support - 3, 0.0);
    return hwp_rate(o.hwp_group, j_bits).rate();
  };
  auto lambda_r_for = [&](std::size_t l_d) {
    if (o.lambda_r >= 0 && !o.sweep) return o.lambda_r;
    if (!have_h) throw ConfigError("partial randomization needs --lambda-r or a Hamiltonian");
    double s = 0;
    for (std::size_t k = l_d; k < order.size(); ++k) s += order[k].first;
    return s;
  };

  std::vector<std::pair<std::string, ResourceReport>> rows;
  auto guarded = [&](const std::string& name, std::size_t l_d, const std::function<ResourceReport()>& f) {
    ResourceReport r;
    try {
      r = f();
    } catch (const Error& e) {
      r = ResourceReport{};
      r.method = name;
      r.feasible = false;
      r.note = e.what();
    }
    r.params["L_D"] = static_cast<double>(l_d);
    rows.emplace_back(name, std::move(r));
  };
  for (const auto& m : o.methods) {
    if (m == "deterministic") {
      guarded(m, in.n_terms, [&] {
        CostModelInputs d = in;
        d.g_det = o.g_det;
        if (!(d.c_gs > 0)) throw ConfigError("deterministic cost needs C_gs");
        if (d.metric == GateMetric::TwoQubit && have_h) d.g_det = g_det_for(in.n_terms);
        return deterministic_cost(d);
      });
    } else if (m == "qdrift" || m == "rte") {
      guarded(m, 0, [&] {
        ResourceReport r = randomized_cost(in.lambda, o.epsilon, o.xi, m == "rte" ? RandomizedMethod::Rte : RandomizedMethod::Qdrift,
                                           o.hwp_group, in.mean_support, in.n_qubits);
        if (in.metric == GateMetric::TwoQubit) {
          const double g = g_rand_for(0);
          r.two_qubit_total = r.rotations_total * g;
          r.gates_total = r.two_qubit_total;
          r.gates_max_per_circuit = r.rotations_max * g;
        }
        return r;
      });
    } else if (m == "partial") {
      if (o.sweep) {
        if (!have_h) throw ConfigError("--sweep-ld needs a Hamiltonian");
        for (std::size_t l_d = 0; l_d <= h.size(); ++l_d)
          guarded(m, l_d, [&] {
            CostModelInputs p = in;
            p.l_d = l_d;
            p.lambda_r = lambda_r_for(l_d);
            return partial_cost(p, g_det_for(l_d), g_rand_for(l_d), o.delta, constants);
          });
      } else {
        guarded(m, o.l_d, [&] {
          CostModelInputs p = in;
          p.l_d = o.l_d;
          p.lambda_r = lambda_r_for(o.l_d);
          return partial_cost(p, g_det_for(o.l_d), g_rand_for(o.l_d), o.delta, constants);
        });
      }
    } else {
      throw ConfigError("unknown method '" + m + "'");
    }
  }
  return rows;
}

Table cmd_resources(const ResourceOptions& o) {
  Table t;
  const auto rows = resource_rows(o, t);
  std::set<std::string> keys;
  for (const auto& [name, r] : rows)
    for (const auto& [k, v] : r.params) keys.insert(k);
  t.columns = {"method", "feasible", "gates_total", "gates_max_per_circuit", "toffoli_total", "toffoli_max_per_circuit",
               "two_qubit_total", "rotations_total", "rotations_max", "circuits", "logical_qubits", "ancilla_qubits", "note"};
  for (const auto& k : keys) t.columns.push_back("param." + k);
  std::size_t feasible = 0;
  double best = std::numeric_limits<double>::infinity();
  std::string best_label;
  for (const auto& [name, r] : rows) {
    std::vector<std::string> row = {name, r.feasible ? "1" : "0", num(r.gates_total), num(r.gates_max_per_circuit),
                                    num(r.toffoli_total), num(r.toffoli_max_per_circuit), num(r.two_qubit_total),
                                    num(r.rotations_total), num(r.rotations_max), num(r.circuits), num(r.logical_qubits),
                                    num(r.ancilla_qubits), clean(r.note)};
    for (const auto& k : keys) {
      const auto it = r.params.find(k);
      row.push_back(it == r.params.end() ? "" : num(it->second));
    }
    t.rows.push_back(std::move(row));
    if (r.feasible) {
      ++feasible;
      if (r.gates_total < best) {
        best = r.gates_total;
        best_label = name + ":L_D=" + num(r.params.at("L_D"));
      }
    }
  }
  if (feasible == 0 && !rows.empty()) throw NumericError("no method is feasible: " + rows.front().second.note);
  t.summary.emplace_back("best", best_label);
  t.summary.emplace_back("best_gates_total", num(best));
  return t;
}

// ---- Driver

std::vector<std::string> expand_config_file(const std::vector<std::string>& args, std::string& path) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config needs a path");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (path.empty()) return out;
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path);
  std::string line;
  std::size_t no = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  // Entries replace any command-line occurrence of the same option.
  std::vector<std::string> entries, keys;
  while (std::getline(in, line)) {
    ++no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    std::replace(key.begin(), key.end(), '_', '-');
    keys.push_back("--" + key);
    entries.push_back("--" + key + "=" + value);
  }
  auto overridden = [&](const std::string& a) {
    return std::any_of(keys.begin(), keys.end(), [&](const std::string& k) { return a == k || a.rfind(k + "=", 0) == 0; });
  };
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!overridden(out[i])) {
      kept.push_back(out[i]);
      continue;
    }
    // A separate value token belongs to the dropped option.
    if (out[i].find('=') == std::string::npos && i + 1 < out.size() && out[i + 1].rfind("-", 0) != 0) ++i;
  }
  kept.insert(kept.end(), entries.begin(), entries.end());
  return kept;
}

std::string resolved_config(const CLI::App* sub) {
  std::string out;
  std::istringstream in(sub->config_to_str(true, false));
  std::string line;
  while (std::getline(in, line)) {
    // Paths of outputs and the worker count never change results.
    if (line.empty() || line.rfind("output=", 0) == 0 || line.rfind("threads=", 0) == 0) continue;
    out += line + "\n";
  }
  return out;
}

int run(const std::vector<std::string>& raw, std::ostream& out, std::ostream& err) {
  std::string config_path;
  const std::vector<std::string> args = expand_config_file(raw, config_path);

  CLI::App app{"Product-formula phase estimation toolkit"};
  app.name(args.empty() ? "pfq" : args.front());
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();

  Common common;
  IngestOptions ing;
  RpeOptions rpe;
  FitOptions fit;
  ResourceOptions res;

  CLI::App* s_ing = app.add_subcommand("ingest", "load, transform and summarize a Hamiltonian");
  add_common_options(s_ing, common);
  add_source_options(s_ing, ing.source);
  s_ing->add_option("--save", ing.save, "write the qubit Hamiltonian as a Pauli file");
  s_ing->add_option("--save-tensors", ing.save_tensors, "write the (transformed) tensors");
  s_ing->add_option("--double-factorize", ing.factors, "write factor eigenvalues as CSV to this path");
  s_ing->add_option("--df-tol", ing.df_tol, "first-factorization truncation");
  s_ing->add_flag("--optimize-lambda", ing.optimize, "reduce λ by orbital rotation");
  s_ing->add_flag("--optimize-shift", ing.optimize_shift, "also optimize symmetry shifts");
  s_ing->add_option("--max-iterations", ing.max_iterations, "optimizer step budget");

  CLI::App* s_rpe = app.add_subcommand("rpe", "robust phase estimation over many seeds");
  add_common_options(s_rpe, common);
  add_source_options(s_rpe, rpe.source);
  s_rpe->add_option("--method", rpe.method, "exact, qdrift, rte or partial");
  s_rpe->add_option("--epsilon", rpe.epsilon, "target error in Hamiltonian units");
  s_rpe->add_option("--epsilon-rel", rpe.epsilon_rel, "target error as a fraction of λ (when --epsilon is 0)");
  s_rpe->add_option("--xi", rpe.xi, "ground-state overlap bound ξ");
  s_rpe->add_option("--rounds", rpe.rounds, "override the round count M");
  s_rpe->add_option("--seeds", rpe.seeds, "independent runs");
  s_rpe->add_option("--state", rpe.state, "ground or basis:<index>");
  s_rpe->add_flag("--statevector", rpe.statevector, "sample circuits instead of exact expectations");
  s_rpe->add_option("--n-max", rpe.n_max, "RTE truncation order");
  s_rpe->add_option("--order", rpe.order, "product-formula order for partial randomization");
  s_rpe->add_option("--delta", rpe.delta, "partial step in normalized units");
  s_rpe->add_option("--kappa", rpe.kappa, "partial randomization κ");
  s_rpe->add_option("--deterministic-terms", rpe.deterministic_terms, "L_D");

  CLI::App* s_fit = app.add_subcommand("trotter-fit", "measure and fit product-formula errors");
  add_common_options(s_fit, common);
  add_source_options(s_fit, fit.source);
  s_fit->add_option("--order", fit.orders, "orders to measure")->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  s_fit->add_option("--grid", fit.grid, "lo,hi,points_per_decade")->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  s_fit->add_option("--partial-ld", fit.partial_ld, "L_D values for the partial C_gs sweep")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);

  CLI::App* s_res = app.add_subcommand("resources", "gate-count reports");
  add_common_options(s_res, common);
  add_source_options(s_res, res.source);
  s_res->add_option("--methods", res.methods, "deterministic,qdrift,rte,partial")->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  s_res->add_option("--lambda", res.lambda, "Pauli weight λ");
  s_res->add_option("--n-terms", res.n_terms, "term count L");
  s_res->add_option("--c-gs", res.c_gs, "ground-state Trotter constant (fitted when a small Hamiltonian is given)");
  s_res->add_option("--epsilon", res.epsilon, "phase-estimation plus Trotter error budget");
  s_res->add_option("--epsilon-synth", res.epsilon_synth, "rotation synthesis budget");
  s_res->add_option("--xi", res.xi, "ground-state overlap bound ξ");
  s_res->add_option("--order", res.order, "product-formula order");
  s_res->add_option("--metric", res.metric, "toffoli or two-qubit");
  s_res->add_option("--hwp-group", res.hwp_group, "Hamming-weight phasing group size K");
  s_res->add_option("--mean-support", res.mean_support, "average Pauli support");
  s_res->add_option("--n-qubits", res.n_qubits, "system qubits");
  s_res->add_option("--l-d", res.l_d, "deterministic terms L_D");
  s_res->add_option("--lambda-r", res.lambda_r, "randomized weight λ_R");
  s_res->add_option("--g-det", res.g_det, "gates per deterministic exponential (0 derives it)");
  s_res->add_option("--g-rand", res.g_rand, "gates per randomized rotation (0 derives it)");
  s_res->add_option("--delta", res.delta, "fixed partial step (0 optimizes)");
  s_res->add_option("--constants", res.constants, "fixed or schedule cost constants");
  s_res->add_flag("--sweep-ld", res.sweep, "one partial row per L_D");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  OutputFormat format;
  if (common.format == "csv")
    format = OutputFormat::Csv;
  else if (common.format == "records")
    format = OutputFormat::Records;
  else
    throw ConfigError("format must be csv or records");
  set_thread_count(common.threads);
  set_dense_limit(common.dense_limit);

  CLI::App* sub = app.get_subcommands().front();
  Table t;
  if (sub == s_ing)
    t = cmd_ingest(ing, common, err);
  else if (sub == s_rpe)
    t = cmd_rpe(rpe, common);
  else if (sub == s_fit)
    t = cmd_trotter_fit(fit);
  else
    t = cmd_resources(res);

  const std::string resolved = resolved_config(sub);
  std::vector<std::string> header = {"command=" + sub->get_name(), "seed=" + std::to_string(common.seed),
                                     "config_hash=" + config_hash(resolved)};
  if (!config_path.empty()) header.push_back("config_file=" + config_path);
  std::istringstream lines(resolved);
  std::string line;
  while (std::getline(lines, line)) header.push_back("config." + line);
  t.header.insert(t.header.begin(), header.begin(), header.end());

  const std::string text = write_table(t, format);
  if (common.output.empty()) {
    out << text;
  } else {
    std::ofstream f(common.output);
    if (!f) throw IoError("cannot write " + common.output);
    f << text;
    if (!f) throw IoError("write failed for " + common.output);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return run(args, out, err);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

int run_cli(int argc, char** argv) {
  return run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

}  // namespace pfq
