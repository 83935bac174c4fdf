// gascap: formulate, estimate, solve and verify-appendix.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gascap/cap_model.hpp"
#include "gascap/circuit.hpp"
#include "gascap/errors.hpp"
#include "gascap/formulation.hpp"
#include "gascap/gas.hpp"
#include "gascap/polynomial.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;
using namespace gascap;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitGolden = 2;
constexpr int kExitCap = 3;

struct Options {
  std::string instance;
  std::string synthetic;
  std::string seed;
  std::vector<std::string> formulations;
  double penalty = 1.0;
  std::optional<double> alpha;
  std::string backend = "ideal";
  std::optional<std::int64_t> budget_classical;
  std::optional<std::int64_t> budget_quantum;
  int runs = 100;
  unsigned workers = 0;
  bool oracle_calls = false;
  std::string out = "gascap_out";
  int ap_min = 4;
  int ap_max = 128;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::uint64_t parse_u64(const std::string& s, const char* what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw ValidationError(std::string(what) + " must be a non-negative integer: '" + s + "'");
  }
  try {
    return std::stoull(s);
  } catch (const std::out_of_range&) {
    throw ValidationError(std::string(what) + " out of range: '" + s + "'");
  }
}

std::uint64_t resolve_seed(const Options& o) {
  if (!o.seed.empty()) return parse_u64(o.seed, "--seed");
  if (const char* env = std::getenv("GASCAP_SEED"); env && *env) {
    return parse_u64(env, "GASCAP_SEED");
  }
  return 0;
}

struct LoadedInstance {
  CapInstance inst;
  std::string source;
};

LoadedInstance load(const Options& o, std::uint64_t seed) {
  if (!o.instance.empty() && !o.synthetic.empty()) {
    throw ValidationError("--instance and --synthetic are mutually exclusive");
  }
  LoadedInstance out;
  if (!o.instance.empty()) {
    out.inst = load_instance(o.instance);
    out.source = o.instance;
  } else if (!o.synthetic.empty()) {
    const auto comma = o.synthetic.find(',');
    if (comma == std::string::npos) throw ValidationError("--synthetic expects NAP,NCH");
    const auto n_ap = parse_u64(o.synthetic.substr(0, comma), "NAP");
    const auto n_ch = parse_u64(o.synthetic.substr(comma + 1), "NCH");
    if (n_ap < 2 || n_ap > 4096 || n_ch < 2 || n_ch > 4096) {
      throw ValidationError("--synthetic sizes must lie in 2..4096");
    }
    out.inst = synthetic_instance(static_cast<int>(n_ap), static_cast<int>(n_ch), seed);
    out.source = "synthetic:" + o.synthetic + ":" + std::to_string(seed);
  } else {
    throw ValidationError("one of --instance or --synthetic is required");
  }
  if (o.alpha) out.inst.alpha = *o.alpha;
  for (const auto& w : validate(out.inst)) std::cerr << "warning: " << w << '\n';
  return out;
}

// One objective the CLI can run: a formulation, optionally quadratized.
struct Target {
  std::string label;
  Formulation f;
  std::optional<Quadratized> q;

  const BinaryPolynomial& poly() const { return q ? q->poly : f.objective; }

  Decoded decode_bits(const BitVector& x) const {
    return decode(f, std::span<const std::uint8_t>(x).first(f.n_vars()));
  }
};

Target make_target(const std::string& label, const CapInstance& inst, double penalty) {
  Target t{label, {}, std::nullopt};
  if (label == "qubo") {
    t.f = build_qubo(inst, penalty);
  } else if (label == "hubo-asc") {
    t.f = build_hubo(inst, Encoding::BinaryAscending, penalty);
  } else if (label == "hubo-desc") {
    t.f = build_hubo(inst, Encoding::BinaryDescending, penalty);
  } else if (label == "quadratized") {
    t.f = build_hubo(inst, Encoding::BinaryAscending, penalty);
    t.q = quadratize(t.f.objective);
  } else {
    throw ValidationError("unknown formulation '" + label + "'");
  }
  return t;
}

std::vector<std::string> formulations_or(const Options& o, std::vector<std::string> fallback) {
  auto out = o.formulations.empty() ? std::move(fallback) : o.formulations;
  std::vector<std::string> unique;
  for (auto& s : out) {
    if (std::find(unique.begin(), unique.end(), s) == unique.end()) unique.push_back(s);
  }
  return unique;
}

fs::path prepare_out(const Options& o) {
  fs::path dir(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output directory " + o.out + ": " + ec.message());
  return dir;
}

int cmd_formulate(const Options& o, tools::RunManifest& man) {
  const auto seed = resolve_seed(o);
  const auto li = load(o, seed);
  const auto dir = prepare_out(o);
  man.set_instance(li.source, tools::git_blob_hash(instance_to_json(li.inst)));

  std::ostringstream summary;
  summary << "formulation,encoding,n_vars,terms,degree,max_abs_coeff,penalty\n";
  for (const auto& label : formulations_or(o, {"qubo", "hubo-asc", "hubo-desc", "quadratized"})) {
    const auto t = make_target(label, li.inst, o.penalty);
    const auto st = stats(t.poly());
    summary << label << ',' << to_string(t.f.encoding) << ',' << t.poly().n_vars() << ','
            << st.term_count << ',' << st.degree << ',' << fmt(st.max_abs_coeff) << ','
            << fmt(t.f.penalty) << '\n';
    std::string dump = export_formulation(t.f);
    if (t.q) {
      std::ostringstream qd;
      qd << "{\"encoding\": \"quadratized\", \"n_vars\": " << t.q->poly.n_vars() << "}\n";
      for (const auto& a : t.q->aux_map) {
        qd << "# aux " << a.aux << " = " << a.first << " * " << a.second << '\n';
      }
      dump = qd.str() + t.q->poly.dump();
    }
    man.write(dir, label + ".poly", dump);
  }
  const auto vc = variable_counts(li.inst.n_ap, li.inst.n_ch);
  std::ostringstream counts;
  counts << "n_ap,n_ch,n,n_prime,n_double_prime,log2_search_space\n"
         << li.inst.n_ap << ',' << li.inst.n_ch << ',' << vc.n << ',' << vc.n_prime << ','
         << vc.n_double_prime << ',' << fmt(vc.log2_search_space) << '\n';
  man.write(dir, "summary.csv", summary.str());
  man.write(dir, "counts.csv", counts.str());
  man.finish(dir);
  std::cout << summary.str() << counts.str();
  return kExitOk;
}

struct EstimateRow {
  std::string formulation;
  Encoding encoding;
  int n_ap, n_ch;
  std::int64_t n;
  int m, m_closed;
  std::int64_t qubits_closed;
  ResourceReport r;
  ClosedFormCounts cf;
  std::int64_t n_double_prime;
};

int cmd_estimate(const Options& o, tools::RunManifest& man) {
  if (o.ap_min < 4 || o.ap_max < o.ap_min || o.ap_max > 512) {
    throw ValidationError("sweep needs 4 <= --ap-min <= --ap-max <= 512");
  }
  const auto dir = prepare_out(o);
  std::vector<EstimateRow> rows;
  int max_arity = 2;
  for (int n_ap = o.ap_min; n_ap <= o.ap_max; ++n_ap) {
    const int n_ch = n_ap / 2;
    if (n_ch < 2) continue;
    const auto table = CoeffTable::uniform(n_ap);
    const auto vc = variable_counts(n_ap, n_ch);
    for (auto e : {Encoding::OneHot, Encoding::BinaryAscending, Encoding::BinaryDescending}) {
      const auto s = e == Encoding::OneHot ? qubo_structure(n_ch, table, o.penalty)
                                           : hubo_structure(n_ch, table, e, o.penalty);
      EstimateRow row{e == Encoding::OneHot ? "qubo" : "hubo", e, n_ap, n_ch,
                      static_cast<std::int64_t>(s.n_vars()), 0, 0, 0, {}, {}, vc.n_double_prime};
      row.m = cap_value_register_width(s);
      row.r = cap_state_prep_resources(s, row.m);
      row.cf = closed_form_resources(n_ap, n_ch, e);
      row.m_closed = row.cf.m;
      row.qubits_closed = closed_form_qubits(n_ap, n_ch, table.d_sum, o.penalty, e);
      if (!row.r.cr_by_arity.empty()) max_arity = std::max(max_arity, row.r.cr_by_arity.rbegin()->first);
      if (!row.cf.cr_by_arity.empty()) max_arity = std::max(max_arity, row.cf.cr_by_arity.rbegin()->first);
      rows.push_back(std::move(row));
    }
  }

  std::ostringstream csv;
  csv << "formulation,encoding,n_ap,n_ch,n,m,qubits,m_closed_form,qubits_closed_form,H,R";
  for (int k = 1; k <= max_arity; ++k) csv << ",cr_arity_" << k;
  for (int k = 1; k <= max_arity; ++k) csv << ",cr_arity_" << k << "_closed_form";
  csv << ",cnot_enumerated,cnot_closed_form,n_double_prime,log2_search_space,"
         "log2_grover_queries,log2_exhaustive_queries\n";
  for (const auto& row : rows) {
    const double log2_space = row.n_ap * std::log2(static_cast<double>(row.n_ch));
    const auto eq = expected_queries(static_cast<double>(row.n));
    csv << row.formulation << ',' << to_string(row.encoding) << ',' << row.n_ap << ','
        << row.n_ch << ',' << row.n << ',' << row.m << ',' << row.n + row.m << ','
        << row.m_closed << ',' << row.qubits_closed << ',' << row.r.h << ',' << row.r.r;
    for (int k = 1; k <= max_arity; ++k) csv << ',' << row.r.cr(k);
    for (int k = 1; k <= max_arity; ++k) {
      auto it = row.cf.cr_by_arity.find(k);
      csv << ',' << (it == row.cf.cr_by_arity.end() ? 0 : it->second);
    }
    csv << ',' << row.r.cnot << ',' << row.cf.cnot << ',' << row.n_double_prime << ','
        << fmt(log2_space) << ',' << fmt(eq.log2_grover) << ',' << fmt(eq.log2_exhaustive) << '\n';
  }
  man.write(dir, "resources.csv", csv.str());
  man.finish(dir);
  std::cout << "wrote " << rows.size() << " rows to " << (dir / "resources.csv").string() << '\n';
  return kExitOk;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

int cmd_solve(const Options& o, tools::RunManifest& man) {
  const auto seed = resolve_seed(o);
  const auto li = load(o, seed);
  if (o.runs < 1) throw ValidationError("--runs must be positive");
  const auto dir = prepare_out(o);
  man.set_instance(li.source, tools::git_blob_hash(instance_to_json(li.inst)));

  const auto table = coeff_table(li.inst);
  std::optional<BruteForceResult> reference;
  try {
    reference = brute_force_cap(li.inst.n_ch, table);
  } catch (const CapExceeded&) {
    std::cerr << "note: instance too large for the brute-force reference\n";
  }

  GasConfig base;
  base.backend = backend_from_string(o.backend);
  base.master_seed = seed;
  base.count_oracle_calls = o.oracle_calls;
  base.termination.max_classical_iters = o.budget_classical;
  base.termination.max_quantum_queries = o.budget_quantum;
  if (!o.budget_classical && !o.budget_quantum) base.termination.max_classical_iters = 200;

  std::ostringstream summary;
  summary << "formulation,encoding,backend,runs,reached_optimum,oracle_min,oracle_max,"
             "mean_classical,mean_quantum,best_interference,reference_interference,verdict\n";
  std::vector<std::pair<std::string, std::vector<double>>> classical;
  bool all_pass = true;
  for (const auto& label : formulations_or(o, {"qubo", "hubo-asc", "hubo-desc"})) {
    const auto t = make_target(label, li.inst, o.penalty);
    const auto values = evaluate_all(t.poly());
    const double lo = *std::min_element(values.begin(), values.end());
    const double hi = *std::max_element(values.begin(), values.end());
    auto cfg = base;
    cfg.termination.stop_at_known_optimum = lo;
    const auto runs = run_batch(t.poly(), cfg, o.runs, o.workers);

    std::ostringstream traces, curve;
    write_trace_csv(traces, runs, label, std::string(to_string(t.f.encoding)), lo, hi);
    curve << "iter,mean,ci_low,ci_high\n";
    for (const auto& c : aggregate_curve(runs, lo, hi)) {
      curve << c.iter << ',' << fmt(c.mean) << ',' << fmt(c.ci_low) << ',' << fmt(c.ci_high) << '\n';
    }
    man.write(dir, "traces_" + label + ".csv", traces.str());
    man.write(dir, "curve_" + label + ".csv", curve.str());

    int reached = 0;
    std::vector<double> cq, qq;
    double best_interference = std::numeric_limits<double>::infinity();
    for (const auto& r : runs) {
      reached += std::abs(r.best_y - lo) <= 1e-9;
      cq.push_back(static_cast<double>(r.classical_queries));
      qq.push_back(static_cast<double>(r.quantum_queries));
      const auto d = t.decode_bits(r.best_x);
      if (d.valid()) {
        best_interference =
            std::min(best_interference, assignment_interference(table, li.inst.n_ch, *d.assignment));
      }
    }
    bool pass = reached * 100 >= 95 * o.runs;
    if (reference) pass = pass && std::abs(best_interference - reference->best_value) <= 1e-9;
    all_pass = all_pass && pass;
    summary << label << ',' << to_string(t.f.encoding) << ',' << to_string(base.backend) << ','
            << o.runs << ',' << reached << ',' << fmt(lo) << ',' << fmt(hi) << ','
            << fmt(mean_of(cq)) << ',' << fmt(mean_of(qq)) << ',' << fmt(best_interference) << ','
            << (reference ? fmt(reference->best_value) : std::string("NA")) << ','
            << (pass ? "pass" : "fail") << '\n';
    classical.emplace_back(label, std::move(cq));
  }

  std::ostringstream ranks;
  ranks << "a,b,u,z,p_value\n";
  for (std::size_t i = 0; i < classical.size(); ++i) {
    for (std::size_t j = i + 1; j < classical.size(); ++j) {
      const auto r = mann_whitney(classical[i].second, classical[j].second);
      ranks << classical[i].first << ',' << classical[j].first << ',' << fmt(r.u) << ','
            << fmt(r.z) << ',' << fmt(r.p_value) << '\n';
    }
  }
  man.write(dir, "summary.csv", summary.str());
  man.write(dir, "rank_tests.csv", ranks.str());
  man.finish(dir);
  std::cout << summary.str();
  return all_pass ? kExitOk : kExitGolden;
}

class Checker {
 public:
  void check(bool ok, const std::string& what) {
    std::cout << (ok ? "PASS " : "FAIL ") << what << '\n';
    failures_ += !ok;
  }
  void near(double got, double want, double tol, const std::string& what) {
    check(std::abs(got - want) <= tol, what + ": " + fmt(got) + " vs " + fmt(want));
  }
  int failures() const { return failures_; }

 private:
  int failures_ = 0;
};

int cmd_verify_appendix() {
  Checker ck;
  const auto inst = appendix_a_instance();
  const auto table = coeff_table(inst);
  const int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  const double c_gold[6] = {-4.319, -4.938, -6.145, -4.392, -3.822, -4.784};
  const double d_gold[6] = {1.835, 1.216, 0.010, 1.762, 2.333, 1.371};
  const auto qubo = build_qubo(inst);
  for (int p = 0; p < 6; ++p) {
    const int i = pairs[p][0], k = pairs[p][1];
    const std::string tag = "(" + std::to_string(i + 1) + "," + std::to_string(k + 1) + ")";
    ck.near(table.c(i, k), c_gold[p], 1e-3, "C" + tag);
    ck.near(table.d(i, k), d_gold[p], 1e-3, "D" + tag);
    for (int c = 0; c < inst.n_ch; ++c) {
      Monomial m{static_cast<std::uint32_t>(qubo.var_index(i, c)),
                 static_cast<std::uint32_t>(qubo.var_index(k, c))};
      ck.near(qubo.objective.coefficient(m), d_gold[p], 1e-3,
              "QUBO x" + tag + " channel " + std::to_string(c + 1));
    }
  }
  ck.near(table.d_sum, 8.527, 0.005, "D_sum");

  const auto bf = brute_force_cap(inst);
  ck.near(bf.best_value, 0.010, 1e-3, "brute-force minimum");
  ck.check(co_channel_partition(bf.best_assignment) ==
               std::vector<std::vector<int>>{{1, 4}, {2}, {3}},
           "brute-force partition {{1,4},{2},{3}}");

  const auto asc = build_hubo(inst, Encoding::BinaryAscending);
  const auto desc = build_hubo(inst, Encoding::BinaryDescending);
  ck.check(stats(asc.objective).term_count == 67,
           "ascending term count " + std::to_string(stats(asc.objective).term_count) + " == 67");
  ck.check(stats(desc.objective).term_count == 55,
           "descending term count " + std::to_string(stats(desc.objective).term_count) + " == 55");

  const std::vector<int> golden_assign = {2, 1, 3, 2};
  const BitVector x_asc = {0, 1, 0, 0, 1, 0, 0, 1};
  const BitVector x_desc = {1, 0, 1, 1, 0, 1, 1, 0};
  for (const auto* f : {&asc, &desc}) {
    const auto& x = f == &asc ? x_asc : x_desc;
    const std::string name(to_string(f->encoding));
    const auto d = decode(*f, x);
    ck.check(d.valid() && *d.assignment == golden_assign, name + " optimum decodes to (2,1,3,2)");
    const auto best = exhaustive_min(f->objective);
    ck.near(f->objective.evaluate(x), best.value, 1e-9, name + " optimum is a minimizer");
    ck.near(best.value, bf.best_value, 1e-9, name + " minimum equals brute force");
  }
  const auto qbest = exhaustive_min(qubo.objective);
  ck.near(qbest.value, bf.best_value, 1e-9, "QUBO minimum equals brute force");

  const auto vc = variable_counts(inst.n_ap, inst.n_ch);
  ck.check(vc.n == 12 && vc.n_prime == 8 && vc.n_double_prime == 12, "n, n', n'' = 12, 8, 12");
  ck.check(quadratize(asc.objective).poly.n_vars() == 12, "quadratized variable count 12");
  ck.check(cap_value_register_width(qubo) == 7 &&
               closed_form_qubits(4, 3, table.d_sum, 1.0, Encoding::OneHot) == 19,
           "QUBO qubit total 19");
  const int m_desc = cap_value_register_width(desc);
  std::cout << "INFO HUBO value register: " << m_desc << " qubits by the range rule; "
            << "a 4-qubit A_y compiles for descending: "
            << (build_state_prep(desc.objective, 0.0, 4).total_qubits() == 12 ? "yes" : "no")
            << '\n';

  std::cout << (ck.failures() == 0 ? "verify-appendix: all checks passed\n"
                                   : "verify-appendix: " + std::to_string(ck.failures()) +
                                         " check(s) failed\n");
  return ck.failures() == 0 ? kExitOk : kExitGolden;
}

void add_instance_options(CLI::App* sub, Options& o) {
  sub->add_option("--instance", o.instance, "Instance JSON file");
  sub->add_option("--synthetic", o.synthetic, "Synthetic instance NAP,NCH");
  sub->add_option("--seed", o.seed, "Master seed (falls back to GASCAP_SEED, then 0)");
  sub->add_option("--alpha", o.alpha, "Override the path-loss exponent");
  sub->add_option("--formulation", o.formulations, "qubo|hubo-asc|hubo-desc|quadratized")
      ->check(CLI::IsMember({"qubo", "hubo-asc", "hubo-desc", "quadratized"}));
  sub->add_option("--penalty", o.penalty, "Penalty weight w (QUBO) or w' (HUBO)");
  sub->add_option("--out", o.out, "Output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Channel assignment as QUBO/HUBO with Grover adaptive search"};
  app.require_subcommand(1);
  Options o;

  auto* formulate = app.add_subcommand("formulate", "Write polynomial dumps and a term summary");
  add_instance_options(formulate, o);

  auto* estimate = app.add_subcommand("estimate", "Resource sweep with N_CH = floor(N_AP/2)");
  estimate->add_option("--ap-min", o.ap_min, "Smallest N_AP");
  estimate->add_option("--ap-max", o.ap_max, "Largest N_AP");
  estimate->add_option("--penalty", o.penalty, "Penalty weight");
  estimate->add_option("--out", o.out, "Output directory");

  auto* solve = app.add_subcommand("solve", "Seeded GAS runs with traces and a summary");
  add_instance_options(solve, o);
  solve->add_option("--backend", o.backend, "sv|ideal")
      ->check(CLI::IsMember({"sv", "statevector", "ideal"}));
  solve->add_option("--budget-classical", o.budget_classical, "Max classical iterations");
  solve->add_option("--budget-quantum", o.budget_quantum, "Max quantum queries");
  solve->add_option("--runs", o.runs, "Seeded runs per formulation");
  solve->add_option("--workers", o.workers, "Worker threads (0 = hardware)");
  solve->add_flag("--count-oracle-calls", o.oracle_calls, "Count 2L+1 oracle calls per iteration");

  auto* verify = app.add_subcommand("verify-appendix", "Check the bundled golden values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  tools::RunManifest man(app.get_subcommands().front()->get_name(),
                         std::vector<std::string>(argv + 1, argv + argc), 0);
  try {
    if (*verify) return cmd_verify_appendix();
    man = tools::RunManifest(app.get_subcommands().front()->get_name(),
                             std::vector<std::string>(argv + 1, argv + argc),
                             *estimate ? 0 : resolve_seed(o));
    if (*formulate) return cmd_formulate(o, man);
    if (*estimate) return cmd_estimate(o, man);
    if (*solve) return cmd_solve(o, man);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const CapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << '\n';
    return kExitCap;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}
