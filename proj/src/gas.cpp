#include "gascap/gas.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "gascap/circuit.hpp"
#include "gascap/errors.hpp"

namespace gascap {

std::string_view to_string(Backend b) {
  return b == Backend::Statevector ? "sv" : "ideal";
}

Backend backend_from_string(std::string_view s) {
  if (s == "sv" || s == "statevector") return Backend::Statevector;
  if (s == "ideal") return Backend::Ideal;
  throw ValidationError("unknown backend '" + std::string(s) + "'");
}

void validate(const GasConfig& cfg) {
  if (!(cfg.lambda > 1.0)) throw ValidationError("lambda must exceed 1");
  if (!cfg.termination.any()) throw ValidationError("no termination rule is active");
  const auto& t = cfg.termination;
  if (t.max_classical_iters && *t.max_classical_iters < 0) {
    throw ValidationError("classical budget must be nonnegative");
  }
  if (t.max_quantum_queries && *t.max_quantum_queries < 0) {
    throw ValidationError("quantum budget must be nonnegative");
  }
  if (t.no_improvement_window && *t.no_improvement_window < 1) {
    throw ValidationError("no-improvement window must be positive");
  }
}

namespace {

BitVector uniform_bits(std::size_t n, Rng& rng) {
  BitVector x(n);
  std::bernoulli_distribution coin(0.5);
  for (auto& b : x) b = coin(rng) ? 1 : 0;
  return x;
}

// Amplify with L Grover iterations at threshold y on the statevector and
// measure the key register.
BitVector statevector_sample(const BinaryPolynomial& p, const ValueTable& table, double y,
                             int L, int qubit_cap, Rng& rng) {
  BinaryPolynomial shifted = p;
  shifted.add_term({}, -y);
  const int m = value_register_width(shifted, table.min() - y, table.max() - y);
  const CircuitSpec a = build_state_prep(p, y, m);
  StateVector s(a.n_key, a.m_val, qubit_cap);
  apply(a, s);
  if (L > 0) {
    const CircuitSpec g = build_grover(p, y, m);
    for (int l = 0; l < L; ++l) apply(g, s);
  }
  return sample(s, rng).key_bits;
}

}  // namespace

GasTrace run_gas(const BinaryPolynomial& p, const GasConfig& cfg, std::uint64_t run_index,
                 const ValueTable* table) {
  validate(cfg);
  const std::size_t n = p.n_vars();
  if (cfg.backend == Backend::Statevector && static_cast<int>(n) >= cfg.qubit_cap) {
    throw CapExceeded("statevector backend cannot hold " + std::to_string(n) + " key qubits");
  }
  std::optional<ValueTable> owned;
  if (table == nullptr) {
    owned.emplace(p);
    table = &*owned;
  }

  GasTrace trace;
  trace.run_seed = stream_seed(cfg.master_seed, run_index);
  trace.count_oracle_calls = cfg.count_oracle_calls;
  Rng rng(trace.run_seed);

  trace.best_x = uniform_bits(n, rng);
  trace.best_y = p.evaluate(trace.best_x);
  trace.initial_y = trace.best_y;
  trace.classical_queries = 1;

  const auto& term = cfg.termination;
  const double k_max = std::sqrt(std::ldexp(1.0, static_cast<int>(n)));
  double k = 1.0;
  std::int64_t stale = 0;
  for (std::int64_t i = 0;; ++i) {
    if (term.stop_at_known_optimum &&
        trace.best_y <= *term.stop_at_known_optimum + kCoefficientTolerance) {
      break;
    }
    if (term.max_classical_iters && i >= *term.max_classical_iters) break;
    if (term.max_quantum_queries && trace.quantum_queries >= *term.max_quantum_queries) break;
    if (term.no_improvement_window && stale >= *term.no_improvement_window) break;

    GasIteration it;
    it.i = i;
    it.y = trace.best_y;
    it.k = k;
    const int l_max = static_cast<int>(std::ceil(k - 1.0));
    it.L = std::uniform_int_distribution<int>(0, std::max(0, l_max))(rng);

    if (cfg.backend == Backend::Ideal) {
      it.sampled_x = ideal_gas_sample(*table, it.y, it.L, rng);
    } else {
      it.sampled_x = statevector_sample(p, *table, it.y, it.L, cfg.qubit_cap, rng);
    }
    it.sampled_y = p.evaluate(it.sampled_x);
    trace.classical_queries += 1;
    trace.quantum_queries += cfg.count_oracle_calls ? 2 * it.L + 1 : it.L;

    if (it.sampled_y < it.y) {
      it.improved = true;
      trace.best_x = it.sampled_x;
      trace.best_y = it.sampled_y;
      k = 1.0;
      stale = 0;
    } else {
      k = std::min(cfg.lambda * k, k_max);
      ++stale;
    }
    trace.iterations.push_back(std::move(it));
  }
  return trace;
}

std::vector<GasTrace> run_batch(const BinaryPolynomial& p, const GasConfig& cfg, int n_runs,
                                unsigned workers) {
  validate(cfg);
  if (n_runs < 0) throw ValidationError("run count must be nonnegative");
  const ValueTable table(p);
  std::vector<GasTrace> out(static_cast<std::size_t>(n_runs));
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max(1, n_runs)));

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (int r = next++; r < n_runs; r = next++) {
      try {
        out[static_cast<std::size_t>(r)] = run_gas(p, cfg, static_cast<std::uint64_t>(r), &table);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

BruteForceResult brute_force_cap(int n_ch, const CoeffTable& table) {
  const int n_ap = table.n_ap();
  if (n_ap < 1 || n_ch < 1) throw ValidationError("need at least one AP and one channel");
  std::int64_t total = 1;
  for (int i = 0; i < n_ap; ++i) {
    total *= n_ch;
    if (total > kBruteForceLimit) {
      throw CapExceeded("search space exceeds " + std::to_string(kBruteForceLimit) +
                        " assignments");
    }
  }
  BruteForceResult out;
  std::vector<int> assign(static_cast<std::size_t>(n_ap), 1);
  out.best_value = std::numeric_limits<double>::infinity();
  for (std::int64_t e = 0; e < total; ++e) {
    const double v = assignment_interference(table, n_ch, assign);
    ++out.evaluations;
    if (v < out.best_value - kCoefficientTolerance) {
      out.best_value = v;
      out.best_assignment = assign;
    }
    // Odometer, last AP fastest, so enumeration is lexicographic.
    for (int i = n_ap - 1; i >= 0; --i) {
      if (++assign[static_cast<std::size_t>(i)] <= n_ch) break;
      assign[static_cast<std::size_t>(i)] = 1;
    }
  }
  return out;
}

BruteForceResult brute_force_cap(const CapInstance& inst) {
  validate(inst);
  return brute_force_cap(inst.n_ch, coeff_table(inst));
}

std::vector<std::vector<int>> co_channel_partition(std::span<const int> assign) {
  std::map<int, std::vector<int>> groups;
  for (std::size_t i = 0; i < assign.size(); ++i) {
    groups[assign[i]].push_back(static_cast<int>(i) + 1);
  }
  std::vector<std::vector<int>> out;
  for (auto& [ch, aps] : groups) out.push_back(std::move(aps));
  std::sort(out.begin(), out.end());
  return out;
}

ExpectedQueries expected_queries(double n_vars) {
  return {std::exp2(n_vars / 2.0), std::exp2(n_vars), n_vars / 2.0, n_vars};
}

RankTest mann_whitney(std::span<const double> a, std::span<const double> b) {
  const std::size_t n1 = a.size();
  const std::size_t n2 = b.size();
  if (n1 == 0 || n2 == 0) throw ValidationError("rank test needs two nonempty samples");
  std::vector<std::pair<double, int>> pooled;
  pooled.reserve(n1 + n2);
  for (double v : a) pooled.emplace_back(v, 0);
  for (double v : b) pooled.emplace_back(v, 1);
  std::sort(pooled.begin(), pooled.end());

  const double n = static_cast<double>(n1 + n2);
  double rank_sum_a = 0.0;
  double tie_term = 0.0;
  for (std::size_t i = 0; i < pooled.size();) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j].first == pooled[i].first) ++j;
    const double avg_rank = (static_cast<double>(i + j) + 1.0) / 2.0;
    for (std::size_t q = i; q < j; ++q) {
      if (pooled[q].second == 0) rank_sum_a += avg_rank;
    }
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  RankTest out;
  const double dn1 = static_cast<double>(n1);
  const double dn2 = static_cast<double>(n2);
  out.u = rank_sum_a - dn1 * (dn1 + 1.0) / 2.0;
  const double mean = dn1 * dn2 / 2.0;
  const double var = dn1 * dn2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var <= 0.0) return out;
  out.z = (out.u - mean) / std::sqrt(var);
  out.p_value = std::erfc(std::abs(out.z) / std::sqrt(2.0));
  return out;
}

namespace {

double normalize(double y, double lo, double hi) {
  if (hi <= lo) return 0.0;
  return 100.0 * (y - lo) / (hi - lo);
}

}  // namespace

void write_trace_csv(std::ostream& out, const std::vector<GasTrace>& traces,
                     const std::string& formulation, const std::string& encoding,
                     double oracle_min, double oracle_max, bool header) {
  if (header) {
    out << "run_seed,formulation,encoding,iter,y_i,L_i,cum_classical,cum_quantum,"
           "best_y_normalized\n";
  }
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& t : traces) {
    const std::string prefix = std::to_string(t.run_seed) + "," + formulation + "," + encoding + ",";
    std::int64_t classical = 1;
    std::int64_t quantum = 0;
    double best = t.initial_y;
    out << prefix << 0 << "," << num(t.initial_y) << ",0," << classical << "," << quantum << ","
        << num(normalize(best, oracle_min, oracle_max)) << "\n";
    for (const auto& it : t.iterations) {
      ++classical;
      quantum += t.count_oracle_calls ? 2 * it.L + 1 : it.L;
      if (it.improved) best = it.sampled_y;
      out << prefix << it.i + 1 << "," << num(it.y) << "," << it.L << "," << classical << ","
          << quantum << "," << num(normalize(best, oracle_min, oracle_max)) << "\n";
    }
  }
}

std::vector<CurvePoint> aggregate_curve(const std::vector<GasTrace>& traces, double oracle_min,
                                        double oracle_max) {
  std::size_t longest = 0;
  for (const auto& t : traces) longest = std::max(longest, t.iterations.size());
  std::vector<std::vector<double>> series;
  for (const auto& t : traces) {
    std::vector<double> s;
    s.reserve(longest + 1);
    double best = t.initial_y;
    s.push_back(normalize(best, oracle_min, oracle_max));
    for (const auto& it : t.iterations) {
      if (it.improved) best = it.sampled_y;
      s.push_back(normalize(best, oracle_min, oracle_max));
    }
    s.resize(longest + 1, s.back());
    series.push_back(std::move(s));
  }
  std::vector<CurvePoint> out;
  if (series.empty()) return out;
  const double r = static_cast<double>(series.size());
  for (std::size_t i = 0; i <= longest; ++i) {
    double sum = 0.0;
    double sq = 0.0;
    for (const auto& s : series) {
      sum += s[i];
      sq += s[i] * s[i];
    }
    const double mean = sum / r;
    const double var = r > 1.0 ? std::max(0.0, (sq - r * mean * mean) / (r - 1.0)) : 0.0;
    const double half = 1.96 * std::sqrt(var / r);
    out.push_back({static_cast<std::int64_t>(i), mean, mean - half, mean + half});
  }
  return out;
}

}  // namespace gascap
