#pragma once

// Grover adaptive search (threshold descent with randomized rotation
// counts) over either backend, and the classical reference solvers.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gascap/cap_model.hpp"
#include "gascap/polynomial.hpp"
#include "gascap/simulator.hpp"

namespace gascap {

enum class Backend { Statevector, Ideal };

std::string_view to_string(Backend b);
Backend backend_from_string(std::string_view s);  // "sv" | "statevector" | "ideal"

struct Termination {
  std::optional<std::int64_t> max_classical_iters;
  std::optional<std::int64_t> max_quantum_queries;
  std::optional<double> stop_at_known_optimum;
  std::optional<std::int64_t> no_improvement_window;

  bool any() const {
    return max_classical_iters || max_quantum_queries || stop_at_known_optimum ||
           no_improvement_window;
  }
};

struct GasConfig {
  double lambda = 8.0 / 7.0;
  Backend backend = Backend::Ideal;
  Termination termination;
  std::uint64_t master_seed = 0;
  // false: one G application = one query. true: 2L + 1 oracle calls.
  bool count_oracle_calls = false;
  int qubit_cap = kDefaultQubitCap;
};

void validate(const GasConfig& cfg);

struct GasIteration {
  std::int64_t i = 0;
  double y = 0.0;   // threshold in force during this iteration
  double k = 1.0;
  int L = 0;
  BitVector sampled_x;
  double sampled_y = 0.0;
  bool improved = false;
};

struct GasTrace {
  std::uint64_t run_seed = 0;
  double initial_y = 0.0;
  std::vector<GasIteration> iterations;
  BitVector best_x;
  double best_y = 0.0;
  std::int64_t classical_queries = 0;
  std::int64_t quantum_queries = 0;
  bool count_oracle_calls = false;
};

/// One run on stream `run_index` of cfg.master_seed. `table` may carry the
/// precomputed value table of p so batches share it.
GasTrace run_gas(const BinaryPolynomial& p, const GasConfig& cfg,
                 std::uint64_t run_index = 0, const ValueTable* table = nullptr);

/// Runs 0..n_runs-1 on a worker pool; results in run order, identical for
/// any worker count.
std::vector<GasTrace> run_batch(const BinaryPolynomial& p, const GasConfig& cfg,
                                int n_runs, unsigned workers = 0);

inline constexpr std::int64_t kBruteForceLimit = 10'000'000;

struct BruteForceResult {
  std::vector<int> best_assignment;  // channels 1..n_ch
  double best_value = 0.0;
  std::int64_t evaluations = 0;
};

/// Exhaustive search over all N_CH^N_AP assignments in lexicographic order;
/// the first minimizer (within kCoefficientTolerance) wins.
BruteForceResult brute_force_cap(const CapInstance& inst);
BruteForceResult brute_force_cap(int n_ch, const CoeffTable& table);

/// Groups of APs (1-based) sharing a channel, each sorted, groups sorted.
std::vector<std::vector<int>> co_channel_partition(std::span<const int> assign);

struct ExpectedQueries {
  double grover = 0.0;      // 2^{n/2}, inf once it overflows
  double exhaustive = 0.0;  // 2^n
  double log2_grover = 0.0;
  double log2_exhaustive = 0.0;
};

ExpectedQueries expected_queries(double n_vars);

struct RankTest {
  double u = 0.0;        // Mann-Whitney U of the first sample
  double z = 0.0;
  double p_value = 1.0;  // two-sided, normal approximation with tie correction
};

RankTest mann_whitney(std::span<const double> a, std::span<const double> b);

/// One row per (run, iteration); iteration 0 is the initial sample.
/// best_y_normalized maps [oracle_min, oracle_max] to [0, 100].
void write_trace_csv(std::ostream& out, const std::vector<GasTrace>& traces,
                     const std::string& formulation, const std::string& encoding,
                     double oracle_min, double oracle_max, bool header = true);

struct CurvePoint {
  std::int64_t iter = 0;
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Mean normalized best value per iteration index across runs (finished
/// runs hold their final value) with a 95% normal confidence band.
std::vector<CurvePoint> aggregate_curve(const std::vector<GasTrace>& traces,
                                        double oracle_min, double oracle_max);

}  // namespace gascap
