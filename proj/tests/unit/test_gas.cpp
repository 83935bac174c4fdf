#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gascap/errors.hpp"
#include "gascap/formulation.hpp"
#include "gascap/gas.hpp"

using namespace gascap;

namespace {

GasConfig budget_config(std::int64_t iters, Backend b = Backend::Ideal) {
  GasConfig cfg;
  cfg.backend = b;
  cfg.master_seed = 1234;
  cfg.termination.max_classical_iters = iters;
  return cfg;
}

void check_trace_identities(const GasTrace& t) {
  CHECK(t.classical_queries == static_cast<std::int64_t>(t.iterations.size()) + 1);
  std::int64_t q = 0;
  double y = t.initial_y;
  for (const auto& it : t.iterations) {
    q += t.count_oracle_calls ? 2 * it.L + 1 : it.L;
    CHECK(it.y == y);
    CHECK(it.L >= 0);
    CHECK(it.L <= static_cast<int>(std::ceil(it.k - 1.0)));
    CHECK(it.improved == (it.sampled_y < it.y));
    if (it.improved) y = it.sampled_y;
  }
  CHECK(t.quantum_queries == q);
  CHECK(t.best_y == y);
}

}  // namespace

TEST_CASE("configuration validation") {
  GasConfig cfg;
  CHECK_THROWS_AS(validate(cfg), ValidationError);
  cfg.termination.max_classical_iters = 5;
  CHECK_NOTHROW(validate(cfg));
  cfg.lambda = 1.0;
  CHECK_THROWS_AS(validate(cfg), ValidationError);
  cfg.lambda = 1.2;
  cfg.termination.no_improvement_window = 0;
  CHECK_THROWS_AS(validate(cfg), ValidationError);
  CHECK(backend_from_string("sv") == Backend::Statevector);
  CHECK(backend_from_string("ideal") == Backend::Ideal);
  CHECK_THROWS_AS(backend_from_string("gpu"), ValidationError);
}

TEST_CASE("k grows by lambda while nothing improves") {
  // Constant objective: nothing is ever below the threshold.
  const auto p = BinaryPolynomial::constant(4, 3.0);
  const auto t = run_gas(p, budget_config(30));
  REQUIRE(t.iterations.size() == 30);
  for (std::size_t j = 0; j < t.iterations.size(); ++j) {
    const double expect = std::min(std::pow(8.0 / 7.0, static_cast<double>(j)), 4.0);
    CHECK(t.iterations[j].k == doctest::Approx(expect));
    CHECK_FALSE(t.iterations[j].improved);
    CHECK(t.iterations[j].y == 3.0);
  }
  CHECK(t.iterations[0].L == 0);
  check_trace_identities(t);
}

TEST_CASE("traces obey the accounting identities") {
  const auto f = build_hubo(appendix_a_instance(), Encoding::BinaryAscending);
  for (bool oracle_calls : {false, true}) {
    auto cfg = budget_config(60);
    cfg.count_oracle_calls = oracle_calls;
    for (std::uint64_t r = 0; r < 10; ++r) {
      const auto t = run_gas(f.objective, cfg, r);
      check_trace_identities(t);
      CHECK(t.best_y == f.objective.evaluate(t.best_x));
      for (std::size_t i = 1; i < t.iterations.size(); ++i) {
        CHECK(t.iterations[i].y <= t.iterations[i - 1].y);
        if (t.iterations[i - 1].improved) CHECK(t.iterations[i].k == 1.0);
      }
    }
  }
}

TEST_CASE("termination rules") {
  const auto f = build_hubo(appendix_a_instance(), Encoding::BinaryDescending);
  const double opt = exhaustive_min(f.objective).value;

  GasConfig cfg;
  cfg.master_seed = 5;
  cfg.termination.stop_at_known_optimum = opt;
  cfg.termination.max_classical_iters = 500;
  const auto t = run_gas(f.objective, cfg);
  CHECK(t.best_y == doctest::Approx(opt));
  if (!t.iterations.empty()) CHECK(t.iterations.back().improved);

  GasConfig quantum;
  quantum.termination.max_quantum_queries = 20;
  const auto tq = run_gas(f.objective, quantum);
  CHECK(tq.quantum_queries >= 20);
  CHECK(tq.quantum_queries - tq.iterations.back().L < 20);

  GasConfig window;
  window.termination.no_improvement_window = 7;
  const auto tw = run_gas(BinaryPolynomial::constant(3, 1.0), window);
  CHECK(tw.iterations.size() == 7);

  // Already optimal after the initial sample: no iterations at all.
  GasConfig trivial;
  trivial.termination.stop_at_known_optimum = 1.0;
  trivial.termination.max_classical_iters = 10;
  const auto tt = run_gas(BinaryPolynomial::constant(3, 1.0), trivial);
  CHECK(tt.iterations.empty());
  CHECK(tt.classical_queries == 1);
}

TEST_CASE("threshold stays put when y0 is already optimal") {
  // Unique minimum 0 at x = 0; the run from a seed that starts there never improves.
  BinaryPolynomial p(3);
  for (std::uint32_t j = 0; j < 3; ++j) p.add_term({j}, 1.0);
  auto cfg = budget_config(15);
  for (std::uint64_t r = 0; r < 64; ++r) {
    const auto t = run_gas(p, cfg, r);
    if (t.initial_y != 0.0) continue;
    for (const auto& it : t.iterations) {
      CHECK_FALSE(it.improved);
      CHECK(it.y == 0.0);
    }
    return;
  }
  FAIL("no seed started at the optimum");
}

TEST_CASE("seed determinism and batch order") {
  const auto f = build_qubo(appendix_a_instance());
  const auto cfg = budget_config(40);
  const auto a = run_gas(f.objective, cfg, 3);
  const auto b = run_gas(f.objective, cfg, 3);
  CHECK(a.best_x == b.best_x);
  CHECK(a.quantum_queries == b.quantum_queries);
  CHECK(a.run_seed == stream_seed(1234, 3));
  const auto one = run_batch(f.objective, cfg, 6, 1);
  const auto many = run_batch(f.objective, cfg, 6, 4);
  for (int r = 0; r < 6; ++r) {
    CHECK(one[r].run_seed == many[r].run_seed);
    CHECK(one[r].classical_queries == many[r].classical_queries);
    CHECK(one[r].best_x == many[r].best_x);
  }
  CHECK(one[3].best_x == a.best_x);
}

TEST_CASE("ideal GAS finds the oracle minimum with a generous budget") {
  for (int n_ch : {2, 3}) {
    const auto inst = synthetic_instance(4, n_ch, 60 + n_ch);
    for (auto e : {Encoding::OneHot, Encoding::BinaryAscending}) {
      const auto f = e == Encoding::OneHot ? build_qubo(inst) : build_hubo(inst, e);
      const auto opt = exhaustive_min(f.objective).value;
      GasConfig cfg;
      cfg.master_seed = 77;
      cfg.termination.max_quantum_queries =
          static_cast<std::int64_t>(10 * std::sqrt(std::ldexp(1.0, static_cast<int>(f.n_vars()))));
      cfg.termination.stop_at_known_optimum = opt;
      const auto runs = run_batch(f.objective, cfg, 100);
      int hits = 0;
      for (const auto& t : runs) hits += std::abs(t.best_y - opt) <= 1e-9;
      CHECK(hits >= 95);
    }
  }
}

TEST_CASE("statevector backend runs and agrees in outcome") {
  const auto f = build_hubo(appendix_a_instance(), Encoding::BinaryDescending);
  const double opt = exhaustive_min(f.objective).value;
  GasConfig cfg;
  cfg.backend = Backend::Statevector;
  cfg.master_seed = 3;
  cfg.termination.stop_at_known_optimum = opt;
  cfg.termination.max_classical_iters = 200;
  const auto runs = run_batch(f.objective, cfg, 10);
  int hits = 0;
  for (const auto& t : runs) {
    check_trace_identities(t);
    hits += std::abs(t.best_y - opt) <= 1e-9;
  }
  CHECK(hits >= 9);

  GasConfig capped = cfg;
  capped.qubit_cap = 8;
  CHECK_THROWS_AS(run_gas(f.objective, capped), CapExceeded);
}

TEST_CASE("brute force") {
  const auto r = brute_force_cap(appendix_a_instance());
  CHECK(r.evaluations == 81);
  CHECK(std::abs(r.best_value - 0.010) <= 1e-3);
  CHECK(co_channel_partition(r.best_assignment) ==
        std::vector<std::vector<int>>{{1, 4}, {2}, {3}});
  // Lexicographically first minimizer.
  CHECK(r.best_assignment == std::vector<int>{1, 2, 3, 1});

  auto wide = appendix_a_instance();
  wide.n_ch = 4;
  CHECK(brute_force_cap(wide).best_value == 0.0);

  CHECK_THROWS_AS(brute_force_cap(4, CoeffTable::uniform(12)), CapExceeded);
  CHECK(co_channel_partition(std::vector<int>{2, 1, 3, 2}) ==
        std::vector<std::vector<int>>{{1, 4}, {2}, {3}});
}

TEST_CASE("expected queries") {
  CHECK(expected_queries(12).grover == 64.0);
  CHECK(expected_queries(12).exhaustive == 4096.0);
  CHECK(expected_queries(8).grover == 16.0);
  CHECK(expected_queries(0).grover == 1.0);
}

TEST_CASE("Mann-Whitney against a frozen reference") {
  // Reference: asymptotic two-sided test, tie-corrected, no continuity correction.
  const std::vector<double> a = {1, 2, 3, 4, 5, 5};
  const std::vector<double> b = {3, 4, 5, 6, 7, 8, 8, 9};
  const auto r = mann_whitney(a, b);
  CHECK(r.u == 7.0);
  CHECK(r.p_value == doctest::Approx(0.02698255237699423).epsilon(1e-9));
  const auto same = mann_whitney(a, a);
  CHECK(same.p_value == doctest::Approx(1.0));
  const std::vector<double> flat = {2, 2, 2};
  CHECK(mann_whitney(flat, flat).p_value == 1.0);
  CHECK_THROWS_AS(mann_whitney(a, {}), ValidationError);
}

TEST_CASE("trace CSV and aggregate curve") {
  const auto f = build_hubo(appendix_a_instance(), Encoding::BinaryAscending);
  const auto values = evaluate_all(f.objective);
  const double lo = *std::min_element(values.begin(), values.end());
  const double hi = *std::max_element(values.begin(), values.end());
  const auto runs = run_batch(f.objective, budget_config(25), 3);
  std::ostringstream a, b;
  write_trace_csv(a, runs, "hubo", "binary_ascending", lo, hi);
  write_trace_csv(b, runs, "hubo", "binary_ascending", lo, hi);
  CHECK(a.str() == b.str());
  std::istringstream in(a.str());
  std::string line;
  std::getline(in, line);
  CHECK(line ==
        "run_seed,formulation,encoding,iter,y_i,L_i,cum_classical,cum_quantum,best_y_normalized");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3 * 26);

  const auto curve = aggregate_curve(runs, lo, hi);
  REQUIRE(curve.size() == 26);
  for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].mean <= curve[i - 1].mean + 1e-12);
  for (const auto& c : curve) {
    CHECK(c.mean >= 0.0);
    CHECK(c.mean <= 100.0);
    CHECK(c.ci_low <= c.mean);
    CHECK(c.ci_high >= c.mean);
  }
}
