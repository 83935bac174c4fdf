#include <doctest.h>

#include <cmath>
#include <random>

#include "gascap/errors.hpp"
#include "gascap/formulation.hpp"
#include "gascap/polynomial.hpp"

using namespace gascap;

namespace {

// 1 + x1 - 1.8 x2x3x4, zero-based.
BinaryPolynomial fig1() {
  BinaryPolynomial p(4);
  p.add_term({}, 1.0);
  p.add_term({0}, 1.0);
  p.add_term({1, 2, 3}, -1.8);
  return p;
}

BinaryPolynomial random_poly(std::mt19937_64& rng, std::size_t n, int terms, bool integral) {
  BinaryPolynomial p(n);
  std::uniform_int_distribution<int> deg(0, static_cast<int>(std::min<std::size_t>(n, 4)));
  std::uniform_int_distribution<std::uint32_t> var(0, static_cast<std::uint32_t>(n - 1));
  std::uniform_real_distribution<double> real(-3.0, 3.0);
  std::uniform_int_distribution<int> integer(-4, 4);
  for (int t = 0; t < terms; ++t) {
    Monomial m;
    const int d = deg(rng);
    for (int j = 0; j < d; ++j) m.push_back(var(rng));
    p.add_term(m, integral ? integer(rng) : real(rng));
  }
  return p;
}

// Naive product evaluation, independent of evaluate().
double naive_eval(const BinaryPolynomial& p, const BitVector& x) {
  double s = 0;
  for (const auto& [m, c] : p.terms()) {
    double prod = c;
    for (auto v : m) prod *= x[v];
    s += prod;
  }
  return s;
}

}  // namespace

TEST_CASE("evaluate on 1 + x0 - 1.8 x1x2x3") {
  const auto p = fig1();
  CHECK(p.evaluate(BitVector{0, 0, 0, 0}) == 1.0);
  CHECK(p.evaluate(BitVector{1, 1, 1, 1}) == doctest::Approx(0.2));
  CHECK(BinaryPolynomial(3).evaluate(BitVector{1, 0, 1}) == 0.0);
  CHECK_THROWS_AS(p.evaluate(BitVector{1, 0}), ValidationError);
}

TEST_CASE("multilinear reduction and canonical form") {
  const auto x1 = BinaryPolynomial::variable(2, 0);
  CHECK(x1 * x1 == x1);
  const auto one_minus = BinaryPolynomial::constant(2, 1.0) - x1;
  CHECK(one_minus * one_minus == one_minus);

  BinaryPolynomial q(2);
  q.add_term({}, 1.0);
  q.add_term({0}, -1.0);
  q.add_term({1}, 0.0);
  CHECK(q.term_count() == 2);
  CHECK(q.coefficient({1}) == 0.0);
  const auto prod = q * fig1();
  for (const auto& [m, c] : prod.terms()) {
    CHECK(c != 0.0);
  }

  BinaryPolynomial dup(3);
  dup.add_term({2, 0, 2}, 1.5);
  CHECK(dup.coefficient({0, 2}) == 1.5);
  CHECK(dup.coefficient({2, 0}) == 1.5);

  // Cancellation removes the term.
  dup.add_term({0, 2}, -1.5);
  CHECK(dup.empty());
  CHECK(dup.degree() == 0);
}

TEST_CASE("add_term widens n_vars") {
  BinaryPolynomial p(2);
  p.add_term({5}, 1.0);
  CHECK(p.n_vars() == 6);
  p.widen(3);
  CHECK(p.n_vars() == 6);
}

TEST_CASE("random algebra agrees pointwise") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + trial % 10;
    const auto p = random_poly(rng, n, 8, trial % 2 == 0);
    const auto q = random_poly(rng, n, 8, trial % 3 == 0);
    const auto sum = add(p, q);
    const auto diff = p - q;
    const auto prod = multiply(p, q);
    const auto scaled = scale(p, -2.5);
    for (std::uint64_t idx = 0; idx < (1ULL << n); ++idx) {
      const auto x = bits_from_index(idx, n);
      const double a = naive_eval(p, x);
      const double b = naive_eval(q, x);
      CHECK(sum.evaluate(x) == doctest::Approx(a + b));
      CHECK(diff.evaluate(x) == doctest::Approx(a - b));
      CHECK(prod.evaluate(x) == doctest::Approx(a * b));
      CHECK(scaled.evaluate(x) == doctest::Approx(-2.5 * a));
    }
  }
}

TEST_CASE("canonicalization is idempotent") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = random_poly(rng, 6, 12, false);
    const auto again = BinaryPolynomial::parse(p.dump(), p.n_vars());
    CHECK(again == p);
    CHECK(again.dump() == p.dump());
    CHECK(p * 1.0 == p);
    CHECK(p + BinaryPolynomial(6) == p);
  }
}

TEST_CASE("stats") {
  const auto s = stats(fig1());
  CHECK(s.degree == 3);
  CHECK(s.term_count == 3);
  CHECK(s.max_abs_coeff == doctest::Approx(1.8));
  CHECK(s.min_value_bound <= -0.8 + 1e-12);
  CHECK(s.max_value_bound >= 2.0 - 1e-12);
  CHECK_FALSE(s.integral);

  const auto c = stats(BinaryPolynomial::constant(0, 5.0));
  CHECK(c.degree == 0);
  CHECK(c.min_value_bound == 5.0);
  CHECK(c.max_value_bound == 5.0);
  CHECK(c.integral);

  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_poly(rng, 8 + trial % 9, 10, trial % 2 == 0);
    const auto st = stats(p);
    const auto values = evaluate_all(p);
    for (double v : values) {
      CHECK(v >= st.min_value_bound - 1e-9);
      CHECK(v <= st.max_value_bound + 1e-9);
    }
  }
}

TEST_CASE("Appendix descending HUBO has 55 terms") {
  const auto f = build_hubo(appendix_a_instance(), Encoding::BinaryDescending);
  CHECK(stats(f.objective).term_count == 55);
}

TEST_CASE("degree histogram") {
  const auto h = degree_histogram(fig1());
  CHECK(h == std::vector<std::size_t>{1, 1, 0, 1});
}

TEST_CASE("dump format and parse errors") {
  const auto d = fig1().dump();
  CHECK(d == "1 :\n1 : 0\n-1.8 : 1 2 3\n");
  CHECK_THROWS_AS(BinaryPolynomial::parse("1.0 0 1\n"), ValidationError);
  CHECK_THROWS_AS(BinaryPolynomial::parse("abc : 0\n"), ValidationError);
  CHECK_THROWS_AS(BinaryPolynomial::parse("1 : 0 x\n"), ValidationError);
  CHECK_THROWS_AS(BinaryPolynomial::parse("1 : -1\n"), ValidationError);
  const auto p = BinaryPolynomial::parse("# comment\n\n2 : 3\n", 2);
  CHECK(p.n_vars() == 4);
}

TEST_CASE("evaluate_all matches evaluate bit for bit") {
  std::mt19937_64 rng(5);
  const auto p = random_poly(rng, 9, 20, false);
  const auto all = evaluate_all(p);
  for (std::uint64_t idx = 0; idx < all.size(); ++idx) {
    CHECK(all[idx] == p.evaluate(bits_from_index(idx, 9)));
  }
  CHECK_THROWS_AS(evaluate_all(BinaryPolynomial(25)), CapExceeded);
  CHECK(evaluate_all(BinaryPolynomial(25), 25).size() == (1ULL << 25));
}

TEST_CASE("exhaustive_min") {
  const auto m = exhaustive_min(BinaryPolynomial::variable(1, 0));
  CHECK(m.x == BitVector{0});
  CHECK(m.value == 0.0);

  const auto fm = exhaustive_min(fig1());
  CHECK(fm.value == doctest::Approx(-0.8));
  CHECK(fm.x == BitVector{0, 1, 1, 1});

  // Constant: every vector ties, lexicographically smallest wins.
  CHECK(exhaustive_min(BinaryPolynomial::constant(3, 2.0)).x == BitVector{0, 0, 0});

  // -x0 - x1 + 2 x0x1: minimizers (1,0) and (0,1); (0,1) is smaller.
  BinaryPolynomial t(2);
  t.add_term({0}, -1.0);
  t.add_term({1}, -1.0);
  t.add_term({0, 1}, 2.0);
  CHECK(exhaustive_min(t).x == BitVector{0, 1});

  CHECK_THROWS_AS(exhaustive_min(BinaryPolynomial(30)), CapExceeded);
}

TEST_CASE("bit vector index conversions") {
  CHECK(bits_from_index(6, 4) == BitVector{0, 1, 1, 0});
  CHECK(index_from_bits(BitVector{0, 1, 1, 0}) == 6);
  CHECK_THROWS_AS(index_from_bits(BitVector(65, 0)), ValidationError);
}
