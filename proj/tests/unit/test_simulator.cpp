#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "gascap/circuit.hpp"
#include "gascap/errors.hpp"
#include "gascap/simulator.hpp"
#include "oracles.hpp"

using namespace gascap;

namespace {

BinaryPolynomial random_integer_poly(std::mt19937_64& rng, std::size_t n, int terms, int range) {
  BinaryPolynomial p(n);
  std::uniform_int_distribution<int> deg(0, 3);
  std::uniform_int_distribution<std::uint32_t> var(0, static_cast<std::uint32_t>(n - 1));
  std::uniform_int_distribution<int> coeff(-range, range);
  for (int t = 0; t < terms; ++t) {
    Monomial m;
    const int d = deg(rng);
    for (int j = 0; j < d; ++j) m.push_back(var(rng));
    p.add_term(m, coeff(rng));
  }
  return p;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::uint64_t count_below(const BinaryPolynomial& p, double y) {
  std::uint64_t t = 0;
  for (double v : evaluate_all(p)) t += v < y;
  return t;
}

}  // namespace

TEST_CASE("single-qubit gates") {
  StateVector s(1, 0);
  apply_gate({GateKind::H, 0, {}, 0}, s);
  CHECK(s.amplitudes()[0].real() == doctest::Approx(std::numbers::sqrt2 / 2));
  CHECK(s.amplitudes()[1].real() == doctest::Approx(std::numbers::sqrt2 / 2));
  apply_gate({GateKind::Z, 0, {}, 0}, s);
  CHECK(s.amplitudes()[1].real() == doctest::Approx(-std::numbers::sqrt2 / 2));
  apply_gate({GateKind::H, 0, {}, 0}, s);
  CHECK(std::norm(s.amplitudes()[1]) == doctest::Approx(1.0));
  CHECK_THROWS_AS(apply_gate({GateKind::H, 0, {}, 3}, s), ValidationError);
}

TEST_CASE("controlled phase touches only the all-ones subspace") {
  StateVector s(3, 0);
  for (int q = 0; q < 3; ++q) apply_gate({GateKind::H, 0, {}, q}, s);
  apply_gate({GateKind::CR, 0.7, {0, 2}, 1}, s);
  for (std::uint64_t i = 0; i < 8; ++i) {
    const double expect_phase = i == 7 ? 0.7 : 0.0;
    CHECK(std::arg(s.amplitudes()[i]) == doctest::Approx(expect_phase));
  }
}

TEST_CASE("register layout") {
  StateVector s(2, 3);
  CHECK(s.bit_of(0) == 3);
  CHECK(s.bit_of(1) == 4);
  CHECK(s.bit_of(2) == 2);  // sign qubit = MSB of the value field
  CHECK(s.bit_of(4) == 0);
  CHECK(s.index(2, 5) == (2u << 3 | 5u));
  CHECK_THROWS_AS(StateVector(20, 5), CapExceeded);
  CHECK_NOTHROW(StateVector(20, 5, 25));
  CHECK(twos_complement(7, 3) == -1);
  CHECK(twos_complement(3, 3) == 3);
  CHECK(twos_complement(4, 3) == -4);
}

TEST_CASE("constant +1 with two value qubits reads 01") {
  const auto c = build_state_prep(BinaryPolynomial::constant(0, 1.0), 0.0, 2);
  StateVector s(0, 2);
  apply(c, s);
  CHECK(s.probability(0, 1) == doctest::Approx(1.0));
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto out = sample(s, rng);
    CHECK(out.value_bits == BitVector{0, 1});
    CHECK(out.decoded_value == 1);
  }
}

TEST_CASE("value register holds E(x) - y exactly") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const auto p = random_integer_poly(rng, n, 6, 3);
    const double y = static_cast<double>(static_cast<int>(rng() % 5) - 2);
    BinaryPolynomial shifted = p;
    shifted.add_term({}, -y);
    const auto values = evaluate_all(p);
    const double lo = *std::min_element(values.begin(), values.end());
    const double hi = *std::max_element(values.begin(), values.end());
    const int m = value_register_width(shifted, lo - y, hi - y);
    if (m > 6) continue;
    StateVector s(static_cast<int>(n), m);
    apply(build_state_prep(p, y, m), s);
    const std::uint64_t M = 1ULL << m;
    for (std::uint64_t key = 0; key < (1ULL << n); ++key) {
      const double e = values[key] - y;
      const auto expect = static_cast<std::uint64_t>(((static_cast<std::int64_t>(e) % static_cast<std::int64_t>(M)) + M) % M);
      for (std::uint64_t v = 0; v < M; ++v) {
        const double prob = s.probability(key, v);
        CHECK(near(prob, v == expect ? 1.0 / (1ULL << n) : 0.0, 1e-9));
        const auto amp = oracle::prep_amplitude(e, static_cast<int>(n), m, v);
        CHECK(std::abs(s.amplitudes()[s.index(key, v)] - amp) < 1e-9);
      }
    }
  }
}

TEST_CASE("inverse restores the input and norms hold") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    BinaryPolynomial p(5);
    std::uniform_real_distribution<double> real(-3, 3);
    for (std::uint32_t t = 0; t < 6; ++t) p.add_term({t % 5, (t * 3) % 5}, real(rng));
    const int m = 4;
    const auto a = build_state_prep(p, 0.3, m);
    StateVector s(5, m);
    for (const auto& g : a.gates) {
      apply_gate(g, s);
      CHECK(std::abs(s.norm_squared() - 1.0) < 1e-9);
    }
    apply(a.inverse(), s);
    CHECK(std::abs(s.amplitudes()[0] - std::complex<double>(1.0, 0.0)) < 1e-10);
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(std::abs(s.amplitudes()[i]) < 1e-10);
  }
}

TEST_CASE("QFT and IQFT are inverse") {
  StateVector s(1, 4);
  apply_gate({GateKind::H, 0, {}, 0}, s);
  apply_gate({GateKind::R, 0.4, {}, 2}, s);
  std::vector<std::complex<double>> before(s.amplitudes().begin(), s.amplitudes().end());
  apply_gate({GateKind::IQFT, 0, {}, -1}, s);
  apply_gate({GateKind::QFT, 0, {}, -1}, s);
  for (std::size_t i = 0; i < before.size(); ++i) CHECK(std::abs(s.amplitudes()[i] - before[i]) < 1e-12);
}

TEST_CASE("amplification law on the statevector") {
  std::mt19937_64 rng(31);
  int cases = 0;
  while (cases < 10) {
    const std::size_t n = 3 + cases % 6;
    const auto p = random_integer_poly(rng, n, 8, 3);
    const auto values = evaluate_all(p);
    const double lo = *std::min_element(values.begin(), values.end());
    const double hi = *std::max_element(values.begin(), values.end());
    const double y = lo + 1 + static_cast<double>(rng() % 3);
    BinaryPolynomial shifted = p;
    shifted.add_term({}, -y);
    const int m = value_register_width(shifted, lo - y, hi - y);
    if (m > 6) continue;
    ++cases;
    const auto t = count_below(p, y);
    const auto a = build_state_prep(p, y, m);
    const auto g = build_grover(p, y, m);
    StateVector s(static_cast<int>(n), m);
    apply(a, s);
    const double N = std::ldexp(1.0, static_cast<int>(n));
    for (int L = 0; L <= 5; ++L) {
      CHECK(near(marked_probability(s), oracle::grover_probability(static_cast<double>(t), N, L),
                 1e-6));
      CHECK(near(marked_probability(s), ideal_marked_probability(t, static_cast<std::uint64_t>(N), L),
                 1e-6));
      apply(g, s);
    }
  }
}

TEST_CASE("no marked state leaves the key distribution uniform") {
  BinaryPolynomial p(3);
  p.add_term({0}, 1.0);
  p.add_term({1, 2}, 2.0);
  const int m = 3;
  StateVector s(3, m);
  apply(build_state_prep(p, 0.0, m), s);
  const auto g = build_grover(p, 0.0, m);
  for (int l = 0; l < 3; ++l) apply(g, s);
  for (std::uint64_t key = 0; key < 8; ++key) {
    double pk = 0;
    for (std::uint64_t v = 0; v < 8; ++v) pk += s.probability(key, v);
    CHECK(pk == doctest::Approx(1.0 / 8));
  }
}

TEST_CASE("one marked state is found after the optimal iteration count") {
  // x0 + x1 + x2 + x3 + x4: only 00000 lies below y = 1.
  BinaryPolynomial p(5);
  for (std::uint32_t j = 0; j < 5; ++j) p.add_term({j}, 1.0);
  const double N = 32;
  const int L = static_cast<int>(std::round(std::numbers::pi / (4 * std::asin(std::sqrt(1 / N))) - 0.5));
  const int m = 4;
  StateVector s(5, m);
  apply(build_state_prep(p, 1.0, m), s);
  const auto g = build_grover(p, 1.0, m);
  for (int l = 0; l < L; ++l) apply(g, s);
  double p0 = 0;
  for (std::uint64_t v = 0; v < 16; ++v) p0 += s.probability(0, v);
  CHECK(p0 >= 1 - 1 / N);
}

TEST_CASE("oracle flips exactly the sign-bit states") {
  BinaryPolynomial p(3);
  p.add_term({0}, 2.0);
  p.add_term({1}, -1.0);
  p.add_term({0, 2}, -2.0);
  const int m = 3;
  StateVector s(3, m);
  apply(build_state_prep(p, 0.0, m), s);
  std::vector<std::complex<double>> before(s.amplitudes().begin(), s.amplitudes().end());
  apply(build_oracle(3, m), s);
  for (std::uint64_t key = 0; key < 8; ++key) {
    const bool marked = p.evaluate(bits_from_index(key, 3)) < 0;
    for (std::uint64_t v = 0; v < 8; ++v) {
      const auto idx = s.index(key, v);
      if (std::abs(before[idx]) < 1e-12) continue;
      CHECK(((v >> 2) & 1) == static_cast<std::uint64_t>(marked));
      CHECK(std::abs(s.amplitudes()[idx] - (marked ? -before[idx] : before[idx])) < 1e-12);
    }
  }
}

TEST_CASE("sampling") {
  StateVector s(3, 1);
  apply_gate({GateKind::H, 0, {}, 1}, s);
  apply_gate({GateKind::Z, 0, {}, 1}, s);
  apply_gate({GateKind::H, 0, {}, 1}, s);  // back to |x1 = 1>
  Rng rng(4);
  const auto out = sample(s, rng);
  CHECK(out.key_bits == BitVector{0, 1, 0});
  CHECK(out.key_index == 2);

  StateVector u(4, 0);
  for (int q = 0; q < 4; ++q) apply_gate({GateKind::H, 0, {}, q}, u);
  std::map<std::uint64_t, int> freq;
  Rng r2(12);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) ++freq[sample(u, r2).key_index];
  const double mean = draws / 16.0;
  const double sd = std::sqrt(draws * (1 / 16.0) * (15 / 16.0));
  CHECK(freq.size() == 16);
  for (const auto& [k, c] : freq) CHECK(std::abs(c - mean) <= 5 * sd);

  Rng a(99), b(99);
  for (int i = 0; i < 50; ++i) CHECK(sample(u, a).key_index == sample(u, b).key_index);
}

TEST_CASE("amplitude dump") {
  StateVector s(1, 1);
  std::ostringstream out;
  dump_amplitudes(s, out);
  const auto bytes = out.str();
  REQUIRE(bytes.size() == 4 * 16);
  double first[2];
  std::memcpy(first, bytes.data(), 16);
  CHECK(first[0] == 1.0);
  CHECK(first[1] == 0.0);
}

TEST_CASE("ideal sampler") {
  CHECK(ideal_marked_probability(0, 256, 5) == 0.0);
  CHECK(ideal_marked_probability(256, 256, 3) == 1.0);
  CHECK(ideal_marked_probability(3, 64, 0) == doctest::Approx(3.0 / 64));
  CHECK(ideal_marked_probability(1, 256, 12) ==
        doctest::Approx(std::pow(std::sin(25 * std::asin(1.0 / 16)), 2)));
  CHECK(ideal_marked_probability(1, 256, 12) > 0.9999);

  BinaryPolynomial p(4);
  for (std::uint32_t j = 0; j < 4; ++j) p.add_term({j}, 1.0 + j);
  const ValueTable table(p);
  CHECK(table.min() == 0.0);
  CHECK(table.max() == 10.0);
  CHECK(table.count_below(0.0) == 0);
  CHECK(table.count_below(1.5) == 2);
  CHECK(table.key_at_rank(0) == 0);

  // t = 0: uniform over everything.
  Rng rng(3);
  std::map<std::uint64_t, int> freq;
  for (int i = 0; i < 16000; ++i) ++freq[index_from_bits(ideal_gas_sample(table, 0.0, 4, rng))];
  CHECK(freq.size() == 16);
  for (const auto& [k, c] : freq) CHECK(std::abs(c - 1000) < 5 * std::sqrt(1000.0));

  // L = 0: marked with probability t/N.
  int marked = 0;
  for (int i = 0; i < 16000; ++i) marked += p.evaluate(ideal_gas_sample(p, 3.5, 0, rng)) < 3.5;
  const double t = static_cast<double>(table.count_below(3.5));
  const double expect = 16000 * t / 16;
  CHECK(std::abs(marked - expect) < 5 * std::sqrt(expect * (1 - t / 16)));
}

TEST_CASE("backends agree on the marked probability") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 4; ++trial) {
    const auto p = random_integer_poly(rng, 6, 7, 2);
    const ValueTable table(p);
    const double y = table.min() + 1;
    BinaryPolynomial shifted = p;
    shifted.add_term({}, -y);
    const int m = value_register_width(shifted, table.min() - y, table.max() - y);
    StateVector s(6, m);
    apply(build_state_prep(p, y, m), s);
    const auto g = build_grover(p, y, m);
    for (int L = 0; L < 4; ++L) {
      CHECK(near(marked_probability(s), ideal_marked_probability(table.count_below(y), 64, L),
                 1e-9));
      apply(g, s);
    }
  }
}
