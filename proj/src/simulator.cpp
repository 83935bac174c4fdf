#include "gascap/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "gascap/errors.hpp"

namespace gascap {

using Amplitude = StateVector::Amplitude;

StateVector::StateVector(int n_key, int m_val, int qubit_cap)
    : n_key_(n_key), m_val_(m_val) {
  if (n_key < 0 || m_val < 0) throw ValidationError("register widths must be nonnegative");
  if (n_key + m_val > qubit_cap) {
    throw CapExceeded("statevector of " + std::to_string(n_key + m_val) +
                      " qubits exceeds cap " + std::to_string(qubit_cap));
  }
  amps_.assign(std::size_t{1} << (n_key + m_val), Amplitude{0.0, 0.0});
  amps_[0] = 1.0;
}

double StateVector::norm_squared() const {
  double sum = 0.0;
  for (const auto& a : amps_) sum += std::norm(a);
  return sum;
}

namespace {

void check_qubit(const StateVector& s, int q) {
  if (q < 0 || q >= s.n_qubits()) {
    throw ValidationError("qubit " + std::to_string(q) + " out of range");
  }
}

// In-place DFT of one contiguous block, sign = -1 for the inverse QFT.
void block_dft(std::span<Amplitude> a, std::span<const Amplitude> twiddle) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < len / 2; ++j) {
        const Amplitude u = a[i + j];
        const Amplitude v = a[i + j + len / 2] * twiddle[j * stride];
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
      }
    }
  }
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& x : a) x *= norm;
}

void value_register_fourier(StateVector& s, double sign) {
  const std::size_t m_size = std::size_t{1} << s.m_val();
  std::vector<Amplitude> twiddle(m_size);
  for (std::size_t j = 0; j < m_size; ++j) {
    twiddle[j] = std::polar(1.0, sign * 2.0 * std::numbers::pi * static_cast<double>(j) /
                                     static_cast<double>(m_size));
  }
  auto amps = s.amplitudes();
  for (std::size_t base = 0; base < amps.size(); base += m_size) {
    block_dft(amps.subspan(base, m_size), twiddle);
  }
}

// Multiplies every amplitude whose index has all `mask` bits set.
void phase_on_mask(StateVector& s, std::uint64_t mask, Amplitude phase) {
  auto amps = s.amplitudes();
  const std::uint64_t full = amps.size() - 1;
  const std::uint64_t free = full & ~mask;
  std::uint64_t sub = 0;
  do {
    amps[sub | mask] *= phase;
    sub = (sub - free) & free;
  } while (sub != 0);
}

}  // namespace

void apply_gate(const Gate& g, StateVector& s) {
  auto amps = s.amplitudes();
  switch (g.kind) {
    case GateKind::H: {
      check_qubit(s, g.target);
      const std::size_t step = std::size_t{1} << s.bit_of(g.target);
      const double r = std::numbers::sqrt2 / 2.0;
      for (std::size_t base = 0; base < amps.size(); base += 2 * step) {
        for (std::size_t i = base; i < base + step; ++i) {
          const Amplitude a = amps[i];
          const Amplitude b = amps[i + step];
          amps[i] = r * (a + b);
          amps[i + step] = r * (a - b);
        }
      }
      break;
    }
    case GateKind::R:
    case GateKind::CR: {
      check_qubit(s, g.target);
      std::uint64_t mask = std::uint64_t{1} << s.bit_of(g.target);
      for (int c : g.controls) {
        check_qubit(s, c);
        mask |= std::uint64_t{1} << s.bit_of(c);
      }
      phase_on_mask(s, mask, std::polar(1.0, g.theta));
      break;
    }
    case GateKind::Z:
      check_qubit(s, g.target);
      phase_on_mask(s, std::uint64_t{1} << s.bit_of(g.target), Amplitude{-1.0, 0.0});
      break;
    case GateKind::IQFT: value_register_fourier(s, -1.0); break;
    case GateKind::QFT: value_register_fourier(s, +1.0); break;
    case GateKind::Diffusion:
      for (std::size_t i = 1; i < amps.size(); ++i) amps[i] = -amps[i];
      break;
  }
}

void apply(const CircuitSpec& c, StateVector& s) {
  if (c.n_key != s.n_key() || c.m_val != s.m_val()) {
    throw ValidationError("circuit registers (" + std::to_string(c.n_key) + ", " +
                          std::to_string(c.m_val) + ") do not match the state (" +
                          std::to_string(s.n_key()) + ", " + std::to_string(s.m_val()) + ")");
  }
  for (const auto& g : c.gates) apply_gate(g, s);
}

double marked_probability(const StateVector& s) {
  if (s.m_val() == 0) return 0.0;
  const std::uint64_t sign = std::uint64_t{1} << (s.m_val() - 1);
  double p = 0.0;
  const auto amps = s.amplitudes();
  for (std::uint64_t i = 0; i < amps.size(); ++i) {
    if (i & sign) p += std::norm(amps[i]);
  }
  return p;
}

std::int64_t twos_complement(std::uint64_t value, int m) {
  if (m <= 0) return 0;
  const std::uint64_t mod = std::uint64_t{1} << m;
  value &= mod - 1;
  return value >= (mod >> 1) ? static_cast<std::int64_t>(value) - static_cast<std::int64_t>(mod)
                             : static_cast<std::int64_t>(value);
}

SampleOutcome sample(const StateVector& s, Rng& rng) {
  const auto amps = s.amplitudes();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double target = unit(rng) * s.norm_squared();
  double acc = 0.0;
  std::uint64_t pick = amps.size() - 1;
  for (std::uint64_t i = 0; i < amps.size(); ++i) {
    acc += std::norm(amps[i]);
    if (acc > target) {
      pick = i;
      break;
    }
  }
  // Guard against landing on a zero-probability tail through rounding.
  while (pick > 0 && std::norm(amps[pick]) == 0.0) --pick;

  const int m = s.m_val();
  SampleOutcome out;
  out.key_index = pick >> m;
  out.key_bits = bits_from_index(out.key_index, s.n_key());
  const std::uint64_t value = pick & ((std::uint64_t{1} << m) - 1);
  out.value_bits.resize(m);
  for (int j = 0; j < m; ++j) out.value_bits[j] = static_cast<std::uint8_t>((value >> (m - 1 - j)) & 1U);
  out.decoded_value = twos_complement(value, m);
  return out;
}

void dump_amplitudes(const StateVector& s, std::ostream& out) {
  for (const auto& a : s.amplitudes()) {
    const double parts[2] = {a.real(), a.imag()};
    // Hosts targeted here are little-endian; the raw bytes are the format.
    out.write(reinterpret_cast<const char*>(parts), sizeof parts);
  }
}

ValueTable::ValueTable(const BinaryPolynomial& p, std::size_t cap)
    : n_vars_(p.n_vars()), values_(evaluate_all(p, cap)) {
  order_.resize(values_.size());
  for (std::uint64_t i = 0; i < order_.size(); ++i) order_[i] = i;
  std::stable_sort(order_.begin(), order_.end(),
                   [this](std::uint64_t a, std::uint64_t b) { return values_[a] < values_[b]; });
  sorted_.resize(order_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) sorted_[i] = values_[order_[i]];
}

std::uint64_t ValueTable::count_below(double y) const {
  return static_cast<std::uint64_t>(std::lower_bound(sorted_.begin(), sorted_.end(), y) -
                                    sorted_.begin());
}

double ideal_marked_probability(std::uint64_t t, std::uint64_t n_states, int L) {
  if (t == 0) return 0.0;
  if (t >= n_states) return 1.0;
  const double theta = std::asin(std::sqrt(static_cast<double>(t) / static_cast<double>(n_states)));
  const double s = std::sin((2.0 * L + 1.0) * theta);
  return s * s;
}

BitVector ideal_gas_sample(const ValueTable& table, double y, int L, Rng& rng) {
  const std::uint64_t n_states = table.size();
  const std::uint64_t t = table.count_below(y);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const bool marked = unit(rng) < ideal_marked_probability(t, n_states, L);
  std::uint64_t rank = 0;
  if (marked) {
    rank = std::uniform_int_distribution<std::uint64_t>(0, t - 1)(rng);
  } else {
    rank = std::uniform_int_distribution<std::uint64_t>(t, n_states - 1)(rng);
  }
  return bits_from_index(table.key_at_rank(rank), table.n_vars());
}

BitVector ideal_gas_sample(const BinaryPolynomial& p, double y, int L, Rng& rng) {
  return ideal_gas_sample(ValueTable(p), y, L, rng);
}

}  // namespace gascap
