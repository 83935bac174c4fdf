#pragma once

// Execution backends for GAS circuits: an exact statevector simulator and
// an analytic sampler for ideal (perfectly encoded) Grover search.
//
// Statevector layout: basis index = key * 2^m + value. Key qubit j is bit
// m + j of the index; value qubit j is bit m - 1 - j, so the low m bits
// read directly as the value register's integer, MSB = sign qubit.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "gascap/circuit.hpp"
#include "gascap/polynomial.hpp"
#include "gascap/rng.hpp"

namespace gascap {

inline constexpr int kDefaultQubitCap = 24;

class StateVector {
 public:
  using Amplitude = std::complex<double>;

  /// |0...0> on n_key + m_val qubits.
  StateVector(int n_key, int m_val, int qubit_cap = kDefaultQubitCap);

  int n_key() const { return n_key_; }
  int m_val() const { return m_val_; }
  int n_qubits() const { return n_key_ + m_val_; }
  std::size_t size() const { return amps_.size(); }

  std::span<Amplitude> amplitudes() { return amps_; }
  std::span<const Amplitude> amplitudes() const { return amps_; }

  std::uint64_t index(std::uint64_t key, std::uint64_t value) const {
    return (key << m_val_) | value;
  }
  double probability(std::uint64_t key, std::uint64_t value) const {
    return std::norm(amps_[index(key, value)]);
  }
  double norm_squared() const;

  /// Bit position of global qubit q in the basis index.
  int bit_of(int qubit) const {
    return qubit < n_key_ ? m_val_ + qubit : m_val_ - 1 - (qubit - n_key_);
  }

 private:
  int n_key_;
  int m_val_;
  std::vector<Amplitude> amps_;
};

void apply_gate(const Gate& g, StateVector& s);
void apply(const CircuitSpec& c, StateVector& s);

/// Probability that the sign qubit reads 1, i.e. E(x) - y < 0.
double marked_probability(const StateVector& s);

/// Two's-complement reading of an m-bit register value.
std::int64_t twos_complement(std::uint64_t value, int m);

struct SampleOutcome {
  BitVector key_bits;
  BitVector value_bits;  // value qubit 0 first
  std::int64_t decoded_value = 0;
  std::uint64_t key_index = 0;
};

SampleOutcome sample(const StateVector& s, Rng& rng);

/// Little-endian (re, im) float64 pairs, one per basis state.
void dump_amplitudes(const StateVector& s, std::ostream& out);

/// Objective values over the whole cube with a value-sorted key order, so
/// the marked set {x : p(x) < y} is a prefix.
class ValueTable {
 public:
  explicit ValueTable(const BinaryPolynomial& p, std::size_t cap = kDefaultEnumerationCap);

  std::size_t n_vars() const { return n_vars_; }
  std::uint64_t size() const { return values_.size(); }
  double value(std::uint64_t key) const { return values_[key]; }
  double min() const { return values_[order_.front()]; }
  double max() const { return values_[order_.back()]; }

  /// Number of keys with value strictly below y.
  std::uint64_t count_below(double y) const;
  /// Key at position `rank` of the value-sorted order.
  std::uint64_t key_at_rank(std::uint64_t rank) const { return order_[rank]; }

 private:
  std::size_t n_vars_;
  std::vector<double> values_;
  std::vector<std::uint64_t> order_;
  std::vector<double> sorted_;
};

/// sin^2((2L + 1) asin(sqrt(t / N))).
double ideal_marked_probability(std::uint64_t t, std::uint64_t n_states, int L);

/// Ideal GAS measurement after L Grover iterations at threshold y: a marked
/// key with probability ideal_marked_probability(t, N, L), uniform inside
/// the marked set, else uniform over the unmarked keys.
BitVector ideal_gas_sample(const ValueTable& table, double y, int L, Rng& rng);
BitVector ideal_gas_sample(const BinaryPolynomial& p, double y, int L, Rng& rng);

}  // namespace gascap
