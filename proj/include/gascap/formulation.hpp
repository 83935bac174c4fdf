#pragma once

// QUBO (one-hot) and HUBO (ascending / descending binary) objectives for
// the channel assignment problem, plus quadratization and decoding.
//
// Variable layout is AP-major: flat index = ap * slots_per_ap + slot, with
// slot r holding the r-th bit of the AP's channel field.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gascap/cap_model.hpp"
#include "gascap/polynomial.hpp"

namespace gascap {

enum class Encoding { OneHot, BinaryAscending, BinaryDescending };

std::string_view to_string(Encoding e);
Encoding encoding_from_string(std::string_view s);
inline bool is_binary(Encoding e) { return e != Encoding::OneHot; }

/// ceil(log2 n_ch); 0 for a single channel.
int bits_per_channel(int n_ch);
int slots_per_ap(Encoding e, int n_ch);

/// Integer spelled by channel c's codeword: c - 1 (ascending) or
/// n_ch - c + 1 (descending), reduced modulo 2^N_B.
std::uint32_t codeword_value(int c, int n_ch, Encoding e);

/// Big-endian codeword of channel c, width N_B.
BitVector channel_codeword(int c, int n_ch, Encoding e);

/// Degree-N_B indicator over AP `ap`'s slots that is 1 iff they spell
/// `value`.
BinaryPolynomial codeword_indicator(int ap, std::uint32_t value, int n_b,
                                    std::size_t n_vars);

/// Indicator that AP `ap` uses channel c under a binary encoding.
BinaryPolynomial channel_indicator(int ap, int c, int n_ap, int n_ch, Encoding e);

/// Codeword values no channel maps to. Empty when n_ch is a power of two.
std::vector<std::uint32_t> unused_codewords(int n_ch, Encoding e);

/// Every CAP objective has the form
///   sum_{i<k} D_ik * pair(x_i, x_k) + penalty * sum_i single(x_i),
/// where pair acts on 2*slots variables (AP i's slots first) and single on
/// one AP's slots. Keeping this form lets resource counts scale to sizes
/// whose full expansion would not fit in memory.
struct SeparableObjective {
  Encoding encoding = Encoding::OneHot;
  int n_ap = 0;
  int n_ch = 0;
  int slots = 0;
  double penalty = 1.0;
  BinaryPolynomial pair;
  BinaryPolynomial single;
  CoeffTable table;

  std::size_t n_vars() const {
    return static_cast<std::size_t>(n_ap) * static_cast<std::size_t>(slots);
  }
};

SeparableObjective qubo_structure(int n_ch, const CoeffTable& table, double w);
SeparableObjective hubo_structure(int n_ch, const CoeffTable& table, Encoding e,
                                  double w_prime);

BinaryPolynomial materialize(const SeparableObjective& s);

struct TermSummary {
  std::vector<std::int64_t> histogram;  // index = degree
  double min_coeff = 0.0;  // extremes over all terms, 0 when empty
  double max_coeff = 0.0;
  double constant = 0.0;
};

/// Term statistics of materialize(s), computed without expanding the full
/// objective.
TermSummary summarize_terms(const SeparableObjective& s);

/// Exact number of nonzero terms by degree in materialize(s).
std::vector<std::int64_t> term_histogram(const SeparableObjective& s);

/// Upper bound on the objective over the whole cube. Exact for one-hot;
/// for binary encodings the bound is the largest of (top C(n_ap - j, 2)
/// D values + j * penalty) over j APs on unused codewords.
double objective_upper_bound(const SeparableObjective& s);

struct Formulation {
  Encoding encoding = Encoding::OneHot;
  int n_ap = 0;
  int n_ch = 0;
  int slots_per_ap = 0;
  double penalty = 1.0;
  BinaryPolynomial objective;
  // Enclosure of the objective's range; lower is 0 for every CAP objective.
  double value_lower_bound = 0.0;
  double value_upper_bound = 0.0;

  std::size_t n_vars() const { return objective.n_vars(); }
  std::size_t var_index(int ap, int slot) const;
};

Formulation build_qubo(const CapInstance& inst, double w = 1.0);
Formulation build_qubo(int n_ch, const CoeffTable& table, double w = 1.0);
Formulation build_hubo(const CapInstance& inst, Encoding e, double w_prime = 1.0);
Formulation build_hubo(int n_ch, const CoeffTable& table, Encoding e,
                       double w_prime = 1.0);

struct Decoded {
  std::optional<std::vector<int>> assignment;  // channels 1..n_ch
  std::vector<std::string> violations;
  bool valid() const { return assignment.has_value(); }
};

Decoded decode(const Formulation& f, std::span<const std::uint8_t> x);

/// Bit vector representing `assign` (channels 1..n_ch) under f's encoding.
BitVector encode(const Formulation& f, std::span<const int> assign);

struct AuxVariable {
  std::uint32_t first = 0;
  std::uint32_t second = 0;
  std::uint32_t aux = 0;  // constrained to equal first * second
};

struct Quadratized {
  BinaryPolynomial poly;
  std::vector<AuxVariable> aux_map;
};

/// Rosenberg reduction: repeatedly replaces the most frequent variable
/// pair among terms of degree >= 3 (ties: lexicographically smallest) by a
/// fresh variable y and adds scale * (ab - 2ay - 2by + 3y).
/// Default scale is 1 + the summed |coefficient| of p's terms of degree
/// >= 3, large enough that the quadratized minimum equals p's minimum.
Quadratized quadratize(const BinaryPolynomial& p, std::optional<double> scale = {});

/// Extends x with the aux values implied by the substitution chain.
BitVector extend_with_aux(const Quadratized& q, std::span<const std::uint8_t> x);

struct VariableCounts {
  std::int64_t n = 0;               // one-hot QUBO
  std::int64_t n_prime = 0;         // binary HUBO
  std::int64_t n_double_prime = 0;  // quadratized HUBO
  double log2_search_space = 0.0;
};

VariableCounts variable_counts(int n_ap, int n_ch);

/// Header line `{encoding, n_vars, penalty}` followed by the term dump.
std::string export_formulation(const Formulation& f);

}  // namespace gascap
