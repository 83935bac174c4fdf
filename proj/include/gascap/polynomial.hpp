#pragma once

// Multilinear pseudo-Boolean polynomials: the objective representation
// shared by every formulation, the circuit builder and the solvers.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace gascap {

using BitVector = std::vector<std::uint8_t>;

/// Sorted, duplicate-free variable indices. Empty = constant term.
using Monomial = std::vector<std::uint32_t>;

/// Graded lexicographic order: lower degree first, then lexicographic.
struct GradedLex {
  bool operator()(const Monomial& a, const Monomial& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

/// Coefficients with magnitude at or below this are treated as zero.
inline constexpr double kCoefficientTolerance = 1e-9;

class BinaryPolynomial {
 public:
  using TermMap = std::map<Monomial, double, GradedLex>;

  BinaryPolynomial() = default;
  explicit BinaryPolynomial(std::size_t n_vars) : n_vars_(n_vars) {}

  static BinaryPolynomial constant(std::size_t n_vars, double value);
  static BinaryPolynomial variable(std::size_t n_vars, std::uint32_t index);

  std::size_t n_vars() const { return n_vars_; }
  const TermMap& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  int degree() const;
  bool empty() const { return terms_.empty(); }

  /// Coefficient of `support` (any order, duplicates collapse); 0 if absent.
  double coefficient(Monomial support) const;
  double constant_term() const { return coefficient({}); }

  /// Adds `coeff` to the term with the given support. Duplicate indices
  /// collapse (x*x = x) and n_vars grows to cover every index.
  void add_term(Monomial support, double coeff);

  /// Raises n_vars; never shrinks it.
  void widen(std::size_t n_vars);

  double evaluate(std::span<const std::uint8_t> x) const;

  BinaryPolynomial& operator+=(const BinaryPolynomial& other);
  BinaryPolynomial& operator-=(const BinaryPolynomial& other);
  BinaryPolynomial& operator*=(double factor);

  friend BinaryPolynomial operator+(BinaryPolynomial a, const BinaryPolynomial& b) {
    return a += b;
  }
  friend BinaryPolynomial operator-(BinaryPolynomial a, const BinaryPolynomial& b) {
    return a -= b;
  }
  friend BinaryPolynomial operator*(BinaryPolynomial a, double f) { return a *= f; }
  friend BinaryPolynomial operator*(double f, BinaryPolynomial a) { return a *= f; }
  friend BinaryPolynomial operator*(const BinaryPolynomial& a,
                                    const BinaryPolynomial& b);

  friend bool operator==(const BinaryPolynomial& a, const BinaryPolynomial& b) {
    return a.terms_ == b.terms_;
  }

  /// One term per line, `coeff : i1 i2 ...`, in graded lexicographic order.
  std::string dump() const;
  static BinaryPolynomial parse(const std::string& text, std::size_t n_vars = 0);

 private:
  std::size_t n_vars_ = 0;
  TermMap terms_;
};

BinaryPolynomial add(const BinaryPolynomial& p, const BinaryPolynomial& q);
BinaryPolynomial scale(const BinaryPolynomial& p, double c);
BinaryPolynomial multiply(const BinaryPolynomial& p, const BinaryPolynomial& q);

struct PolyStats {
  int degree = 0;
  std::size_t term_count = 0;
  double max_abs_coeff = 0.0;
  // Interval-arithmetic enclosure of the range over all bit vectors.
  double min_value_bound = 0.0;
  double max_value_bound = 0.0;
  bool integral = true;  // every coefficient is an integer
};

PolyStats stats(const BinaryPolynomial& p);

/// Histogram of term count by degree (index = degree).
std::vector<std::size_t> degree_histogram(const BinaryPolynomial& p);

// Bit j of a key index is variable x_j.
BitVector bits_from_index(std::uint64_t index, std::size_t n);
std::uint64_t index_from_bits(std::span<const std::uint8_t> x);

inline constexpr std::size_t kDefaultEnumerationCap = 24;

/// p(x) for every key index x in [0, 2^n). Summation order matches
/// evaluate(), so both agree bit for bit.
std::vector<double> evaluate_all(const BinaryPolynomial& p,
                                 std::size_t cap = kDefaultEnumerationCap);

struct Minimum {
  BitVector x;
  double value = 0.0;
};

/// Global minimizer by enumeration. Ties (within kCoefficientTolerance)
/// resolve to the lexicographically smallest (x_0, x_1, ...).
Minimum exhaustive_min(const BinaryPolynomial& p,
                       std::size_t cap = kDefaultEnumerationCap);

}  // namespace gascap
