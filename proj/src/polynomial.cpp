#include "gascap/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "gascap/errors.hpp"

namespace gascap {

namespace {

void normalize_support(Monomial& s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
}

bool is_zero(double c) { return std::abs(c) <= kCoefficientTolerance; }

}  // namespace

BinaryPolynomial BinaryPolynomial::constant(std::size_t n_vars, double value) {
  BinaryPolynomial p(n_vars);
  p.add_term({}, value);
  return p;
}

BinaryPolynomial BinaryPolynomial::variable(std::size_t n_vars, std::uint32_t index) {
  BinaryPolynomial p(n_vars);
  p.add_term({index}, 1.0);
  return p;
}

int BinaryPolynomial::degree() const {
  // GradedLex puts the highest degree last.
  return terms_.empty() ? 0 : static_cast<int>(terms_.rbegin()->first.size());
}

double BinaryPolynomial::coefficient(Monomial support) const {
  normalize_support(support);
  auto it = terms_.find(support);
  return it == terms_.end() ? 0.0 : it->second;
}

void BinaryPolynomial::add_term(Monomial support, double coeff) {
  normalize_support(support);
  if (!support.empty()) widen(support.back() + 1);
  auto [it, inserted] = terms_.try_emplace(std::move(support), 0.0);
  it->second += coeff;
  if (is_zero(it->second)) terms_.erase(it);
}

void BinaryPolynomial::widen(std::size_t n_vars) { n_vars_ = std::max(n_vars_, n_vars); }

double BinaryPolynomial::evaluate(std::span<const std::uint8_t> x) const {
  if (x.size() != n_vars_) {
    throw ValidationError("bit vector length " + std::to_string(x.size()) +
                          " does not match n_vars " + std::to_string(n_vars_));
  }
  double sum = 0.0;
  for (const auto& [support, coeff] : terms_) {
    bool on = true;
    for (auto v : support) {
      if (!x[v]) {
        on = false;
        break;
      }
    }
    if (on) sum += coeff;
  }
  return sum;
}

BinaryPolynomial& BinaryPolynomial::operator+=(const BinaryPolynomial& other) {
  widen(other.n_vars_);
  for (const auto& [support, coeff] : other.terms_) add_term(support, coeff);
  return *this;
}

BinaryPolynomial& BinaryPolynomial::operator-=(const BinaryPolynomial& other) {
  widen(other.n_vars_);
  for (const auto& [support, coeff] : other.terms_) add_term(support, -coeff);
  return *this;
}

BinaryPolynomial& BinaryPolynomial::operator*=(double factor) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= factor;
    if (is_zero(it->second)) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
  return *this;
}

BinaryPolynomial operator*(const BinaryPolynomial& a, const BinaryPolynomial& b) {
  BinaryPolynomial out(std::max(a.n_vars_, b.n_vars_));
  // Accumulate first, canonicalize once: intermediate partial sums may
  // pass through zero.
  BinaryPolynomial::TermMap acc;
  Monomial merged;
  for (const auto& [sa, ca] : a.terms_) {
    for (const auto& [sb, cb] : b.terms_) {
      merged.clear();
      std::set_union(sa.begin(), sa.end(), sb.begin(), sb.end(),
                     std::back_inserter(merged));
      acc[merged] += ca * cb;
    }
  }
  for (auto& [support, coeff] : acc) {
    if (!is_zero(coeff)) out.terms_.emplace(support, coeff);
  }
  return out;
}

std::string BinaryPolynomial::dump() const {
  std::string out;
  char buf[64];
  for (const auto& [support, coeff] : terms_) {
    std::snprintf(buf, sizeof buf, "%.17g :", coeff);
    out += buf;
    for (auto v : support) {
      out += ' ';
      out += std::to_string(v);
    }
    out += '\n';
  }
  return out;
}

BinaryPolynomial BinaryPolynomial::parse(const std::string& text, std::size_t n_vars) {
  BinaryPolynomial p(n_vars);
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw ValidationError("polynomial dump line " + std::to_string(lineno) +
                            ": missing ':'");
    }
    double coeff = 0.0;
    try {
      coeff = std::stod(line.substr(0, colon));
    } catch (const std::exception&) {
      throw ValidationError("polynomial dump line " + std::to_string(lineno) +
                            ": bad coefficient");
    }
    std::istringstream rest(line.substr(colon + 1));
    Monomial support;
    long long v = 0;
    while (rest >> v) {
      if (v < 0) throw ValidationError("negative variable index in polynomial dump");
      support.push_back(static_cast<std::uint32_t>(v));
    }
    if (!rest.eof()) {
      throw ValidationError("polynomial dump line " + std::to_string(lineno) +
                            ": bad variable index");
    }
    p.add_term(std::move(support), coeff);
  }
  return p;
}

BinaryPolynomial add(const BinaryPolynomial& p, const BinaryPolynomial& q) { return p + q; }
BinaryPolynomial scale(const BinaryPolynomial& p, double c) { return p * c; }
BinaryPolynomial multiply(const BinaryPolynomial& p, const BinaryPolynomial& q) {
  return p * q;
}

PolyStats stats(const BinaryPolynomial& p) {
  PolyStats s;
  s.degree = p.degree();
  s.term_count = p.term_count();
  for (const auto& [support, coeff] : p.terms()) {
    s.max_abs_coeff = std::max(s.max_abs_coeff, std::abs(coeff));
    // The constant is always on; any other term can be switched off.
    s.min_value_bound += support.empty() ? coeff : std::min(0.0, coeff);
    s.max_value_bound += support.empty() ? coeff : std::max(0.0, coeff);
    if (coeff != std::round(coeff)) s.integral = false;
  }
  return s;
}

std::vector<std::size_t> degree_histogram(const BinaryPolynomial& p) {
  std::vector<std::size_t> hist(static_cast<std::size_t>(p.degree()) + 1, 0);
  for (const auto& [support, coeff] : p.terms()) ++hist[support.size()];
  return hist;
}

BitVector bits_from_index(std::uint64_t index, std::size_t n) {
  BitVector x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = static_cast<std::uint8_t>((index >> j) & 1U);
  return x;
}

std::uint64_t index_from_bits(std::span<const std::uint8_t> x) {
  if (x.size() > 64) throw ValidationError("bit vector longer than 64 bits");
  std::uint64_t idx = 0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j]) idx |= std::uint64_t{1} << j;
  }
  return idx;
}

std::vector<double> evaluate_all(const BinaryPolynomial& p, std::size_t cap) {
  const std::size_t n = p.n_vars();
  if (n > cap || n > 40) {
    throw CapExceeded("enumeration over " + std::to_string(n) +
                      " variables exceeds cap " + std::to_string(cap));
  }
  std::vector<std::uint64_t> masks;
  std::vector<double> coeffs;
  masks.reserve(p.term_count());
  coeffs.reserve(p.term_count());
  for (const auto& [support, coeff] : p.terms()) {
    std::uint64_t m = 0;
    for (auto v : support) m |= std::uint64_t{1} << v;
    masks.push_back(m);
    coeffs.push_back(coeff);
  }
  const std::uint64_t size = std::uint64_t{1} << n;
  std::vector<double> values(size);
  for (std::uint64_t x = 0; x < size; ++x) {
    double sum = 0.0;
    for (std::size_t t = 0; t < masks.size(); ++t) {
      if ((x & masks[t]) == masks[t]) sum += coeffs[t];
    }
    values[x] = sum;
  }
  return values;
}

namespace {

// Key index with bit order reversed so integer order is lexicographic
// order on (x_0, x_1, ...).
std::uint64_t lex_rank(std::uint64_t x, std::size_t n) {
  std::uint64_t r = 0;
  for (std::size_t j = 0; j < n; ++j) {
    r = (r << 1) | ((x >> j) & 1U);
  }
  return r;
}

}  // namespace

Minimum exhaustive_min(const BinaryPolynomial& p, std::size_t cap) {
  const auto values = evaluate_all(p, cap);
  const std::size_t n = p.n_vars();
  double best = std::numeric_limits<double>::infinity();
  for (double v : values) best = std::min(best, v);
  std::uint64_t arg = 0;
  std::uint64_t arg_rank = std::numeric_limits<std::uint64_t>::max();
  for (std::uint64_t x = 0; x < values.size(); ++x) {
    if (values[x] <= best + kCoefficientTolerance) {
      const auto r = lex_rank(x, n);
      if (r < arg_rank) {
        arg_rank = r;
        arg = x;
      }
    }
  }
  return {bits_from_index(arg, n), values[arg]};
}

}  // namespace gascap
