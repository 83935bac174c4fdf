#include "gascap/formulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>

#include "gascap/errors.hpp"

namespace gascap {

std::string_view to_string(Encoding e) {
  switch (e) {
    case Encoding::OneHot: return "one_hot";
    case Encoding::BinaryAscending: return "binary_ascending";
    case Encoding::BinaryDescending: return "binary_descending";
  }
  return "?";
}

Encoding encoding_from_string(std::string_view s) {
  if (s == "one_hot") return Encoding::OneHot;
  if (s == "binary_ascending") return Encoding::BinaryAscending;
  if (s == "binary_descending") return Encoding::BinaryDescending;
  throw ValidationError("unknown encoding '" + std::string(s) + "'");
}

int bits_per_channel(int n_ch) {
  if (n_ch < 1) throw ValidationError("n_ch must be positive");
  int b = 0;
  while ((std::int64_t{1} << b) < n_ch) ++b;
  return b;
}

int slots_per_ap(Encoding e, int n_ch) {
  return e == Encoding::OneHot ? n_ch : bits_per_channel(n_ch);
}

std::uint32_t codeword_value(int c, int n_ch, Encoding e) {
  if (!is_binary(e)) throw ValidationError("codewords require a binary encoding");
  if (c < 1 || c > n_ch) {
    throw ValidationError("channel " + std::to_string(c) + " out of range 1.." +
                          std::to_string(n_ch));
  }
  const std::uint32_t modulus = std::uint32_t{1} << bits_per_channel(n_ch);
  const std::uint32_t raw = e == Encoding::BinaryAscending
                                ? static_cast<std::uint32_t>(c - 1)
                                : static_cast<std::uint32_t>(n_ch - c + 1);
  return raw % modulus;
}

BitVector channel_codeword(int c, int n_ch, Encoding e) {
  const auto value = codeword_value(c, n_ch, e);
  const int nb = bits_per_channel(n_ch);
  BitVector bits(nb);
  for (int r = 0; r < nb; ++r) bits[r] = static_cast<std::uint8_t>((value >> (nb - 1 - r)) & 1U);
  return bits;
}

BinaryPolynomial codeword_indicator(int ap, std::uint32_t value, int n_b,
                                    std::size_t n_vars) {
  BinaryPolynomial p = BinaryPolynomial::constant(n_vars, 1.0);
  for (int r = 0; r < n_b; ++r) {
    const auto var = static_cast<std::uint32_t>(ap * n_b + r);
    const bool bit = (value >> (n_b - 1 - r)) & 1U;
    // 1 - b + (2b - 1) x
    BinaryPolynomial factor(n_vars);
    if (bit) {
      factor.add_term({var}, 1.0);
    } else {
      factor.add_term({}, 1.0);
      factor.add_term({var}, -1.0);
    }
    p = p * factor;
  }
  return p;
}

BinaryPolynomial channel_indicator(int ap, int c, int n_ap, int n_ch, Encoding e) {
  if (ap < 0 || ap >= n_ap) throw ValidationError("AP index out of range");
  const int nb = bits_per_channel(n_ch);
  return codeword_indicator(ap, codeword_value(c, n_ch, e), nb,
                            static_cast<std::size_t>(n_ap) * nb);
}

std::vector<std::uint32_t> unused_codewords(int n_ch, Encoding e) {
  const std::uint32_t size = std::uint32_t{1} << bits_per_channel(n_ch);
  std::vector<bool> used(size, false);
  for (int c = 1; c <= n_ch; ++c) used[codeword_value(c, n_ch, e)] = true;
  std::vector<std::uint32_t> out;
  for (std::uint32_t v = 0; v < size; ++v) {
    if (!used[v]) out.push_back(v);
  }
  return out;
}

namespace {

void check_penalty(double w) {
  if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("penalty weight must be positive");
}

// Rewrites a local monomial (indices into the pair's 2*slots variables)
// into flat indices for APs (first, second).
Monomial place(const Monomial& local, int slots, int first, int second) {
  Monomial out;
  out.reserve(local.size());
  for (auto v : local) {
    const int s = static_cast<int>(v);
    out.push_back(static_cast<std::uint32_t>(s < slots ? first * slots + s
                                                       : second * slots + (s - slots)));
  }
  return out;
}

}  // namespace

SeparableObjective qubo_structure(int n_ch, const CoeffTable& table, double w) {
  check_penalty(w);
  if (n_ch < 1) throw ValidationError("n_ch must be positive");
  SeparableObjective s;
  s.encoding = Encoding::OneHot;
  s.n_ap = table.n_ap();
  s.n_ch = n_ch;
  s.slots = n_ch;
  s.penalty = w;
  s.table = table;
  s.pair = BinaryPolynomial(2 * static_cast<std::size_t>(n_ch));
  for (int c = 0; c < n_ch; ++c) {
    s.pair.add_term({static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(n_ch + c)}, 1.0);
  }
  // (sum_c x_c - 1)^2 with x^2 = x
  BinaryPolynomial row = BinaryPolynomial::constant(n_ch, -1.0);
  for (int c = 0; c < n_ch; ++c) row.add_term({static_cast<std::uint32_t>(c)}, 1.0);
  s.single = row * row;
  s.single.widen(n_ch);
  return s;
}

SeparableObjective hubo_structure(int n_ch, const CoeffTable& table, Encoding e,
                                  double w_prime) {
  check_penalty(w_prime);
  if (!is_binary(e)) throw ValidationError("HUBO requires a binary encoding");
  if (n_ch < 2) throw ValidationError("HUBO requires n_ch >= 2");
  const int nb = bits_per_channel(n_ch);
  SeparableObjective s;
  s.encoding = e;
  s.n_ap = table.n_ap();
  s.n_ch = n_ch;
  s.slots = nb;
  s.penalty = w_prime;
  s.table = table;
  // Local AP 0 = first half of the pair, local AP 1 = second half.
  s.pair = BinaryPolynomial(2 * static_cast<std::size_t>(nb));
  for (int c = 1; c <= n_ch; ++c) {
    const auto v = codeword_value(c, n_ch, e);
    s.pair += codeword_indicator(0, v, nb, 2 * nb) * codeword_indicator(1, v, nb, 2 * nb);
  }
  s.single = BinaryPolynomial(nb);
  for (auto v : unused_codewords(n_ch, e)) s.single += codeword_indicator(0, v, nb, nb);
  return s;
}

BinaryPolynomial materialize(const SeparableObjective& s) {
  BinaryPolynomial out(s.n_vars());
  for (int i = 0; i < s.n_ap; ++i) {
    for (int k = i + 1; k < s.n_ap; ++k) {
      const double d = s.table.d(i, k);
      for (const auto& [local, coeff] : s.pair.terms()) {
        out.add_term(place(local, s.slots, i, k), d * coeff);
      }
    }
  }
  for (int i = 0; i < s.n_ap; ++i) {
    for (const auto& [local, coeff] : s.single.terms()) {
      out.add_term(place(local, s.slots, i, i), s.penalty * coeff);
    }
  }
  return out;
}

TermSummary summarize_terms(const SeparableObjective& s) {
  const auto slots = static_cast<std::uint32_t>(s.slots);
  TermSummary out;
  auto& hist = out.histogram;
  hist.assign(2 * static_cast<std::size_t>(s.slots) + 1, 0);
  auto record = [&out](std::size_t degree, double coeff) {
    if (std::abs(coeff) <= kCoefficientTolerance) return;
    ++out.histogram[degree];
    out.min_coeff = std::min(out.min_coeff, coeff);
    out.max_coeff = std::max(out.max_coeff, coeff);
  };

  // Split the pair polynomial by which side(s) a term touches.
  std::vector<std::pair<int, double>> cross;
  std::map<Monomial, double, GradedLex> left, right;
  double pair_const = 0.0;
  for (const auto& [local, coeff] : s.pair.terms()) {
    Monomial a, b;
    for (auto v : local) (v < slots ? a : b).push_back(v < slots ? v : v - slots);
    if (!a.empty() && !b.empty()) {
      cross.emplace_back(static_cast<int>(local.size()), coeff);
    } else if (!a.empty()) {
      left[a] += coeff;
    } else if (!b.empty()) {
      right[b] += coeff;
    } else {
      pair_const += coeff;
    }
  }

  std::map<Monomial, double, GradedLex> single_terms;
  double single_const = 0.0;
  for (const auto& [local, coeff] : s.single.terms()) {
    if (local.empty()) {
      single_const += coeff;
    } else {
      single_terms[local] += coeff;
    }
  }

  // Cross terms only get scaled by D_ik, so per pair it is enough to count
  // the survivors of each degree above tol / |D_ik|.
  std::map<int, std::vector<double>> cross_abs;
  double cross_lo = 0.0, cross_hi = 0.0;
  for (const auto& [deg, coeff] : cross) {
    cross_abs[deg].push_back(std::abs(coeff));
    cross_lo = std::min(cross_lo, coeff);
    cross_hi = std::max(cross_hi, coeff);
  }
  for (auto& [deg, v] : cross_abs) std::sort(v.begin(), v.end());

  double constant = 0.0;
  for (int i = 0; i < s.n_ap; ++i) {
    for (int k = i + 1; k < s.n_ap; ++k) {
      const double d = s.table.d(i, k);
      constant += d * pair_const;
      if (d == 0.0) continue;
      const double cut = kCoefficientTolerance / std::abs(d);
      for (const auto& [deg, v] : cross_abs) {
        hist[static_cast<std::size_t>(deg)] +=
            v.end() - std::upper_bound(v.begin(), v.end(), cut);
      }
      for (double c : {d * cross_lo, d * cross_hi}) {
        if (std::abs(c) <= kCoefficientTolerance) continue;
        out.min_coeff = std::min(out.min_coeff, c);
        out.max_coeff = std::max(out.max_coeff, c);
      }
    }
  }
  constant += s.penalty * single_const * s.n_ap;
  record(0, constant);
  out.constant = std::abs(constant) > kCoefficientTolerance ? constant : 0.0;

  std::map<Monomial, int, GradedLex> supports;
  for (const auto& m : {std::cref(left), std::cref(right), std::cref(single_terms)}) {
    for (const auto& [mono, coeff] : m.get()) supports[mono] = 0;
  }
  auto lookup = [](const std::map<Monomial, double, GradedLex>& m, const Monomial& key) {
    auto it = m.find(key);
    return it == m.end() ? 0.0 : it->second;
  };
  for (int i = 0; i < s.n_ap; ++i) {
    // AP i is the first member of pairs (i, k>i) and the second of (k<i, i).
    double d_as_first = 0.0, d_as_second = 0.0;
    for (int k = 0; k < s.n_ap; ++k) {
      if (k > i) d_as_first += s.table.d(i, k);
      if (k < i) d_as_second += s.table.d(k, i);
    }
    for (const auto& [mono, unused] : supports) {
      const double coeff = d_as_first * lookup(left, mono) +
                           d_as_second * lookup(right, mono) +
                           s.penalty * lookup(single_terms, mono);
      record(mono.size(), coeff);
    }
  }
  while (hist.size() > 1 && hist.back() == 0) hist.pop_back();
  return out;
}

std::vector<std::int64_t> term_histogram(const SeparableObjective& s) {
  return summarize_terms(s).histogram;
}

double objective_upper_bound(const SeparableObjective& s) {
  const int n = s.n_ap;
  if (s.encoding == Encoding::OneHot) {
    const double row = std::max(1.0, std::pow(s.n_ch - 1.0, 2));
    return s.n_ch * s.table.d_sum + s.penalty * n * row;
  }
  std::vector<double> d;
  for (int i = 0; i < n; ++i) {
    for (int k = i + 1; k < n; ++k) d.push_back(s.table.d(i, k));
  }
  std::sort(d.begin(), d.end(), std::greater<>());
  std::vector<double> prefix(d.size() + 1, 0.0);
  for (std::size_t j = 0; j < d.size(); ++j) prefix[j + 1] = prefix[j] + d[j];
  const int max_invalid = unused_codewords(s.n_ch, s.encoding).empty() ? 0 : n;
  double best = 0.0;
  for (int j = 0; j <= max_invalid; ++j) {
    const std::int64_t valid = n - j;
    const auto pairs = static_cast<std::size_t>(valid * (valid - 1) / 2);
    best = std::max(best, prefix[pairs] + j * s.penalty);
  }
  return best;
}

std::size_t Formulation::var_index(int ap, int slot) const {
  if (ap < 0 || ap >= n_ap || slot < 0 || slot >= slots_per_ap) {
    throw ValidationError("variable (ap, slot) out of range");
  }
  return static_cast<std::size_t>(ap) * slots_per_ap + slot;
}

namespace {

Formulation from_structure(const SeparableObjective& s) {
  Formulation f;
  f.encoding = s.encoding;
  f.n_ap = s.n_ap;
  f.n_ch = s.n_ch;
  f.slots_per_ap = s.slots;
  f.penalty = s.penalty;
  f.objective = materialize(s);
  f.value_lower_bound = 0.0;
  f.value_upper_bound = objective_upper_bound(s);
  return f;
}

}  // namespace

Formulation build_qubo(int n_ch, const CoeffTable& table, double w) {
  return from_structure(qubo_structure(n_ch, table, w));
}

Formulation build_qubo(const CapInstance& inst, double w) {
  return build_qubo(inst.n_ch, coeff_table(inst), w);
}

Formulation build_hubo(int n_ch, const CoeffTable& table, Encoding e, double w_prime) {
  return from_structure(hubo_structure(n_ch, table, e, w_prime));
}

Formulation build_hubo(const CapInstance& inst, Encoding e, double w_prime) {
  return build_hubo(inst.n_ch, coeff_table(inst), e, w_prime);
}

Decoded decode(const Formulation& f, std::span<const std::uint8_t> x) {
  if (x.size() != static_cast<std::size_t>(f.n_ap) * f.slots_per_ap) {
    throw ValidationError("bit vector length does not match the formulation");
  }
  Decoded out;
  std::vector<int> assign(f.n_ap, 0);
  for (int i = 0; i < f.n_ap; ++i) {
    const auto row = x.subspan(static_cast<std::size_t>(i) * f.slots_per_ap, f.slots_per_ap);
    if (f.encoding == Encoding::OneHot) {
      const int ones = static_cast<int>(std::count(row.begin(), row.end(), 1));
      if (ones != 1) {
        out.violations.push_back("AP " + std::to_string(i + 1) + ": row has " +
                                 std::to_string(ones) + " ones, expected one-hot");
        continue;
      }
      assign[i] = static_cast<int>(std::find(row.begin(), row.end(), 1) - row.begin()) + 1;
      continue;
    }
    std::uint32_t value = 0;
    for (auto b : row) value = (value << 1) | (b & 1U);
    int channel = 0;
    for (int c = 1; c <= f.n_ch; ++c) {
      if (codeword_value(c, f.n_ch, f.encoding) == value) channel = c;
    }
    if (channel == 0) {
      const long long nominal = f.encoding == Encoding::BinaryAscending
                                    ? static_cast<long long>(value) + 1
                                    : static_cast<long long>(f.n_ch) - value + 1;
      out.violations.push_back("AP " + std::to_string(i + 1) + ": nonexistent channel " +
                               std::to_string(nominal));
      continue;
    }
    assign[i] = channel;
  }
  if (out.violations.empty()) out.assignment = std::move(assign);
  return out;
}

BitVector encode(const Formulation& f, std::span<const int> assign) {
  if (static_cast<int>(assign.size()) != f.n_ap) {
    throw ValidationError("assignment length must equal n_ap");
  }
  BitVector x(static_cast<std::size_t>(f.n_ap) * f.slots_per_ap, 0);
  for (int i = 0; i < f.n_ap; ++i) {
    const int c = assign[i];
    if (c < 1 || c > f.n_ch) throw ValidationError("channel index out of range");
    if (f.encoding == Encoding::OneHot) {
      x[f.var_index(i, c - 1)] = 1;
    } else {
      const auto word = channel_codeword(c, f.n_ch, f.encoding);
      for (int r = 0; r < f.slots_per_ap; ++r) x[f.var_index(i, r)] = word[r];
    }
  }
  return x;
}

Quadratized quadratize(const BinaryPolynomial& p, std::optional<double> scale) {
  double factor = 0.0;
  if (scale) {
    if (!(*scale > 0.0)) throw ValidationError("quadratization scale must be positive");
    factor = *scale;
  } else {
    // Making every aux consistent costs at most the summed |c| of the
    // reduced terms, so this factor never lets a violation pay off.
    factor = 1.0;
    for (const auto& [support, coeff] : p.terms()) {
      if (support.size() >= 3) factor += std::abs(coeff);
    }
  }

  Quadratized q;
  BinaryPolynomial cur = p;
  auto next_var = static_cast<std::uint32_t>(p.n_vars());
  while (cur.degree() > 2) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::int64_t> freq;
    for (const auto& [support, coeff] : cur.terms()) {
      if (support.size() < 3) continue;
      for (std::size_t a = 0; a < support.size(); ++a) {
        for (std::size_t b = a + 1; b < support.size(); ++b) ++freq[{support[a], support[b]}];
      }
    }
    auto best = freq.begin();
    for (auto it = freq.begin(); it != freq.end(); ++it) {
      if (it->second > best->second) best = it;  // map order gives the lexicographic tie-break
    }
    const auto [a, b] = best->first;
    const std::uint32_t y = next_var++;
    q.aux_map.push_back({a, b, y});

    BinaryPolynomial next(next_var);
    for (const auto& [support, coeff] : cur.terms()) {
      const bool has_pair = support.size() >= 3 &&
                            std::binary_search(support.begin(), support.end(), a) &&
                            std::binary_search(support.begin(), support.end(), b);
      if (!has_pair) {
        next.add_term(support, coeff);
        continue;
      }
      Monomial reduced;
      for (auto v : support) {
        if (v != a && v != b) reduced.push_back(v);
      }
      reduced.push_back(y);
      next.add_term(std::move(reduced), coeff);
    }
    next.add_term({a, b}, factor);
    next.add_term({a, y}, -2.0 * factor);
    next.add_term({b, y}, -2.0 * factor);
    next.add_term({y}, 3.0 * factor);
    cur = std::move(next);
  }
  cur.widen(next_var);
  q.poly = std::move(cur);
  return q;
}

BitVector extend_with_aux(const Quadratized& q, std::span<const std::uint8_t> x) {
  BitVector out(q.poly.n_vars(), 0);
  if (x.size() > out.size()) throw ValidationError("bit vector longer than quadratized poly");
  std::copy(x.begin(), x.end(), out.begin());
  for (const auto& aux : q.aux_map) out[aux.aux] = out[aux.first] & out[aux.second];
  return out;
}

VariableCounts variable_counts(int n_ap, int n_ch) {
  if (n_ap < 1) throw ValidationError("n_ap must be positive");
  if (n_ch < 2) throw ValidationError("variable counts require n_ch >= 2");
  const std::int64_t nb = bits_per_channel(n_ch);
  VariableCounts v;
  v.n = static_cast<std::int64_t>(n_ap) * n_ch;
  v.n_prime = n_ap * nb;
  v.n_double_prime = n_ap * ((std::int64_t{1} << nb) - 1);
  v.log2_search_space = n_ap * std::log2(static_cast<double>(n_ch));
  return v;
}

std::string export_formulation(const Formulation& f) {
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "{\"encoding\": \"%s\", \"n_vars\": %zu, \"penalty\": %.17g}\n",
                std::string(to_string(f.encoding)).c_str(), f.n_vars(), f.penalty);
  return buf + f.objective.dump();
}

}  // namespace gascap
