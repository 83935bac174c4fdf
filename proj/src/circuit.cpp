#include "gascap/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gascap/errors.hpp"

namespace gascap {

namespace {

// Smallest b >= 0 with 2^b >= x (x >= 1).
int ceil_log2(std::int64_t x) {
  int b = 0;
  while ((std::int64_t{1} << b) < x) ++b;
  return b;
}

bool coefficient_fits(double a, int m) {
  const double half = std::ldexp(1.0, m - 1);
  return a >= -half && a < half;
}

// Smallest m >= 1 satisfying the coefficient condition for every term.
int coefficient_width(const BinaryPolynomial& p) {
  int m = 1;
  for (const auto& [support, coeff] : p.terms()) {
    while (!coefficient_fits(coeff, m)) ++m;
  }
  return m;
}

void append_phase_block(CircuitSpec& c, double a, const Monomial& support) {
  const int m = c.m_val;
  const double theta = 2.0 * std::numbers::pi * a / std::ldexp(1.0, m);
  std::vector<int> controls(support.begin(), support.end());
  for (int j = 0; j < m; ++j) {
    Gate g;
    g.kind = controls.empty() ? GateKind::R : GateKind::CR;
    g.theta = std::ldexp(theta, m - 1 - j);
    g.controls = controls;
    g.target = c.value_qubit(j);
    c.gates.push_back(std::move(g));
  }
}

}  // namespace

CircuitSpec CircuitSpec::inverse() const {
  CircuitSpec inv{n_key, m_val, {}};
  inv.gates.reserve(gates.size());
  for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
    Gate g = *it;
    switch (g.kind) {
      case GateKind::R:
      case GateKind::CR: g.theta = -g.theta; break;
      case GateKind::IQFT: g.kind = GateKind::QFT; break;
      case GateKind::QFT: g.kind = GateKind::IQFT; break;
      default: break;
    }
    inv.gates.push_back(std::move(g));
  }
  return inv;
}

void CircuitSpec::append(const CircuitSpec& other) {
  if (other.n_key != n_key || other.m_val != m_val) {
    throw ValidationError("cannot append circuits with different register widths");
  }
  gates.insert(gates.end(), other.gates.begin(), other.gates.end());
}

int value_register_width(const BinaryPolynomial& p, double lower, double upper) {
  if (lower > upper) throw ValidationError("value bounds are inverted");
  int m = coefficient_width(p);
  while (!(lower >= -std::ldexp(1.0, m - 1) && upper < std::ldexp(1.0, m - 1))) ++m;
  return m;
}

int value_register_width(const BinaryPolynomial& p) {
  const auto s = stats(p);
  return value_register_width(p, s.min_value_bound, s.max_value_bound);
}

int cap_value_register_width(const Formulation& f) {
  int m = coefficient_width(f.objective);
  while (f.value_upper_bound > std::ldexp(1.0, m - 1) ||
         f.value_lower_bound < -std::ldexp(1.0, m - 1)) {
    ++m;
  }
  return m;
}

int cap_value_register_width(const SeparableObjective& s) {
  const auto terms = summarize_terms(s);
  const double upper = objective_upper_bound(s);
  int m = 1;
  while (!coefficient_fits(terms.min_coeff, m) || !coefficient_fits(terms.max_coeff, m) ||
         upper > std::ldexp(1.0, m - 1)) {
    ++m;
  }
  return m;
}

std::int64_t closed_form_qubits(int n_ap, int n_ch, double d_sum, double w,
                                Encoding kind) {
  if (!(d_sum > 0.0)) throw ValidationError("d_sum must be positive");
  const auto counts = variable_counts(n_ap, n_ch);
  if (kind == Encoding::OneHot) {
    const double max_e = n_ch * d_sum + w * n_ap * std::pow(n_ch - 1.0, 2);
    return counts.n + static_cast<std::int64_t>(std::ceil(std::log2(max_e))) + 1;
  }
  return counts.n_prime + static_cast<std::int64_t>(std::ceil(std::log2(d_sum))) + 1;
}

CircuitSpec build_state_prep(const BinaryPolynomial& p, double y, int m) {
  if (m < 1) throw ValidationError("value register needs at least one qubit");
  CircuitSpec c{static_cast<int>(p.n_vars()), m, {}};
  for (int q = 0; q < c.total_qubits(); ++q) c.gates.push_back({GateKind::H, 0.0, {}, q});

  auto check = [m](double a) {
    if (!coefficient_fits(a, m)) {
      throw ValidationError("coefficient " + std::to_string(a) +
                            " is not representable with m = " + std::to_string(m));
    }
  };
  // The constant term and -y share one uncontrolled block.
  const double shifted = p.constant_term() - y;
  if (std::abs(shifted) > kCoefficientTolerance) {
    check(shifted);
    append_phase_block(c, shifted, {});
  }
  for (const auto& [support, coeff] : p.terms()) {
    if (support.empty()) continue;
    check(coeff);
    append_phase_block(c, coeff, support);
  }
  c.gates.push_back({GateKind::IQFT, 0.0, {}, -1});
  return c;
}

CircuitSpec build_oracle(int n_key, int m_val) {
  CircuitSpec c{n_key, m_val, {}};
  c.gates.push_back({GateKind::Z, 0.0, {}, c.sign_qubit()});
  return c;
}

CircuitSpec build_grover(const BinaryPolynomial& p, double y, int m) {
  const CircuitSpec a = build_state_prep(p, y, m);
  CircuitSpec g = build_oracle(a.n_key, a.m_val);
  g.append(a.inverse());
  g.gates.push_back({GateKind::Diffusion, 0.0, {}, -1});
  g.append(a);
  return g;
}

std::int64_t cnot_cost(int arity) {
  if (arity <= 0) return 0;
  if (arity == 1) return 2;
  return 6 * static_cast<std::int64_t>(arity - 1);
}

ResourceReport enumerate_resources(const CircuitSpec& c) {
  ResourceReport r;
  r.n_key = c.n_key;
  r.m_val = c.m_val;
  int max_arity = 0;
  for (const auto& g : c.gates) {
    switch (g.kind) {
      case GateKind::H: ++r.h; break;
      case GateKind::R: ++r.r; break;
      case GateKind::CR:
        ++r.cr_by_arity[g.arity()];
        max_arity = std::max(max_arity, g.arity());
        break;
      case GateKind::IQFT: ++r.iqft; break;
      case GateKind::QFT: ++r.qft; break;
      case GateKind::Z: ++r.z; break;
      case GateKind::Diffusion: ++r.diffusion; break;
    }
  }
  for (const auto& [arity, count] : r.cr_by_arity) r.cnot += count * cnot_cost(arity);
  r.ancillae = std::max(0, max_arity - 1);
  return r;
}

ResourceReport cap_state_prep_resources(const SeparableObjective& s, int m) {
  const auto hist = summarize_terms(s).histogram;
  ResourceReport r;
  r.n_key = static_cast<int>(s.n_vars());
  r.m_val = m;
  r.h = r.n_key + m;
  r.iqft = 1;
  if (!hist.empty() && hist[0] > 0) r.r = m;
  int max_arity = 0;
  for (std::size_t k = 1; k < hist.size(); ++k) {
    if (hist[k] == 0) continue;
    r.cr_by_arity[static_cast<int>(k)] = hist[k] * m;
    max_arity = static_cast<int>(k);
  }
  for (const auto& [arity, count] : r.cr_by_arity) r.cnot += count * cnot_cost(arity);
  r.ancillae = std::max(0, max_arity - 1);
  return r;
}

std::int64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t out = 1;
  for (std::int64_t j = 1; j <= k; ++j) out = out * (n - k + j) / j;
  return out;
}

ClosedFormCounts closed_form_resources(int n_ap, int n_ch, Encoding kind) {
  if (n_ap < 2 || n_ch < 2) throw ValidationError("closed forms need n_ap, n_ch >= 2");
  ClosedFormCounts out;
  const std::int64_t pairs = binomial(n_ap, 2);
  if (kind == Encoding::OneHot) {
    const int beta = ceil_log2(n_ch * pairs +
                               static_cast<std::int64_t>(n_ap) * (n_ch - 1) * (n_ch - 1)) + 1;
    out.m = beta;
    out.h = static_cast<std::int64_t>(n_ap) * n_ch + beta;
    out.r = beta;
    out.cr_by_arity[1] = static_cast<std::int64_t>(n_ap) * n_ch * beta;
    out.cr_by_arity[2] = (n_ch * pairs + n_ap * binomial(n_ch, 2)) * beta;
  } else {
    const std::int64_t nb = bits_per_channel(n_ch);
    const int beta = ceil_log2(pairs) + 1;
    out.m = beta;
    out.h = n_ap * nb + beta;
    out.r = beta;
    out.cr_by_arity[1] = n_ap * nb * beta;
    out.cr_by_arity[2] = binomial(n_ap * nb, 2) * beta;
    for (std::int64_t k = 3; k <= 2 * nb; ++k) {
      std::int64_t count = pairs * binomial(2 * nb, k);
      if (k <= nb) count -= static_cast<std::int64_t>(n_ap) * (n_ap - 2) * binomial(nb, k);
      out.cr_by_arity[static_cast<int>(k)] = count * beta;
    }
  }
  for (const auto& [arity, count] : out.cr_by_arity) out.cnot += count * cnot_cost(arity);
  return out;
}

}  // namespace gascap
