#pragma once

// Grover-adaptive-search circuits for a binary polynomial: the state
// preparation A_y, the sign-bit oracle, the diffusion reflection and the
// composed Grover operator, plus gate/CNOT resource reports.
//
// Qubit numbering: 0..n_key-1 are the key register (qubit j carries x_j);
// n_key..n_key+m_val-1 are the value register, value qubit 0 (global
// qubit n_key) being the most significant, i.e. two's-complement sign bit.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gascap/formulation.hpp"
#include "gascap/polynomial.hpp"

namespace gascap {

enum class GateKind {
  H,          // Hadamard on `target`
  R,          // phase e^{i theta} on |1> of `target`
  CR,         // R(theta) on `target`, controlled by every qubit in `controls`
  IQFT,       // inverse QFT over the value register
  QFT,        // its adjoint, used by A_y^dagger
  Z,          // Pauli Z on `target`
  Diffusion,  // 2|0><0| - I over the full register
};

struct Gate {
  GateKind kind = GateKind::H;
  double theta = 0.0;
  std::vector<int> controls;
  int target = -1;

  int arity() const { return static_cast<int>(controls.size()); }
};

struct CircuitSpec {
  int n_key = 0;
  int m_val = 0;
  std::vector<Gate> gates;  // in application order

  int total_qubits() const { return n_key + m_val; }
  int value_qubit(int j) const { return n_key + j; }
  int sign_qubit() const { return n_key; }

  /// Gate-wise adjoint in reverse order.
  CircuitSpec inverse() const;
  void append(const CircuitSpec& other);
};

/// Smallest m >= 1 with -2^{m-1} <= a < 2^{m-1} for every coefficient a
/// and -2^{m-1} <= lower <= upper < 2^{m-1}.
int value_register_width(const BinaryPolynomial& p, double lower, double upper);

/// As above with the interval-arithmetic bounds from stats(p).
int value_register_width(const BinaryPolynomial& p);

/// Register width for a CAP objective, from its closed-form range:
/// smallest m with upper <= 2^{m-1} (combined with the coefficient
/// condition). Since every CAP objective is positive when n_ch < n_ap,
/// every threshold y in (0, upper] leaves E(x) - y representable.
int cap_value_register_width(const Formulation& f);
/// The same width from the separable structure, without materializing.
int cap_value_register_width(const SeparableObjective& s);

/// Qubit total n + m from the closed forms for one-hot (QUBO) and binary
/// (HUBO) formulations.
std::int64_t closed_form_qubits(int n_ap, int n_ch, double d_sum, double w,
                                Encoding kind);

/// A_y for p - y with an m-qubit value register. Throws ValidationError if
/// a coefficient (the constant merged with -y included) falls outside
/// [-2^{m-1}, 2^{m-1}).
CircuitSpec build_state_prep(const BinaryPolynomial& p, double y, int m);

/// Z on the sign qubit.
CircuitSpec build_oracle(int n_key, int m_val);

/// G = A_y D A_y^dagger O, listed in application order (O first).
CircuitSpec build_grover(const BinaryPolynomial& p, double y, int m);

/// CNOTs for one controlled phase with `arity` controls: 2 for one
/// control, 6(k - 1) for k >= 2, 0 for an uncontrolled R.
std::int64_t cnot_cost(int arity);

struct ClosedFormCounts {
  std::int64_t h = 0;
  std::int64_t r = 0;
  std::int64_t iqft = 1;
  std::map<int, std::int64_t> cr_by_arity;
  std::int64_t cnot = 0;
  int m = 0;  // beta or beta'
};

struct ResourceReport {
  int n_key = 0;
  int m_val = 0;
  std::int64_t h = 0;
  std::int64_t r = 0;  // uncontrolled phase gates
  std::int64_t iqft = 0;
  std::int64_t qft = 0;
  std::int64_t z = 0;
  std::int64_t diffusion = 0;
  std::map<int, std::int64_t> cr_by_arity;  // controls -> count
  std::int64_t cnot = 0;
  int ancillae = 0;  // max arity - 1, needed by the k-CR decomposition
  std::optional<ClosedFormCounts> closed_form;

  std::int64_t cr(int arity) const {
    auto it = cr_by_arity.find(arity);
    return it == cr_by_arity.end() ? 0 : it->second;
  }
};

ResourceReport enumerate_resources(const CircuitSpec& c);

/// The same report A_y would produce for a CAP objective, counted from its
/// separable structure so sizes far beyond materialization remain cheap.
/// y = 0 (the constant term gets its own uncontrolled block).
ResourceReport cap_state_prep_resources(const SeparableObjective& s, int m);

/// Closed-form gate counts under the normalization D_ik = w = 1.
ClosedFormCounts closed_form_resources(int n_ap, int n_ch, Encoding kind);

std::int64_t binomial(std::int64_t n, std::int64_t k);

}  // namespace gascap
