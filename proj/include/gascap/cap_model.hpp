#pragma once

// Channel assignment problem (CAP) instances and the pairwise interference
// coefficients that parameterize every objective.
//
// Indexing: APs and UTs are 0-based; channels are 1-based (1..n_ch), the
// same way assignments are written in the literature, e.g. (2, 1, 3, 2).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gascap {

struct CapInstance {
  int n_ap = 0;
  int n_ch = 0;
  double alpha = 1.0;     // path-loss exponent
  double epsilon = 0.01;  // keeps every D_ik strictly positive
  // distances[i][u] is the distance between AP i and UT u.
  std::vector<std::vector<double>> distances;
  // assoc[i] lists the UTs served by AP i.
  std::vector<std::vector<int>> assoc;

  int n_ut() const {
    return distances.empty() ? 0 : static_cast<int>(distances.front().size());
  }
};

/// Checks structural validity and throws ValidationError on hard errors.
/// Soft findings (currently only n_ch >= n_ap) are returned as warnings.
std::vector<std::string> validate(const CapInstance& inst);

/// Dense symmetric matrix over AP pairs; the diagonal is unused.
class PairMatrix {
 public:
  PairMatrix() = default;
  explicit PairMatrix(int n, double fill = 0.0)
      : n_(n), data_(static_cast<std::size_t>(n) * n, fill) {}

  int size() const { return n_; }
  double operator()(int i, int k) const { return data_[idx(i, k)]; }
  void set(int i, int k, double v) {
    data_[idx(i, k)] = v;
    data_[idx(k, i)] = v;
  }

 private:
  std::size_t idx(int i, int k) const {
    return static_cast<std::size_t>(i) * n_ + k;
  }
  int n_ = 0;
  std::vector<double> data_;
};

struct CoeffTable {
  PairMatrix c;  // C_ik, log-ratio interference
  PairMatrix d;  // D_ik = C_ik - c_min + epsilon
  double c_min = 0.0;
  double d_sum = 0.0;  // sum of D_ik over i < k

  int n_ap() const { return d.size(); }

  /// Every D_ik equal to `value`; the normalization used for closed-form
  /// comparisons (C_ik = 0, epsilon = value).
  static CoeffTable uniform(int n_ap, double value = 1.0);
};

/// Log-ratio interference between APs i and k (i != k). Symmetric.
double interference_coeff(const CapInstance& inst, int i, int k);

CoeffTable coeff_table(const CapInstance& inst);

/// Sum of D_ik over co-channel AP pairs. `assign` holds one channel in
/// 1..n_ch per AP.
double assignment_interference(const CoeffTable& table, int n_ch,
                               std::span<const int> assign);

/// Four APs, three channels, eight UTs (two per AP), alpha = 1.
CapInstance appendix_a_instance();

/// APs and UTs uniform in the unit square, `uts_per_ap` UTs attached to
/// each AP, Euclidean distances. Deterministic in `seed`.
CapInstance synthetic_instance(int n_ap, int n_ch, std::uint64_t seed,
                               int uts_per_ap = 2, double alpha = 1.0,
                               double epsilon = 0.01);

CapInstance instance_from_json(const std::string& text);
std::string instance_to_json(const CapInstance& inst);
CapInstance load_instance(const std::string& path);

}  // namespace gascap
