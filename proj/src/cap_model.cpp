#include "gascap/cap_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "gascap/errors.hpp"

namespace gascap {

namespace {

void check_ap(const CapInstance& inst, int i) {
  if (i < 0 || i >= inst.n_ap) {
    throw ValidationError("AP index " + std::to_string(i) + " out of range");
  }
}

// Received power at AP `at` summed over the UTs of AP `from`.
double received(const CapInstance& inst, int at, int from) {
  double sum = 0.0;
  for (int u : inst.assoc[from]) {
    sum += std::pow(inst.distances[at][u], -inst.alpha);
  }
  return sum;
}

}  // namespace

std::vector<std::string> validate(const CapInstance& inst) {
  if (inst.n_ap <= 0) throw ValidationError("n_ap must be positive");
  if (inst.n_ch <= 0) throw ValidationError("n_ch must be positive");
  if (!(inst.alpha > 0.0)) throw ValidationError("alpha must be positive");
  if (!(inst.epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  if (static_cast<int>(inst.distances.size()) != inst.n_ap) {
    throw ValidationError("distance matrix must have one row per AP");
  }
  const int n_ut = inst.n_ut();
  for (const auto& row : inst.distances) {
    if (static_cast<int>(row.size()) != n_ut) {
      throw ValidationError("distance matrix rows differ in length");
    }
    for (double v : row) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw ValidationError("distances must be finite and strictly positive");
      }
    }
  }
  if (static_cast<int>(inst.assoc.size()) != inst.n_ap) {
    throw ValidationError("assoc must have one UT set per AP");
  }
  std::vector<int> owner(n_ut, -1);
  for (int i = 0; i < inst.n_ap; ++i) {
    if (inst.assoc[i].empty()) {
      throw ValidationError("AP " + std::to_string(i) + " has no associated UT");
    }
    for (int u : inst.assoc[i]) {
      if (u < 0 || u >= n_ut) {
        throw ValidationError("UT index " + std::to_string(u) + " out of range");
      }
      if (owner[u] != -1) {
        throw ValidationError("UT " + std::to_string(u) +
                              " is associated with more than one AP");
      }
      owner[u] = i;
    }
  }
  for (int u = 0; u < n_ut; ++u) {
    if (owner[u] == -1) {
      throw ValidationError("UT " + std::to_string(u) + " has no AP");
    }
  }
  std::vector<std::string> warnings;
  if (inst.n_ch >= inst.n_ap) {
    warnings.emplace_back(
        "n_ch >= n_ap: an interference-free assignment exists trivially");
  }
  return warnings;
}

CoeffTable CoeffTable::uniform(int n_ap, double value) {
  CoeffTable t;
  t.c = PairMatrix(n_ap, 0.0);
  t.d = PairMatrix(n_ap, 0.0);
  t.c_min = 0.0;
  for (int i = 0; i < n_ap; ++i) {
    for (int k = i + 1; k < n_ap; ++k) {
      t.d.set(i, k, value);
      t.d_sum += value;
    }
  }
  return t;
}

double interference_coeff(const CapInstance& inst, int i, int k) {
  check_ap(inst, i);
  check_ap(inst, k);
  if (i == k) throw ValidationError("interference_coeff requires i != k");
  if (inst.assoc[i].empty() || inst.assoc[k].empty()) {
    throw ValidationError("empty association set");
  }
  // Evaluate with the smaller index first so C_ik == C_ki bit for bit.
  if (k < i) std::swap(i, k);
  const double sir_i = received(inst, i, i) / received(inst, i, k);
  const double sir_k = received(inst, k, k) / received(inst, k, i);
  return -std::log2(1.0 + sir_i) - std::log2(1.0 + sir_k);
}

CoeffTable coeff_table(const CapInstance& inst) {
  validate(inst);
  CoeffTable t;
  t.c = PairMatrix(inst.n_ap, 0.0);
  t.d = PairMatrix(inst.n_ap, 0.0);
  t.c_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < inst.n_ap; ++i) {
    for (int k = i + 1; k < inst.n_ap; ++k) {
      const double c = interference_coeff(inst, i, k);
      t.c.set(i, k, c);
      t.c_min = std::min(t.c_min, c);
    }
  }
  if (inst.n_ap < 2) t.c_min = 0.0;
  for (int i = 0; i < inst.n_ap; ++i) {
    for (int k = i + 1; k < inst.n_ap; ++k) {
      const double d = t.c(i, k) - t.c_min + inst.epsilon;
      t.d.set(i, k, d);
      t.d_sum += d;
    }
  }
  return t;
}

double assignment_interference(const CoeffTable& table, int n_ch,
                               std::span<const int> assign) {
  const int n_ap = table.n_ap();
  if (static_cast<int>(assign.size()) != n_ap) {
    throw ValidationError("assignment length must equal n_ap");
  }
  for (int c : assign) {
    if (c < 1 || c > n_ch) {
      throw ValidationError("channel index " + std::to_string(c) +
                            " out of range 1.." + std::to_string(n_ch));
    }
  }
  double sum = 0.0;
  for (int i = 0; i < n_ap; ++i) {
    for (int k = i + 1; k < n_ap; ++k) {
      if (assign[i] == assign[k]) sum += table.d(i, k);
    }
  }
  return sum;
}

CapInstance appendix_a_instance() {
  CapInstance inst;
  inst.n_ap = 4;
  inst.n_ch = 3;
  inst.alpha = 1.0;
  inst.epsilon = 0.01;
  inst.distances = {
      {1, 1, 2, 4, 3, 5, 5, 8},
      {5, 4, 1, 1, 5, 4, 2, 4},
      {6, 5, 2, 5, 1, 1, 4, 6},
      {10, 8, 5, 2, 5, 3, 1, 1},
  };
  inst.assoc = {{0, 1}, {2, 3}, {4, 5}, {6, 7}};
  return inst;
}

CapInstance synthetic_instance(int n_ap, int n_ch, std::uint64_t seed,
                               int uts_per_ap, double alpha, double epsilon) {
  if (n_ap <= 0 || n_ch <= 0 || uts_per_ap <= 0) {
    throw ValidationError("synthetic instance sizes must be positive");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n_ut = n_ap * uts_per_ap;
  std::vector<std::pair<double, double>> ap(n_ap), ut(n_ut);
  for (auto& p : ap) p = {unit(rng), unit(rng)};
  for (auto& p : ut) p = {unit(rng), unit(rng)};

  CapInstance inst;
  inst.n_ap = n_ap;
  inst.n_ch = n_ch;
  inst.alpha = alpha;
  inst.epsilon = epsilon;
  inst.distances.assign(n_ap, std::vector<double>(n_ut));
  for (int i = 0; i < n_ap; ++i) {
    for (int u = 0; u < n_ut; ++u) {
      const double dx = ap[i].first - ut[u].first;
      const double dy = ap[i].second - ut[u].second;
      inst.distances[i][u] = std::max(std::hypot(dx, dy), 1e-9);
    }
  }
  inst.assoc.resize(n_ap);
  for (int i = 0; i < n_ap; ++i) {
    for (int j = 0; j < uts_per_ap; ++j) inst.assoc[i].push_back(i * uts_per_ap + j);
  }
  return inst;
}

CapInstance instance_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("instance JSON: ") + e.what());
  }
  CapInstance inst;
  try {
    inst.n_ap = j.at("n_ap").get<int>();
    inst.n_ch = j.at("n_ch").get<int>();
    inst.alpha = j.value("alpha", 1.0);
    inst.epsilon = j.value("epsilon", 0.01);
    inst.distances = j.at("distances").get<std::vector<std::vector<double>>>();
    inst.assoc = j.at("assoc").get<std::vector<std::vector<int>>>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("instance JSON: ") + e.what());
  }
  validate(inst);
  return inst;
}

std::string instance_to_json(const CapInstance& inst) {
  nlohmann::json j;
  j["n_ap"] = inst.n_ap;
  j["n_ch"] = inst.n_ch;
  j["alpha"] = inst.alpha;
  j["epsilon"] = inst.epsilon;
  j["distances"] = inst.distances;
  j["assoc"] = inst.assoc;
  return j.dump(2);
}

CapInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open instance file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return instance_from_json(ss.str());
}

}  // namespace gascap
