#include "lglrr/eval.hpp"

#include "lglrr/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

namespace lglrr {

namespace {

// Remaps arbitrary label values to 0..k-1 (in sorted value order) and
// returns the count matrix: confusion(a, b) = #{ i : pred_i = a, truth_i = b },
// padded square so a bijection always exists.
std::vector<std::vector<std::int64_t>> confusion(
    const std::vector<int>& predicted, const std::vector<int>& truth,
    int* distinct_pred, int* distinct_truth) {
  std::map<int, int> pmap;
  std::map<int, int> tmap;
  for (int v : predicted) pmap.emplace(v, 0);
  for (int v : truth) tmap.emplace(v, 0);
  int next = 0;
  for (auto& kv : pmap) kv.second = next++;
  next = 0;
  for (auto& kv : tmap) kv.second = next++;

  *distinct_pred = static_cast<int>(pmap.size());
  *distinct_truth = static_cast<int>(tmap.size());
  const int k = std::max(*distinct_pred, *distinct_truth);

  std::vector<std::vector<std::int64_t>> m(
      k, std::vector<std::int64_t>(k, 0));
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    ++m[pmap[predicted[i]]][tmap[truth[i]]];
  }
  return m;
}

void check_inputs(const std::vector<int>& predicted,
                  const std::vector<int>& truth) {
  if (predicted.empty() || predicted.size() != truth.size()) {
    throw InvalidInputError(
        "accuracy: label vectors must be nonempty and equally long");
  }
}

// Maximum-total assignment on a square count matrix, O(k^3) Hungarian
// method in its potentials form (run on negated counts).
std::int64_t best_assignment_hungarian(
    const std::vector<std::vector<std::int64_t>>& m) {
  const int k = static_cast<int>(m.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(k + 1, 0.0);
  std::vector<double> v(k + 1, 0.0);
  std::vector<int> p(k + 1, 0);
  std::vector<int> way(k + 1, 0);

  for (int i = 1; i <= k; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(k + 1, inf);
    std::vector<char> used(k + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= k; ++j) {
        if (used[j]) continue;
        const double cur =
            -static_cast<double>(m[i0 - 1][j - 1]) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= k; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::int64_t total = 0;
  for (int j = 1; j <= k; ++j) {
    if (p[j] != 0) total += m[p[j] - 1][j - 1];
  }
  return total;
}

}  // namespace

double accuracy_brute_force(const std::vector<int>& predicted,
                            const std::vector<int>& truth) {
  check_inputs(predicted, truth);
  int kp = 0;
  int kt = 0;
  const auto m = confusion(predicted, truth, &kp, &kt);
  if (kp > 12 || kt > 12) {
    throw InvalidInputError(
        "accuracy_brute_force: more than 12 distinct labels");
  }
  const int k = static_cast<int>(m.size());
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::int64_t best = 0;
  do {
    std::int64_t total = 0;
    for (int a = 0; a < k; ++a) total += m[a][perm[a]];
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(predicted.size());
}

double accuracy_hungarian(const std::vector<int>& predicted,
                          const std::vector<int>& truth) {
  check_inputs(predicted, truth);
  int kp = 0;
  int kt = 0;
  const auto m = confusion(predicted, truth, &kp, &kt);
  return static_cast<double>(best_assignment_hungarian(m)) /
         static_cast<double>(predicted.size());
}

double accuracy(const std::vector<int>& predicted,
                const std::vector<int>& truth) {
  check_inputs(predicted, truth);
  int kp = 0;
  int kt = 0;
  confusion(predicted, truth, &kp, &kt);
  if (kp <= 12 && kt <= 12) return accuracy_brute_force(predicted, truth);
  return accuracy_hungarian(predicted, truth);
}

std::string to_json_line(const RunReport& report) {
  nlohmann::ordered_json j;
  j["command"] = report.command;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [key, value] : report.config) cfg[key] = value;
  j["config"] = cfg;
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  j["eta_w"] = report.eta_w;
  j["wall_seconds"] = report.wall_seconds;
  if (report.accuracy) {
    j["accuracy"] = *report.accuracy;
  } else {
    j["accuracy"] = nullptr;
  }
  j["warnings"] = report.warnings;
  return j.dump();
}

}  // namespace lglrr
