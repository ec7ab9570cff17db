#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lglrr {

/// Clustering accuracy: the best match rate over bijections between
/// predicted and true label sets, in [0, 1]. Exact permutation search when
/// both sets have at most 12 distinct values, Hungarian assignment on the
/// confusion matrix beyond that.
double accuracy(const std::vector<int>& predicted,
                const std::vector<int>& truth);

/// The exact search, exposed so the assignment path can be cross-checked.
/// Requires at most 12 distinct values per label set.
double accuracy_brute_force(const std::vector<int>& predicted,
                            const std::vector<int>& truth);

/// Hungarian assignment on the confusion matrix; any number of labels.
double accuracy_hungarian(const std::vector<int>& predicted,
                          const std::vector<int>& truth);

/// Summary of one clustering run, serialized as a single JSON line so runs
/// can be appended to a log and post-processed.
struct RunReport {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;  // echoed settings
  int iterations = 0;
  bool converged = false;
  double eta_w = 0.0;
  double wall_seconds = 0.0;
  std::optional<double> accuracy;
  std::vector<std::string> warnings;
};

std::string to_json_line(const RunReport& report);

}  // namespace lglrr
