#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fbmq {

// One Monte Carlo result: point value, standard error of the mean, replicate
// bookkeeping, and free-form bias / caveat annotations.
struct MonteCarloEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t reps = 0;  // replicates contributing to the mean
  std::uint64_t seed = 0;
  double step = 0.0;
  std::vector<std::string> notes;
};

}  // namespace fbmq
