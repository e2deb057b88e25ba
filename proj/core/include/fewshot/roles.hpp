#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fewshot/types.hpp"

namespace fewshot {

// Writes the initial example set.
class ExampleProposer {
 public:
  virtual ~ExampleProposer() = default;
  virtual OrderedExampleSet propose_initial(std::size_t k, const TaskSpec& task,
                                            std::uint64_t seed) = 0;
};

// Writes replacement candidates for the current set.
class ExampleImprover {
 public:
  virtual ~ExampleImprover() = default;
  virtual std::vector<Example> improve_candidates(const OrderedExampleSet& current, std::size_t m,
                                                  const TaskSpec& task, std::uint64_t seed) = 0;
};

}  // namespace fewshot
