#pragma once

// Synthetic coalition games shared by the unit and acceptance tests.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fewshot/rng.hpp"
#include "fewshot/types.hpp"
#include "fewshot/utility.hpp"

namespace fewshot::testing {

inline OrderedExampleSet make_examples(std::size_t n, const std::string& prefix = "e") {
  std::vector<Example> items;
  for (std::size_t i = 0; i < n; ++i) {
    items.push_back({prefix + std::to_string(i), "input " + std::to_string(i), "positive",
                     Origin::manual});
  }
  return OrderedExampleSet(std::move(items));
}

// Bitmask of the coalition's members, bit i = example i of `full`.
inline std::size_t coalition_mask(const OrderedExampleSet& full, const OrderedExampleSet& coalition) {
  std::size_t mask = 0;
  for (const auto& e : coalition) mask |= std::size_t{1} << *full.index_of(e.id);
  return mask;
}

// v(S) = values[mask(S)]; order-insensitive.
inline ValueFunction table_game(const OrderedExampleSet& full, std::vector<double> values) {
  auto table = std::make_shared<std::vector<double>>(std::move(values));
  return [full, table](const OrderedExampleSet& s) { return (*table)[coalition_mask(full, s)]; };
}

// v(S) = sum of w_i over members.
inline ValueFunction additive_game(const OrderedExampleSet& full, std::vector<double> weights) {
  return [full, weights](const OrderedExampleSet& s) {
    double total = 0;
    for (const auto& e : s) total += weights[*full.index_of(e.id)];
    return total;
  };
}

// Accuracy-like table: clamp01(0.5 + 0.5 * sum_{i in S} w_i + noise_S) with
// w_i and noise_S uniform on [-0.25, 0.25].
inline std::vector<double> accuracy_like_table(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w(n);
  for (auto& x : w) x = -0.25 + 0.5 * rng.uniform01();
  std::vector<double> values(std::size_t{1} << n);
  for (std::size_t mask = 0; mask < values.size(); ++mask) {
    double v = 0.5 + (-0.25 + 0.5 * rng.uniform01());
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) v += 0.5 * w[i];
    }
    values[mask] = std::clamp(v, 0.0, 1.0);
  }
  return values;
}

inline nlohmann::json load_fixture(const std::string& name) {
  std::ifstream in(std::string(FEWSHOT_TEST_DATA_DIR) + "/" + name);
  if (!in) throw std::runtime_error("missing fixture " + name);
  return nlohmann::json::parse(in);
}

}  // namespace fewshot::testing
