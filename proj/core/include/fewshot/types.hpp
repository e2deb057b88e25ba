#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fewshot/metric_id.hpp"

namespace fewshot {

enum class Origin { proposed, improved, manual };
enum class TaskKind { classification, generation, math };

std::string_view origin_name(Origin origin);
Origin parse_origin(std::string_view name);
std::string_view task_kind_name(TaskKind kind);
TaskKind parse_task_kind(std::string_view name);

// One in-context demonstration. The id is stable across reordering.
struct Example {
  std::string id;
  std::string input_text;
  std::string target_text;
  Origin origin = Origin::manual;

  friend bool operator==(const Example&, const Example&) = default;
};

// Checks id and trimmed texts are non-empty. Throws InvariantError.
void validate_example(const Example& example);

// Example sequence in prompt order. Ids are unique; every mutation returns a
// new set so values can be shared across threads.
class OrderedExampleSet {
 public:
  OrderedExampleSet() = default;
  explicit OrderedExampleSet(std::vector<Example> items);

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const Example& operator[](std::size_t i) const { return items_[i]; }
  const Example& at(std::size_t i) const { return items_.at(i); }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  const std::vector<Example>& items() const { return items_; }

  std::optional<std::size_t> index_of(std::string_view id) const;
  std::vector<std::string> ids() const;

  OrderedExampleSet without(std::size_t index) const;
  OrderedExampleSet with_appended(Example example) const;
  OrderedExampleSet with_inserted(std::size_t position, Example example) const;
  // Coalition made of the given indices, in the order they are listed.
  OrderedExampleSet select(std::span<const std::size_t> indices) const;

  friend bool operator==(const OrderedExampleSet&, const OrderedExampleSet&) = default;

 private:
  std::vector<Example> items_;
};

// How examples and the query are laid out in the evaluator prompt.
//
// example_block placeholders: {index} {input_field} {input} {target_field} {target}
// query_block placeholders:   {input_field} {input} {target_field}
struct PromptFormat {
  std::string input_field;
  std::string target_field;
  std::string example_block;
  std::string query_block;

  static PromptFormat defaults(TaskKind kind);
};

struct TaskSpec {
  std::string instruction;
  TaskKind kind = TaskKind::classification;
  std::vector<std::string> label_set;  // classification only
  MetricId metric = MetricId::exact_match;
  PromptFormat format = PromptFormat::defaults(TaskKind::classification);
  // Short phrase used by the generator templates, e.g. "binary sentiment".
  std::string description;
  // Optional overrides of the built-in proposer/improver templates.
  std::string proposer_template;
  std::string improver_template;

  // Throws InvariantError.
  void validate() const;
};

// A label for classification/math, reference strings for generation.
using Gold = std::variant<std::string, std::vector<std::string>>;

struct DataPoint {
  std::string id;
  std::string input;
  Gold gold;

  bool has_label() const { return std::holds_alternative<std::string>(gold); }
  const std::string& label() const;
  // The label as a one-element list for label-style golds.
  std::vector<std::string> references() const;

  friend bool operator==(const DataPoint&, const DataPoint&) = default;
};

void validate_point(const DataPoint& point);

using Dataset = std::vector<DataPoint>;

// Multiset of labelled points a utility is computed on. Ids are unique.
class EvalBatch {
 public:
  EvalBatch() = default;
  explicit EvalBatch(std::vector<DataPoint> points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<DataPoint>& points() const { return points_; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }
  std::vector<std::string> ids() const;

  // Order-insensitive hash of the point ids.
  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  std::vector<DataPoint> points_;
  std::uint64_t fingerprint_ = 0;
};

std::string trim(std::string_view text);

}  // namespace fewshot
