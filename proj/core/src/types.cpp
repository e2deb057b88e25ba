#include "fewshot/types.hpp"

#include <algorithm>
#include <unordered_set>

#include "fewshot/error.hpp"
#include "fewshot/hash.hpp"

namespace fewshot {

std::string_view origin_name(Origin origin) {
  switch (origin) {
    case Origin::proposed:
      return "proposed";
    case Origin::improved:
      return "improved";
    case Origin::manual:
      return "manual";
  }
  return "manual";
}

Origin parse_origin(std::string_view name) {
  if (name == "proposed") return Origin::proposed;
  if (name == "improved") return Origin::improved;
  if (name == "manual") return Origin::manual;
  throw InvariantError("unknown example origin: " + std::string(name));
}

std::string_view task_kind_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::classification:
      return "classification";
    case TaskKind::generation:
      return "generation";
    case TaskKind::math:
      return "math";
  }
  return "classification";
}

TaskKind parse_task_kind(std::string_view name) {
  if (name == "classification") return TaskKind::classification;
  if (name == "generation") return TaskKind::generation;
  if (name == "math") return TaskKind::math;
  throw ConfigError("unknown task kind: " + std::string(name));
}

std::string trim(std::string_view text) {
  constexpr std::string_view kSpace = " \t\r\n\f\v";
  const auto first = text.find_first_not_of(kSpace);
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(kSpace);
  return std::string(text.substr(first, last - first + 1));
}

void validate_example(const Example& example) {
  if (example.id.empty()) throw InvariantError("example id is empty");
  if (trim(example.input_text).empty()) {
    throw InvariantError("example " + example.id + " has empty input text");
  }
  if (trim(example.target_text).empty()) {
    throw InvariantError("example " + example.id + " has empty target text");
  }
}

OrderedExampleSet::OrderedExampleSet(std::vector<Example> items) : items_(std::move(items)) {
  std::unordered_set<std::string_view> seen;
  for (const auto& example : items_) {
    validate_example(example);
    if (!seen.insert(example.id).second) {
      throw InvariantError("duplicate example id: " + example.id);
    }
  }
}

std::optional<std::size_t> OrderedExampleSet::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (items_[i].id == id) return i;
  }
  return std::nullopt;
}

std::vector<std::string> OrderedExampleSet::ids() const {
  std::vector<std::string> out;
  out.reserve(items_.size());
  for (const auto& example : items_) out.push_back(example.id);
  return out;
}

OrderedExampleSet OrderedExampleSet::without(std::size_t index) const {
  if (index >= items_.size()) throw InvariantError("example index out of range");
  std::vector<Example> rest;
  rest.reserve(items_.size() - 1);
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (i != index) rest.push_back(items_[i]);
  }
  OrderedExampleSet out;
  out.items_ = std::move(rest);
  return out;
}

OrderedExampleSet OrderedExampleSet::with_appended(Example example) const {
  return with_inserted(items_.size(), std::move(example));
}

OrderedExampleSet OrderedExampleSet::with_inserted(std::size_t position, Example example) const {
  if (position > items_.size()) throw InvariantError("insert position out of range");
  std::vector<Example> next = items_;
  next.insert(next.begin() + static_cast<std::ptrdiff_t>(position), std::move(example));
  return OrderedExampleSet(std::move(next));
}

OrderedExampleSet OrderedExampleSet::select(std::span<const std::size_t> indices) const {
  std::vector<Example> chosen;
  chosen.reserve(indices.size());
  for (const auto index : indices) chosen.push_back(items_.at(index));
  return OrderedExampleSet(std::move(chosen));
}

PromptFormat PromptFormat::defaults(TaskKind kind) {
  switch (kind) {
    case TaskKind::classification:
      return {"Sentence", "Label",
              "Example{index}:\n{input_field}: \"{input}\"\n{target_field}: {target}",
              "{input_field}: \"{input}\"\n{target_field}:"};
    case TaskKind::generation:
      return {"Text", "Summary",
              "Example{index}:\n{input_field}: \"{input}\"\n{target_field}: \"{target}\"",
              "{input_field}: \"{input}\"\n{target_field}:"};
    case TaskKind::math:
      return {"Question", "Answer",
              "Example{index}:\n{input_field}: {input}\n{target_field}: {target}",
              "{input_field}: {input}\n{target_field}:"};
  }
  return defaults(TaskKind::classification);
}

void TaskSpec::validate() const {
  if (kind == TaskKind::classification) {
    if (label_set.empty()) throw InvariantError("classification task needs a non-empty label set");
    std::unordered_set<std::string> unique;
    for (const auto& label : label_set) {
      if (trim(label).empty()) throw InvariantError("label set contains an empty label");
      if (!unique.insert(label).second) throw InvariantError("duplicate label: " + label);
    }
  } else if (!label_set.empty()) {
    throw InvariantError("only classification tasks carry a label set");
  }
  if (format.input_field.empty() || format.target_field.empty()) {
    throw InvariantError("prompt field names must be non-empty");
  }
}

const std::string& DataPoint::label() const {
  if (const auto* label = std::get_if<std::string>(&gold)) return *label;
  throw InvariantError("data point " + id + " has references, not a label");
}

std::vector<std::string> DataPoint::references() const {
  if (const auto* label = std::get_if<std::string>(&gold)) return {*label};
  return std::get<std::vector<std::string>>(gold);
}

void validate_point(const DataPoint& point) {
  if (point.id.empty()) throw InvariantError("data point id is empty");
  if (const auto* label = std::get_if<std::string>(&point.gold)) {
    if (trim(*label).empty()) throw InvariantError("data point " + point.id + " has an empty label");
    return;
  }
  const auto& refs = std::get<std::vector<std::string>>(point.gold);
  if (refs.empty()) throw InvariantError("data point " + point.id + " has no references");
  for (const auto& ref : refs) {
    if (trim(ref).empty()) throw InvariantError("data point " + point.id + " has an empty reference");
  }
}

EvalBatch::EvalBatch(std::vector<DataPoint> points) : points_(std::move(points)) {
  std::vector<std::string_view> ids;
  ids.reserve(points_.size());
  std::unordered_set<std::string_view> seen;
  for (const auto& point : points_) {
    if (!seen.insert(point.id).second) throw InvariantError("duplicate point id in batch: " + point.id);
    ids.push_back(point.id);
  }
  std::sort(ids.begin(), ids.end());
  Fnv1a hash;
  for (const auto id : ids) hash.add_field(id);
  fingerprint_ = hash.value();
}

std::vector<std::string> EvalBatch::ids() const {
  std::vector<std::string> out;
  out.reserve(points_.size());
  for (const auto& point : points_) out.push_back(point.id);
  return out;
}

}  // namespace fewshot
