#pragma once

#include <string>
#include <string_view>

namespace fewshot {

enum class MetricId {
  exact_match,
  rouge1,
  rouge2,
  rougeL,
  rouge_avg,  // mean of rouge1, rouge2 and rougeL
  sari,
  final_number,
};

// Throws ConfigError for unknown names.
MetricId parse_metric_id(std::string_view name);
std::string_view metric_name(MetricId id);

}  // namespace fewshot
