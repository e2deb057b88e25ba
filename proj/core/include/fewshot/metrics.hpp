#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fewshot/metric_id.hpp"
#include "fewshot/types.hpp"

// Per-point scoring functions. All are pure and thread-safe.
//
// Tokenization (rouge, sari): ASCII lowercase, split on whitespace, and every
// ASCII punctuation character becomes a token of its own. No stemming.
namespace fewshot::metrics {

std::vector<std::string> tokenize(std::string_view text);

// First line of the trimmed text, surrounding punctuation and quotes removed,
// lowercased.
std::string normalize_label(std::string_view text);

// 1 iff the normalized prediction equals the normalized gold label.
double exact_match(std::string_view prediction, std::string_view gold_label,
                   std::span<const std::string> label_set);

// Clipped n-gram F1, maximum over references. n is 1 or 2.
double rouge_n(std::string_view candidate, std::span<const std::string> references, int n);
// Token LCS F1, maximum over references.
double rouge_l(std::string_view candidate, std::span<const std::string> references);
double rouge_avg(std::string_view candidate, std::span<const std::string> references);

struct SariBreakdown {
  double sari = 0;    // [0, 100]
  double keep = 0;    // [0, 1], F1
  double add = 0;     // [0, 1], F1
  double remove = 0;  // [0, 1], precision
};

// SARI over 1- to 4-grams. Per sentence each n-gram counts once; reference
// n-grams are weighted by the fraction of references containing them; empty
// selections score 1 (0/0 := 1), so an exact match of source, candidate and
// references gives 100.
SariBreakdown sari_breakdown(std::string_view source, std::string_view candidate,
                             std::span<const std::string> references);
double sari(std::string_view source, std::string_view candidate,
            std::span<const std::string> references);

// Last number-like token (optional sign, digits with optional thousands
// commas, optional decimal part) with commas removed.
std::optional<std::string> extract_last_number(std::string_view text);

// 1 iff the last number in the prediction equals gold numerically.
double final_number(std::string_view prediction, std::string_view gold);

// Strips what the prompt layout adds around a generated answer: for
// generation tasks the first non-empty line without surrounding quotes;
// other kinds are returned unchanged.
std::string prepare_prediction(const TaskSpec& task, std::string_view raw);

// Score of a raw prediction on one point in the metric's native scale
// (SARI in [0, 100], everything else in [0, 1]).
double score(const TaskSpec& task, std::string_view prediction, const DataPoint& point);

// score() mapped into [0, 1].
double unit_score(const TaskSpec& task, std::string_view prediction, const DataPoint& point);

}  // namespace fewshot::metrics
