#include "fewshot/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <regex>
#include <set>

#include "fewshot/error.hpp"

namespace fewshot {

MetricId parse_metric_id(std::string_view name) {
  if (name == "exact_match") return MetricId::exact_match;
  if (name == "rouge1") return MetricId::rouge1;
  if (name == "rouge2") return MetricId::rouge2;
  if (name == "rougeL") return MetricId::rougeL;
  if (name == "rouge_avg") return MetricId::rouge_avg;
  if (name == "sari") return MetricId::sari;
  if (name == "final_number") return MetricId::final_number;
  throw ConfigError("unknown metric: " + std::string(name));
}

std::string_view metric_name(MetricId id) {
  switch (id) {
    case MetricId::exact_match:
      return "exact_match";
    case MetricId::rouge1:
      return "rouge1";
    case MetricId::rouge2:
      return "rouge2";
    case MetricId::rougeL:
      return "rougeL";
    case MetricId::rouge_avg:
      return "rouge_avg";
    case MetricId::sari:
      return "sari";
    case MetricId::final_number:
      return "final_number";
  }
  return "exact_match";
}

namespace metrics {
namespace {

bool is_ascii_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u);
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

char lower(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 ? static_cast<char>(std::tolower(u)) : c;
}

void require_references(std::span<const std::string> references) {
  if (references.empty()) throw InvariantError("metric needs at least one reference");
}

double f1(double precision, double recall) {
  if (precision <= 0 || recall <= 0) return 0;
  return 2 * precision * recall / (precision + recall);
}

using NgramCounts = std::map<std::string, int>;

NgramCounts ngram_counts(const std::vector<std::string>& tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string gram = tokens[i];
    for (std::size_t j = 1; j < n; ++j) {
      gram += ' ';
      gram += tokens[i + j];
    }
    ++counts[gram];
  }
  return counts;
}

double rouge_n_single(const std::vector<std::string>& candidate,
                      const std::vector<std::string>& reference, std::size_t n) {
  const auto cand = ngram_counts(candidate, n);
  const auto ref = ngram_counts(reference, n);
  if (cand.empty() || ref.empty()) return 0;
  int overlap = 0;
  for (const auto& [gram, count] : cand) {
    if (const auto it = ref.find(gram); it != ref.end()) overlap += std::min(count, it->second);
  }
  const double precision = static_cast<double>(overlap) / static_cast<double>(candidate.size() - n + 1);
  const double recall = static_cast<double>(overlap) / static_cast<double>(reference.size() - n + 1);
  return f1(precision, recall);
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// Presence set of n-grams of one sentence.
std::set<std::string> ngram_set(const std::vector<std::string>& tokens, std::size_t n) {
  std::set<std::string> out;
  for (const auto& [gram, count] : ngram_counts(tokens, n)) out.insert(gram);
  return out;
}

// 0/0 := 1 for both precision and recall.
double fbeta_vacuous(double true_positives, double selected, double relevant, bool precision_only) {
  const double precision = selected > 0 ? true_positives / selected : 1.0;
  if (precision_only) return precision;
  const double recall = relevant > 0 ? true_positives / relevant : 1.0;
  return f1(precision, recall);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (const char c : text) {
    if (is_space(c)) {
      flush();
    } else if (is_ascii_punct(c)) {
      flush();
      tokens.emplace_back(1, c);
    } else {
      current += lower(c);
    }
  }
  flush();
  return tokens;
}

std::string normalize_label(std::string_view text) {
  std::string line = trim(text);
  if (const auto nl = line.find('\n'); nl != std::string::npos) line = trim(line.substr(0, nl));

  // ASCII punctuation and the UTF-8 curly quotes.
  static constexpr std::string_view kCurly[] = {"\xE2\x80\x98", "\xE2\x80\x99", "\xE2\x80\x9C",
                                                "\xE2\x80\x9D"};
  bool changed = true;
  while (changed && !line.empty()) {
    changed = false;
    if (is_ascii_punct(line.front())) {
      line.erase(0, 1);
      changed = true;
    } else if (is_ascii_punct(line.back())) {
      line.pop_back();
      changed = true;
    }
    for (const auto q : kCurly) {
      if (line.starts_with(q)) {
        line.erase(0, q.size());
        changed = true;
      }
      if (line.ends_with(q)) {
        line.erase(line.size() - q.size());
        changed = true;
      }
    }
    if (changed) line = trim(line);
  }
  std::transform(line.begin(), line.end(), line.begin(), lower);
  return line;
}

double exact_match(std::string_view prediction, std::string_view gold_label,
                   std::span<const std::string> label_set) {
  const std::string predicted = normalize_label(prediction);
  const std::string gold = normalize_label(gold_label);
  if (predicted != gold) return 0;
  if (label_set.empty()) return 1;
  const bool in_set = std::any_of(label_set.begin(), label_set.end(), [&](const std::string& label) {
    return normalize_label(label) == predicted;
  });
  return in_set ? 1 : 0;
}

double rouge_n(std::string_view candidate, std::span<const std::string> references, int n) {
  require_references(references);
  if (n != 1 && n != 2) throw InvariantError("rouge_n supports n = 1 or 2");
  const auto cand = tokenize(candidate);
  double best = 0;
  for (const auto& reference : references) {
    best = std::max(best, rouge_n_single(cand, tokenize(reference), static_cast<std::size_t>(n)));
  }
  return best;
}

double rouge_l(std::string_view candidate, std::span<const std::string> references) {
  require_references(references);
  const auto cand = tokenize(candidate);
  double best = 0;
  for (const auto& reference : references) {
    const auto ref = tokenize(reference);
    if (cand.empty() || ref.empty()) continue;
    const auto lcs = static_cast<double>(lcs_length(cand, ref));
    best = std::max(best, f1(lcs / static_cast<double>(cand.size()),
                             lcs / static_cast<double>(ref.size())));
  }
  return best;
}

double rouge_avg(std::string_view candidate, std::span<const std::string> references) {
  return (rouge_n(candidate, references, 1) + rouge_n(candidate, references, 2) +
          rouge_l(candidate, references)) /
         3.0;
}

SariBreakdown sari_breakdown(std::string_view source, std::string_view candidate,
                             std::span<const std::string> references) {
  require_references(references);
  constexpr std::size_t kMaxGram = 4;
  const auto src_tokens = tokenize(source);
  const auto cand_tokens = tokenize(candidate);
  std::vector<std::vector<std::string>> ref_tokens;
  ref_tokens.reserve(references.size());
  for (const auto& r : references) ref_tokens.push_back(tokenize(r));

  double keep_total = 0;
  double add_total = 0;
  double remove_total = 0;
  for (std::size_t n = 1; n <= kMaxGram; ++n) {
    const auto src = ngram_set(src_tokens, n);
    const auto cand = ngram_set(cand_tokens, n);

    // Fraction of (non-empty) references containing each n-gram.
    std::map<std::string, double> weight;
    int nonempty = 0;
    for (const auto& tokens : ref_tokens) {
      const auto grams = ngram_set(tokens, n);
      if (grams.empty()) continue;
      ++nonempty;
      for (const auto& g : grams) weight[g] += 1.0;
    }
    for (auto& [gram, w] : weight) w /= nonempty;
    auto weight_of = [&](const std::string& g) {
      const auto it = weight.find(g);
      return it == weight.end() ? 0.0 : it->second;
    };

    // keep: n-grams of the source retained by the candidate.
    double keep_tp = 0, keep_selected = 0, keep_relevant = 0;
    // delete: n-grams of the source dropped by the candidate.
    double del_tp = 0, del_selected = 0;
    for (const auto& g : src) {
      const double w = weight_of(g);
      keep_relevant += w;
      if (cand.contains(g)) {
        keep_selected += 1;
        keep_tp += w;
      } else {
        del_selected += 1;
        del_tp += 1.0 - w;
      }
    }
    keep_total += fbeta_vacuous(keep_tp, keep_selected, keep_relevant, false);
    remove_total += fbeta_vacuous(del_tp, del_selected, 0, true);

    // add: candidate n-grams absent from the source.
    double add_tp = 0, add_selected = 0, add_relevant = 0;
    for (const auto& g : cand) {
      if (src.contains(g)) continue;
      add_selected += 1;
      if (weight.contains(g)) add_tp += 1;
    }
    for (const auto& [g, w] : weight) {
      if (!src.contains(g)) add_relevant += 1;
    }
    add_total += fbeta_vacuous(add_tp, add_selected, add_relevant, false);
  }

  SariBreakdown out;
  out.keep = keep_total / kMaxGram;
  out.add = add_total / kMaxGram;
  out.remove = remove_total / kMaxGram;
  out.sari = 100.0 * (out.keep + out.add + out.remove) / 3.0;
  return out;
}

double sari(std::string_view source, std::string_view candidate,
            std::span<const std::string> references) {
  return sari_breakdown(source, candidate, references).sari;
}

std::optional<std::string> extract_last_number(std::string_view text) {
  static const std::regex kNumber(R"([-+]?\d[\d,]*(?:\.\d+)?)");
  const std::string owned(text);
  std::optional<std::string> last;
  for (auto it = std::sregex_iterator(owned.begin(), owned.end(), kNumber);
       it != std::sregex_iterator(); ++it) {
    last = it->str();
  }
  if (!last) return std::nullopt;
  std::string digits;
  for (const char c : *last) {
    if (c != ',') digits += c;
  }
  return digits;
}

namespace {

std::optional<long double> parse_number(const std::string& text) {
  if (text.empty()) return std::nullopt;
  char* end = nullptr;
  const long double value = std::strtold(text.c_str(), &end);
  if (end != text.c_str() + text.size()) return std::nullopt;
  return value;
}

}  // namespace

double final_number(std::string_view prediction, std::string_view gold) {
  std::string gold_digits;
  for (const char c : trim(gold)) {
    if (c != ',') gold_digits += c;
  }
  const auto expected = parse_number(gold_digits);
  if (!expected) throw InvariantError("gold answer is not a number: " + std::string(gold));
  const auto found = extract_last_number(prediction);
  if (!found) return 0;
  const auto actual = parse_number(*found);
  if (!actual) return 0;
  const long double tolerance = 1e-9L * std::max(1.0L, std::fabs(*expected));
  return std::fabs(*actual - *expected) <= tolerance ? 1 : 0;
}

std::string prepare_prediction(const TaskSpec& task, std::string_view raw) {
  if (task.kind != TaskKind::generation) return std::string(raw);
  std::string text = trim(raw);
  if (const auto nl = text.find('\n'); nl != std::string::npos) text = trim(text.substr(0, nl));
  while (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
    text = trim(text.substr(1, text.size() - 2));
  }
  return text;
}

double score(const TaskSpec& task, std::string_view prediction, const DataPoint& point) {
  const std::string answer = prepare_prediction(task, prediction);
  switch (task.metric) {
    case MetricId::exact_match:
      return exact_match(answer, point.references().front(), task.label_set);
    case MetricId::rouge1:
      return rouge_n(answer, point.references(), 1);
    case MetricId::rouge2:
      return rouge_n(answer, point.references(), 2);
    case MetricId::rougeL:
      return rouge_l(answer, point.references());
    case MetricId::rouge_avg:
      return rouge_avg(answer, point.references());
    case MetricId::sari:
      return sari(point.input, answer, point.references());
    case MetricId::final_number:
      return final_number(answer, point.references().front());
  }
  return 0;
}

double unit_score(const TaskSpec& task, std::string_view prediction, const DataPoint& point) {
  const double value = score(task, prediction, point);
  return task.metric == MetricId::sari ? value / 100.0 : value;
}

}  // namespace metrics
}  // namespace fewshot
