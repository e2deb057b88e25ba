#include "fewshot/llm/mock.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include "fewshot/error.hpp"
#include "fewshot/hash.hpp"
#include "fewshot/llm/templates.hpp"

namespace fewshot::mock {
namespace {

std::string strip_quotes(std::string text) {
  text = trim(text);
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
    text = text.substr(1, text.size() - 2);
  }
  return text;
}

std::optional<std::string> after_field(std::string_view line, const std::string& field) {
  const std::string prefix = field + ":";
  if (!line.starts_with(prefix)) return std::nullopt;
  return strip_quotes(std::string(line.substr(prefix.size())));
}

// N in "<lead>N<tail>", e.g. "Create exactly 16 training examples".
std::optional<std::size_t> requested_count(const std::string& prompt, std::string_view lead,
                                           std::string_view tail) {
  for (auto pos = prompt.find(lead); pos != std::string::npos; pos = prompt.find(lead, pos + 1)) {
    std::size_t end = pos + lead.size();
    std::size_t value = 0;
    const std::size_t digits_start = end;
    while (end < prompt.size() && prompt[end] >= '0' && prompt[end] <= '9') {
      value = value * 10 + static_cast<std::size_t>(prompt[end] - '0');
      ++end;
    }
    if (end > digits_start && std::string_view(prompt).substr(end).starts_with(tail)) return value;
  }
  return std::nullopt;
}

}  // namespace

void MockChatBackend::set_response(std::string prompt, std::string text) {
  std::lock_guard lock(mu_);
  responses_[std::move(prompt)] = std::move(text);
}

void MockChatBackend::set_handler(Handler handler) {
  std::lock_guard lock(mu_);
  handler_ = std::move(handler);
}

void MockChatBackend::script_failures(std::vector<Failure> failures) {
  std::lock_guard lock(mu_);
  failures_.assign(failures.begin(), failures.end());
}

std::string MockChatBackend::complete(const llm::ChatRequest& request) {
  const auto now = in_flight_.fetch_add(1) + 1;
  auto seen = max_in_flight_.load();
  while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {
  }
  struct Leave {
    std::atomic<std::size_t>& count;
    ~Leave() { count.fetch_sub(1); }
  } leave{in_flight_};

  if (delay_.count() > 0) std::this_thread::sleep_for(delay_);

  Handler handler;
  {
    std::lock_guard lock(mu_);
    requests_.push_back(request);
    if (!failures_.empty()) {
      const auto failure = failures_.front();
      failures_.pop_front();
      if (failure == Failure::transport) throw TransportError("mock: request timed out");
      throw ConfigError("mock: HTTP 401 unauthorized");
    }
    if (const auto it = responses_.find(request.prompt); it != responses_.end()) return it->second;
    handler = handler_;
  }
  if (handler) return handler(request);
  throw ConfigError("mock: no canned response for prompt");
}

std::vector<llm::ChatRequest> MockChatBackend::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

PromptView inspect_prompt(const std::string& prompt, const TaskSpec& task) {
  PromptView view;
  std::vector<std::string> inputs;
  std::size_t pos = 0;
  while (pos <= prompt.size()) {
    auto end = prompt.find('\n', pos);
    if (end == std::string::npos) end = prompt.size();
    const std::string_view line(prompt.data() + pos, end - pos);
    if (auto v = after_field(line, task.format.input_field)) {
      inputs.push_back(std::move(*v));
    } else if (auto t = after_field(line, task.format.target_field); t && !t->empty()) {
      view.example_targets.push_back(std::move(*t));
    }
    pos = end + 1;
  }
  if (!inputs.empty()) {
    view.query = inputs.back();
    inputs.pop_back();
  }
  view.example_inputs = std::move(inputs);
  return view;
}

double synthetic_strength(const std::vector<std::string>& example_inputs) {
  if (example_inputs.empty()) return 0.0;
  bool weighted = false;
  double sum = 0;
  std::size_t good = 0;
  for (const auto& input : example_inputs) {
    if (const auto pos = input.find("[w="); pos != std::string::npos) {
      const auto end = input.find(']', pos);
      if (end != std::string::npos) {
        weighted = true;
        sum += std::strtod(input.substr(pos + 3, end - pos - 3).c_str(), nullptr);
      }
    }
    if (input.find("[good]") != std::string::npos) ++good;
  }
  if (weighted) return std::clamp(sum, 0.0, 1.0);
  return static_cast<double>(good) / static_cast<double>(example_inputs.size());
}

SyntheticEvaluator::SyntheticEvaluator(TaskSpec task, const Dataset& points)
    : task_(std::move(task)) {
  const auto n = static_cast<double>(points.size());
  for (std::size_t j = 0; j < points.size(); ++j) {
    known_.emplace(points[j].input, Known{(static_cast<double>(j) + 0.5) / n, points[j].gold});
  }
}

std::string SyntheticEvaluator::answer(const Gold& gold, bool correct) const {
  const auto* label = std::get_if<std::string>(&gold);
  switch (task_.kind) {
    case TaskKind::classification: {
      const std::string truth = label ? *label : std::string{};
      if (correct) return truth;
      const auto& labels = task_.label_set;
      const auto it = std::find(labels.begin(), labels.end(), truth);
      if (labels.size() < 2 || it == labels.end()) return "unknown";
      const auto next = std::next(it) == labels.end() ? labels.begin() : std::next(it);
      return *next;
    }
    case TaskKind::generation: {
      if (!correct) return "\"\"";
      const auto refs = label ? std::vector<std::string>{*label}
                              : std::get<std::vector<std::string>>(gold);
      return "\"" + refs.front() + "\"";
    }
    case TaskKind::math:
      return correct && label ? "The answer is " + *label + "." : "no answer";
  }
  return {};
}

std::string SyntheticEvaluator::predict(const std::string& prompt) {
  const auto view = inspect_prompt(prompt, task_);
  const double strength = synthetic_strength(view.example_inputs);
  const auto it = known_.find(view.query);
  if (it == known_.end()) {
    return answer(task_.kind == TaskKind::classification && !task_.label_set.empty()
                      ? Gold{task_.label_set.front()}
                      : Gold{std::string("0")},
                  0.5 < strength);
  }
  return answer(it->second.gold, it->second.threshold < strength);
}

SyntheticChatBackend::SyntheticChatBackend(TaskSpec task, const Dataset& points)
    : task_(task), evaluator_(std::move(task), points) {}

std::string SyntheticChatBackend::example_target(std::size_t index) const {
  switch (task_.kind) {
    case TaskKind::classification:
      return task_.label_set.at(index % task_.label_set.size());
    case TaskKind::generation:
      return "short version " + std::to_string(index + 1);
    case TaskKind::math:
      return std::to_string(index + 1);
  }
  return {};
}

std::string SyntheticChatBackend::complete(const llm::ChatRequest& request) {
  std::string reply;
  if (const auto m = requested_count(request.prompt, "create exactly ", " NEW examples")) {
    const auto tag = fnv1a(request.prompt);
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(tag));
    for (std::size_t j = 0; j < *m; ++j) {
      const Example example{"c", "[good] candidate " + std::string(hex) + "-" + std::to_string(j + 1),
                            example_target(j), Origin::improved};
      if (j > 0) reply += "\n\n";
      reply += llm::render_generator_block(task_, example, j + 1);
    }
    return reply;
  }
  if (const auto k = requested_count(request.prompt, "Create exactly ", " training examples")) {
    for (std::size_t i = 0; i < *k; ++i) {
      const Example example{"p",
                            std::string(i % 2 == 0 ? "[good]" : "[bad]") + " proposed sample " +
                                std::to_string(i + 1),
                            example_target(i), Origin::proposed};
      if (i > 0) reply += "\n\n";
      reply += llm::render_generator_block(task_, example, i + 1);
    }
    return reply;
  }
  return evaluator_.predict(request.prompt);
}

}  // namespace fewshot::mock
