#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "fewshot/llm/chat.hpp"
#include "fewshot/types.hpp"
#include "fewshot/utility.hpp"

// Offline stand-ins for the model roles. Everything here is deterministic.
namespace fewshot::mock {

// Chat backend answering from a prompt -> text map or a handler, with
// scripted failures for exercising the client.
class MockChatBackend final : public llm::ChatBackend {
 public:
  enum class Failure { transport, http_401 };

  using Handler = std::function<std::string(const llm::ChatRequest&)>;

  void set_response(std::string prompt, std::string text);
  void set_handler(Handler handler);
  // The next calls fail in order, one entry per call.
  void script_failures(std::vector<Failure> failures);
  // Each call sleeps this long, to make concurrent calls overlap.
  void set_delay(std::chrono::milliseconds delay) { delay_ = delay; }

  std::string complete(const llm::ChatRequest& request) override;

  std::vector<llm::ChatRequest> requests() const;
  std::size_t max_in_flight() const { return max_in_flight_.load(); }

 private:
  mutable std::mutex mu_;
  std::unordered_map<std::string, std::string> responses_;
  Handler handler_;
  std::deque<Failure> failures_;
  std::vector<llm::ChatRequest> requests_;
  std::chrono::milliseconds delay_{0};
  std::atomic<std::size_t> in_flight_{0};
  std::atomic<std::size_t> max_in_flight_{0};
};

class CallbackEvaluator final : public Evaluator {
 public:
  using Callback = std::function<std::string(const std::string&)>;

  explicit CallbackEvaluator(Callback callback) : callback_(std::move(callback)) {}
  std::string predict(const std::string& prompt) override { return callback_(prompt); }

 private:
  Callback callback_;
};

// Inputs and targets of the demonstrations in an assembled prompt, and the
// query input. Relies on the field lines of task.format.
struct PromptView {
  std::vector<std::string> example_inputs;
  std::vector<std::string> example_targets;
  std::string query;
};

PromptView inspect_prompt(const std::string& prompt, const TaskSpec& task);

// Strength t(S) of a demonstration set, from tags in the example inputs:
// the clamped sum of "[w=x]" weights if any is present, else the share of
// "[good]" examples. An empty set has strength 0.
double synthetic_strength(const std::vector<std::string>& example_inputs);

// Evaluator of a synthetic world. The point at position j of the N known
// points is answered correctly iff (j + 0.5) / N < t(S), so accuracy over
// the whole dataset tracks t(S). Unknown queries sit at 0.5.
class SyntheticEvaluator final : public Evaluator {
 public:
  SyntheticEvaluator(TaskSpec task, const Dataset& points);

  std::string predict(const std::string& prompt) override;

 private:
  struct Known {
    double threshold;
    Gold gold;
  };

  std::string answer(const Gold& gold, bool correct) const;

  TaskSpec task_;
  std::map<std::string, Known, std::less<>> known_;
};

// All three roles against one synthetic world: proposer requests get
// alternating "[good]"/"[bad]" examples with round-robin labels, improver
// requests get only "[good]" candidates, and everything else is answered
// by a SyntheticEvaluator.
class SyntheticChatBackend final : public llm::ChatBackend {
 public:
  SyntheticChatBackend(TaskSpec task, const Dataset& points);

  std::string complete(const llm::ChatRequest& request) override;

 private:
  std::string example_target(std::size_t index) const;

  TaskSpec task_;
  SyntheticEvaluator evaluator_;
};

}  // namespace fewshot::mock
