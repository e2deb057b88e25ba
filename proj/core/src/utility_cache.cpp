#include "fewshot/utility_cache.hpp"

#include <algorithm>
#include <mutex>
#include <vector>

#include "fewshot/error.hpp"

namespace fewshot {

std::string_view key_mode_name(KeyMode mode) {
  return mode == KeyMode::ordered ? "ordered" : "unordered";
}

KeyMode parse_key_mode(std::string_view name) {
  if (name == "ordered") return KeyMode::ordered;
  if (name == "unordered") return KeyMode::unordered;
  throw ConfigError("unknown cache key mode: " + std::string(name));
}

std::string UtilityCache::key(const OrderedExampleSet& coalition,
                              std::uint64_t batch_fingerprint) const {
  std::vector<std::string> ids = coalition.ids();
  if (mode_ == KeyMode::unordered) std::sort(ids.begin(), ids.end());
  std::string out = std::to_string(batch_fingerprint);
  out += '|';
  for (const auto& id : ids) {
    out += std::to_string(id.size());
    out += ':';
    out += id;
  }
  return out;
}

std::optional<double> UtilityCache::lookup(const std::string& key) {
  std::shared_lock lock(mu_);
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    misses_.fetch_add(1, std::memory_order_relaxed);
    return std::nullopt;
  }
  hits_.fetch_add(1, std::memory_order_relaxed);
  return it->second;
}

void UtilityCache::insert(const std::string& key, double score) {
  std::unique_lock lock(mu_);
  entries_.try_emplace(key, score);
}

UtilityCache::Stats UtilityCache::stats() const {
  std::shared_lock lock(mu_);
  return {hits_.load(), misses_.load(), entries_.size()};
}

void UtilityCache::clear() {
  std::unique_lock lock(mu_);
  entries_.clear();
  hits_ = 0;
  misses_ = 0;
}

}  // namespace fewshot
