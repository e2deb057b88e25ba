#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>

#include "fewshot/types.hpp"

namespace fewshot {

// ordered: [a, b] and [b, a] are different coalitions (prompt order matters).
// unordered: coalitions are keyed by member set, as a memo over sets would.
enum class KeyMode { ordered, unordered };

std::string_view key_mode_name(KeyMode mode);
KeyMode parse_key_mode(std::string_view name);

// Memo from (coalition, batch fingerprint) to utility. Linearizable: a lookup
// that follows an insert of the same key returns the stored score bit-exactly.
// Safe for concurrent use.
class UtilityCache {
 public:
  struct Stats {
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    std::size_t entries = 0;
  };

  explicit UtilityCache(KeyMode mode = KeyMode::ordered) : mode_(mode) {}

  KeyMode key_mode() const { return mode_; }

  std::string key(const OrderedExampleSet& coalition, std::uint64_t batch_fingerprint) const;

  // Counts a hit or a miss.
  std::optional<double> lookup(const std::string& key);
  // The first stored score for a key wins; later inserts are ignored.
  void insert(const std::string& key, double score);

  Stats stats() const;
  void clear();

 private:
  KeyMode mode_;
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, double> entries_;
  std::atomic<std::uint64_t> hits_{0};
  std::atomic<std::uint64_t> misses_{0};
};

}  // namespace fewshot
