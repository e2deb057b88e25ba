#pragma once

#include <cstdint>
#include <string_view>

namespace fewshot {

// 64-bit FNV-1a. Stable across platforms and runs, unlike std::hash.
class Fnv1a {
 public:
  void add(std::string_view bytes) {
    for (const unsigned char c : bytes) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
  }

  // Length-prefixed so that ("ab","c") and ("a","bc") hash differently.
  void add_field(std::string_view bytes) {
    add_u64(bytes.size());
    add(bytes);
  }

  void add_u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      state_ ^= (v >> (8 * i)) & 0xffU;
      state_ *= 0x100000001b3ULL;
    }
  }

  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t fnv1a(std::string_view bytes) {
  Fnv1a h;
  h.add(bytes);
  return h.value();
}

}  // namespace fewshot
