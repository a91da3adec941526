#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace synfact {

/// 64-bit FNV-1a. Used for stable identifiers and config fingerprints, never
/// for anything adversarial.
constexpr std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL) noexcept {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_hex(std::uint64_t value);

}  // namespace synfact
