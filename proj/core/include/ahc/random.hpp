#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace ahc {

/// SplitMix64 finalizer. Used to derive independent seeds for child streams.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for the stream identified by `index` under `parent`. Depends only on the
/// two arguments, never on scheduling order.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(parent) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

using Rng = std::mt19937_64;

/// Partial Fisher-Yates: the first `count` entries of `items` become a uniform
/// random subset (in random order).
template <typename T>
void shuffle_prefix(std::span<T> items, std::size_t count, Rng& rng) {
  const std::size_t n = items.size();
  for (std::size_t i = 0; i < count && i + 1 < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(items[i], items[pick(rng)]);
  }
}

}  // namespace ahc
