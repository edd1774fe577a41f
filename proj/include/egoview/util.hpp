// Copyright 2026 The egoview Authors
// SPDX-License-Identifier: Apache-2.0

// Small deterministic helpers: hashing, percentages, tokenization and a
// bounded parallel loop.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace egoview {

/// 64-bit FNV-1a, seeded by mixing `seed` into the offset basis.
constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Lower-case 16-digit hexadecimal.
std::string hex64(std::uint64_t value);

/// `part / whole` as a percentage rounded half-up to one decimal, computed in
/// integer arithmetic. Returns 0 when whole is 0.
double percent_1dp(std::uint64_t part, std::uint64_t whole) noexcept;

/// ASCII-lowercased tokens split on any byte that is not an ASCII letter or
/// digit. Bytes >= 0x80 are kept inside tokens so UTF-8 words survive.
std::vector<std::string> tokenize(std::string_view text);

/// Runs fn(i) for i in [0, n) on up to `max_workers` threads. Results must be
/// written to per-index slots; the first exception thrown is rethrown after
/// all workers stop.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t max_workers, Fn&& fn) {
  const std::size_t workers = std::clamp<std::size_t>(max_workers, 1, std::max<std::size_t>(n, 1));
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace egoview
