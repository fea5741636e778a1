#include "hypermult/rng.hpp"

#include <numeric>

namespace hypermult {

std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::string_view> parts) {
  std::uint64_t state = mix64(root);
  for (std::string_view part : parts) {
    // Length prefix keeps ("ab","c") and ("a","bc") apart.
    std::uint64_t len = part.size();
    state = fnv1a64(std::string_view(reinterpret_cast<const char*>(&len), sizeof(len)), state);
    state = fnv1a64(part, state);
  }
  return mix64(state);
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  return mix64(mix64(root) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

std::uint64_t CounterRng::below(std::uint64_t bound) noexcept {
  // Rejection sampling on the top of the range removes modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % bound;
}

std::vector<std::size_t> CounterRng::choose(std::size_t n, std::size_t count) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  if (count > n) count = n;
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t j = i + static_cast<std::size_t>(below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace hypermult
