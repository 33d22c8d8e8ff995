#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace keo {

// Canonical entity-surface form: uppercase ASCII, trimmed, internal
// whitespace collapsed to single spaces. Idempotent.
std::string canonicalize(std::string_view s);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
bool is_blank(std::string_view s);

// Lowercased alphanumeric tokens; everything else is a separator.
std::vector<std::string> tokenize_alnum(std::string_view text);

// Truncates to at most budget bytes without splitting a UTF-8 sequence.
void utf8_truncate(std::string& s, std::size_t budget);

// FNV-1a 64-bit. Used for request hashing and artifact checksums; not
// cryptographic, collision odds are negligible at this scale.
std::uint64_t fnv1a64(std::string_view data);
std::uint64_t fnv1a64_file(const std::string& path);
std::string to_hex(std::uint64_t v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// Deterministic RNG helpers. std::shuffle / uniform_int_distribution are
// implementation-defined, so bounded draws are hand-rolled to keep artifacts
// byte-identical across toolchains.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform in [0, n). n must be > 0.
  std::size_t bounded(std::size_t n);

  double unit();  // [0, 1)

  template <typename T>
  void shuffle(std::vector<T>& v) {
    if (v.size() < 2) return;
    for (std::size_t i = v.size() - 1; i > 0; --i) {
      std::swap(v[i], v[bounded(i + 1)]);
    }
  }

private:
  std::mt19937_64 gen_;
};

}  // namespace keo
