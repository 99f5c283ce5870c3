#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace seqgen {

// ---------------------------------------------------------------------------
// Errors. Generator-side contract violations are exceptions; execution-time
// failures inside the oracle runner are captured as data (RunOutcome), never
// thrown past that boundary.
// ---------------------------------------------------------------------------

struct EmptyCandidateSet : std::runtime_error {
  EmptyCandidateSet() : std::runtime_error("no transition applies to the current schema") {}
};

struct StaleBinding : std::runtime_error {
  explicit StaleBinding(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownVar : std::runtime_error {
  explicit UnknownVar(const std::string& what) : std::runtime_error(what) {}
};

// Raised when the engine exhausts its re-initialization budget.
struct DeadEnd : std::runtime_error {
  explicit DeadEnd(const std::string& what) : std::runtime_error(what) {}
};

struct CorpusError : std::runtime_error {
  explicit CorpusError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Deterministic RNG. xoshiro256** seeded via splitmix64. All sampling in the
// pipeline goes through this type; std::random distributions are avoided
// because their draw sequences are implementation-defined.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) {
    std::uint64_t s = seed;
    for (auto& w : s_) w = splitmix64(s);
  }

  std::uint64_t next_u64() {
    auto rotl = [](std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1). 53-bit mantissa fill.
  double uniform_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n). Modulo bias is ~2^-60 for the small n used here.
  std::size_t uniform_index(std::size_t n) { return n <= 1 ? 0 : next_u64() % n; }

  // Inclusive integer range.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(uniform_index(static_cast<std::size_t>(hi - lo + 1)));
  }

  double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform_double(); }

  bool coin() { return (next_u64() & 1u) != 0; }

 private:
  std::uint64_t s_[4];
};

// Derives the per-entry seed from a campaign seed and an entry index.
inline std::uint64_t derive_seed(std::uint64_t campaign_seed, std::uint64_t index) {
  std::uint64_t x = campaign_seed ^ (index * 0x9e3779b97f4a7c15ULL + 0xa0761d6478bd642fULL);
  return splitmix64(x);
}

// FNV-1a, used for param fingerprints; portable across platforms unlike
// std::hash.
inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  return fnv1a(s.data(), s.size(), h);
}

// Exact match for string literals; without it a (const char*, uint64) call
// would bind the hash seed to the byte-count parameter above.
inline std::uint64_t fnv1a(const char* s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  return fnv1a(s, std::char_traits<char>::length(s), h);
}

}  // namespace seqgen
