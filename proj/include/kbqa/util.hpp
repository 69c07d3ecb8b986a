#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace kbqa {

// ---------------------------------------------------------------------------
// Hashing.  FNV-1a is used for template ids and file fingerprints; we need a
// fixed, platform-independent function, not std::hash.
// ---------------------------------------------------------------------------

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);  // 16 lowercase hex digits

// ---------------------------------------------------------------------------
// Randomness.  All sampling flows from one root seed.  Sub-streams are derived
// with derive_seed(root, tag, index) so stages can run in any order (or in
// parallel) without changing results.  std::mt19937_64 output is pinned by the
// standard; the std distributions are not, so Rng implements its own draws.
// ---------------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t root, std::string_view tag, std::uint64_t index);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // Unbiased integer in [0, n); n must be nonzero.
    std::uint64_t below(std::uint64_t n);

    // Uniform double in [0, 1) with 53 random bits.
    double real01();

private:
    std::mt19937_64 eng_;
};

// Seeded selection of k elements from pool, in draw order.  Deterministic for
// a given pool order and Rng state (partial Fisher-Yates).
template <typename T>
std::vector<T> sample_k(std::vector<T> pool, std::size_t k, Rng& rng) {
    if (k > pool.size()) k = pool.size();
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

// ---------------------------------------------------------------------------
// Strings.
// ---------------------------------------------------------------------------

std::string to_lower(std::string_view text);
std::string trim(std::string_view text);
std::vector<std::string> split_lines(std::string_view text);  // strips trailing \r
std::vector<std::string> split_whitespace(std::string_view text);
bool contains_whitespace(std::string_view text);
std::size_t utf8_codepoints(std::string_view text);

// ---------------------------------------------------------------------------
// Files.
// ---------------------------------------------------------------------------

std::string read_file(const std::string& path);  // DataError if unreadable
// Writes to a sibling temp file then renames, so readers never observe a
// partially written file.
void write_file_atomic(const std::string& path, std::string_view content);

std::string iso8601_utc_now();

}  // namespace kbqa
