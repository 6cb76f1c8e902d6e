#ifndef NATID_UTIL_HPP
#define NATID_UTIL_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace natid {

// Raised for anything that stems from bad input: malformed files, invalid
// arguments, degenerate data. The CLI maps these to exit code 2; everything
// else is an internal error (exit 1).
class InputError : public std::runtime_error {
  public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// splitmix64, used to derive independent per-replicate/per-fold seeds from a
// single user-facing seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Small deterministic PRNG (splitmix64 stream). We roll our own instead of
// <random> because libstdc++ distributions are not pinned across versions and
// byte-identical reruns are a contract here.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // [0,1)
    double uniform() { return (next() >> 11) * 0x1.0p-53; }

    // uniform in [0,n); n > 0
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    double normal(double mean = 0.0, double sd = 1.0);

    // Knuth multiplication method; fine for the small lambdas used here
    std::int64_t poisson(double lambda);

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[below(i)]);
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// RFC 4180 quoting; only quotes when the field needs it so simple files stay
// byte-stable.
std::string csv_escape(const std::string& field);

// Shortest round-trip decimal form of a double (std::to_chars), so emitted
// CSVs are byte-stable and reload exactly.
std::string format_double(double v);

std::string join(const std::vector<std::string>& parts, const std::string& sep);

// Lowercases ASCII plus the Latin-1/Latin-Extended-A repertoire and applies
// canonical composition for combining diacritics over Latin letters. Covers
// the Catalan/Basque/Spanish/English place names and tokens this toolkit
// deals with; anything outside that repertoire passes through unchanged.
std::string unicode_fold(const std::string& utf8, bool strip_diacritics = false);

// Decode one UTF-8 code point starting at i; advances i. Invalid bytes decode
// as U+FFFD and advance by one.
char32_t utf8_decode(const std::string& s, std::size_t& i);
void utf8_encode(char32_t cp, std::string& out);
std::size_t utf8_length(const std::string& s);

}  // namespace natid

#endif
