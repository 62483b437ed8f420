#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace dacfl {

// Deterministic seeded randomness. std::mt19937_64 is bit-portable across
// platforms; the std::*_distribution adapters are not, so all conversions
// from raw 64-bit draws are done by hand here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1); rejects exact zeros.
    double open01() {
        double x;
        do {
            x = uniform01();
        } while (x == 0.0);
        return x;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via Box-Muller; caches the second variate.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = open01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * 3.14159265358979323846 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    // Uniform integer in [0, n); threshold rejection keeps it unbiased.
    std::uint64_t uniform_index(std::uint64_t n) {
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t x = engine_();
            if (x >= threshold) return x % n;
        }
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_index(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

// Stream identifiers for the one-master-seed split. Adding a stream must not
// renumber existing ones or every stored result changes.
enum class Stream : std::uint64_t {
    matrix = 0,
    init = 1,
    partition = 2,
    batch = 3,       // per-node: index = node id
    data_centers = 4,
    data_train = 5,
    data_test = 6,
    misc = 7,
};

// Splitmix-style expansion: disjoint streams from (master seed, stream, index),
// so changing the node count never silently reuses a stream.
inline std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                                 std::uint64_t index = 0) {
    constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = detail::mix64(master + kGolden * (static_cast<std::uint64_t>(stream) + 1));
    return detail::mix64(z + kGolden * (index + 1));
}

}  // namespace dacfl
