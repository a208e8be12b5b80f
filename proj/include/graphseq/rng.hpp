#ifndef GRAPHSEQ_RNG_HPP
#define GRAPHSEQ_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace graphseq {

// splitmix64 finalizer; used for seed derivation.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// FNV-1a over a short tag string, so seed streams can be named.
constexpr std::uint64_t stream_tag(const char* s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (; *s; ++s) h = (h ^ static_cast<unsigned char>(*s)) * 0x100000001b3ULL;
    return h;
}

// Every random draw in the toolkit flows from one master seed through
// derive_seed(master, stream_tag("..."), index). No ambient entropy.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag,
                                 std::uint64_t index = 0) {
    return mix64(mix64(master ^ mix64(tag)) ^ index);
}

// mt19937_64 with hand-rolled distributions. The engine's output sequence is
// fixed by the standard; std:: distributions are not, and reproducibility
// across standard libraries matters more here than distribution quality.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Unbiased integer in [0, n). n must be positive.
    std::uint64_t uniform_int(std::uint64_t n) {
        // rejection below (2^64 mod n) keeps the modulo unbiased
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = engine_();
            if (r >= threshold) return r % n;
        }
    }

    int uniform_index(std::size_t n) {
        return static_cast<int>(uniform_int(static_cast<std::uint64_t>(n)));
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform_real01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform double in [lo, hi).
    double uniform_real(double lo, double hi) {
        return lo + (hi - lo) * uniform_real01();
    }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[uniform_index(v.size())];
    }

    // Fisher-Yates; deterministic across platforms (std::shuffle is not).
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = uniform_int(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace graphseq

#endif  // GRAPHSEQ_RNG_HPP
