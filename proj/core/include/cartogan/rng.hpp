#ifndef CARTOGAN_RNG_HPP
#define CARTOGAN_RNG_HPP

#include <cmath>
#include <cstdint>
#include <vector>

namespace cartogan {

// Owned splitmix64 stream. All randomness in the project flows through
// instances of this; nothing uses std::random_device or the global rand().
// The bit stream depends only on the seed, so serialized artifacts are
// reproducible across platforms and runs.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Stateless derivation of an independent stream from a seed and up to
    // three tags. Used to give every block/lot/feature its own stream so
    // edits to one generator stage cannot perturb another.
    static Rng from_key(std::uint64_t seed, std::uint64_t a,
                        std::uint64_t b = 0, std::uint64_t c = 0) {
        std::uint64_t h = mix(seed ^ 0x51a7c0de00000001ULL);
        h = mix(h ^ a);
        h = mix(h ^ b);
        h = mix(h ^ c);
        return Rng(h);
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform integer in [0, n). Modulo bias is irrelevant here; what
    // matters is that the draw is a pure function of the stream.
    std::uint64_t next_below(std::uint64_t n) { return n ? next_u64() % n : 0; }

    // Standard normal via Box-Muller. Consumes two draws per call.
    double normal() {
        double u1 = 1.0 - next_double();
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    std::uint64_t state() const { return state_; }
    void set_state(std::uint64_t s) { state_ = s; }

private:
    std::uint64_t state_;
};

} // namespace cartogan

#endif
