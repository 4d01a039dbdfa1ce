#pragma once

#include <cmath>
#include <cstdint>
#include <string>

namespace selflearn {

// Deterministic RNG with explicitly implemented distributions so results are
// identical across platforms and standard libraries. Streams are derived from
// a root seed plus a label, so parallel work never shares generator state.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(splitmix(seed ^ 0x9e3779b97f4a7c15ULL)) {
        // a couple of warmup steps so close seeds diverge
        next();
        next();
    }

    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t x = seed;
        x = splitmix(x + 0x9e3779b97f4a7c15ULL * (stream + 1));
        return x;
    }

    static std::uint64_t hash_label(const std::string& label) {
        std::uint64_t h = 1469598103934665603ULL; // FNV-1a 64
        for (unsigned char c : label) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        return h;
    }

    Rng stream(std::uint64_t id) const { return Rng(derive(state_, id)); }
    Rng stream(const std::string& label) const { return Rng(derive(state_, hash_label(label))); }

    std::uint64_t next() {
        // xorshift64*
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545F4914F6CDD1DULL;
    }

    // uniform in [0,1)
    double uniform() { return double(next() >> 11) * (1.0 / 9007199254740992.0); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // inclusive integer range
    int randint(int lo, int hi) {
        const std::uint64_t span = std::uint64_t(hi - lo) + 1;
        return lo + int(next() % span);
    }

    // Box-Muller without state caching, so call order stays transparent.
    double normal(double mean = 0.0, double stddev = 1.0) {
        double u1 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double u2 = uniform();
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
        return mean + stddev * z;
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::uint64_t state_;
};

} // namespace selflearn
