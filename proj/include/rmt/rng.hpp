#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace rmt {

// Counter-based random stream. Every draw is a pure function of
// (master_seed, stream_index, counter), so independent streams can be
// handed out to parallel workers and results do not depend on scheduling.
class RngStream {
  public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index = 0)
        : seed_(master_seed), stream_(stream_index), counter_(0) {}

    std::uint64_t master_seed() const { return seed_; }
    std::uint64_t stream_index() const { return stream_; }

    RngStream substream(std::uint64_t index) const {
        return RngStream(seed_, stream_ ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
    }

    std::uint64_t next_u64() { return mix_at(counter_++); }

    // Uniform in the open interval (0,1).
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
    }

    // Standard normal via Box-Muller; draws are generated in pairs and the
    // spare is cached so counters advance deterministically.
    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = next_uniform();
        double u2 = next_uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

  private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::uint64_t mix_at(std::uint64_t counter) const {
        std::uint64_t h = splitmix(seed_);
        h = splitmix(h ^ stream_);
        h = splitmix(h ^ counter);
        return h;
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline std::vector<double> gaussian_stream(RngStream s, std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = s.next_normal();
    return out;
}

} // namespace rmt
