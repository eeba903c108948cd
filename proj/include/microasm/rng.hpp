#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace microasm {

// splitmix64, used to derive per-component sub-seeds from the single
// user-facing seed so that every source of randomness is pinned by it.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
    return splitmix64(root ^ splitmix64(stream));
}

// All sampling goes through this wrapper around std::mt19937_64 so runs
// are reproducible for a given seed (per implementation, not across
// standard libraries).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return unit_(gen_); }

    // uniform integer in [0, n)
    int uniform_int(int n) {
        return static_cast<int>(std::uniform_int_distribution<int>(0, n - 1)(gen_));
    }

    // draw index proportional to non-negative weights; caller passes the
    // precomputed total. total must be > 0.
    int categorical(const double* w, int n, double total) {
        double u = uniform() * total;
        double cum = 0.0;
        for (int i = 0; i < n; ++i) {
            cum += w[i];
            if (u <= cum) return i;
        }
        // rounding slack: fall back to the last positive-weight index
        for (int i = n - 1; i >= 0; --i)
            if (w[i] > 0.0) return i;
        return n - 1;
    }

    // draw index proportional to exp(logw[i]); -inf entries carry zero mass.
    // Returns -1 when every entry is -inf.
    int categorical_log(const double* logw, int n, std::vector<double>& scratch) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) mx = std::max(mx, logw[i]);
        if (!(mx > -std::numeric_limits<double>::infinity())) return -1;
        scratch.resize(static_cast<std::size_t>(n));
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            double v = logw[i] > -std::numeric_limits<double>::infinity()
                           ? std::exp(logw[i] - mx)
                           : 0.0;
            scratch[static_cast<std::size_t>(i)] = v;
            total += v;
        }
        return categorical(scratch.data(), n, total);
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

// Running product kept as mantissa * 2^exponent so long chains of count
// ratios neither underflow nor overflow; converted to log once at the end.
struct ScaledProduct {
    double mantissa = 1.0;
    std::int64_t exponent2 = 0;

    void mul(double f) {
        mantissa *= f;
        renorm();
    }
    void div(double f) {
        mantissa /= f;
        renorm();
    }
    void renorm() {
        if (mantissa != 0.0 && (mantissa < 0x1p-512 || mantissa > 0x1p512)) {
            int e = 0;
            mantissa = std::frexp(mantissa, &e);
            exponent2 += e;
        }
    }
    double log() const {
        if (mantissa == 0.0) return -std::numeric_limits<double>::infinity();
        return std::log(mantissa) + static_cast<double>(exponent2) * 0.6931471805599453;
    }
};

} // namespace microasm
