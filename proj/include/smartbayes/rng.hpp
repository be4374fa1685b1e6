#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace smartbayes {

// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t z);

// Derives an independent stream seed from (master, a, b). Adding new (a, b)
// cells never perturbs existing ones, so experiment grids can grow
// incrementally without invalidating cached results.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

// Deterministic random source. The engine is std::mt19937_64 (whose output
// sequence is fixed by the standard); all distributions are implemented here
// rather than delegated to the standard library, so a given seed produces the
// same stream on every platform. Each draw consumes a fixed number of engine
// words except gamma(), which uses rejection sampling.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on (0, 1). Never returns 0 or 1, safe under log().
    double uniform();

    // Uniform on {0, 1, ..., n-1} by rejection.
    std::uint64_t bounded(std::uint64_t n);

    // Standard normal via Box-Muller; always consumes two uniforms.
    double normal();

    // Gamma(shape, scale=1), Marsaglia-Tsang; boosted for shape < 1.
    double gamma(double shape);

    double chi_squared(double df) { return 2.0 * gamma(0.5 * df); }

private:
    std::mt19937_64 engine_;
};

// Fisher-Yates permutation of {0, ..., n-1}, driven by Rng::bounded.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

}  // namespace smartbayes
