#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace citemap {

using NodeIndex = std::uint32_t;

/// Malformed or inconsistent input data. `line` is 1-based, 0 when unknown.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A precondition on an argument was not met.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Seeded generator with platform-independent helpers.
///
/// std::uniform_*_distribution is implementation-defined, so the helpers here
/// are written out to keep results identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = std::uint64_t(-1) - (std::uint64_t(-1) % bound);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    template <class Container>
    void shuffle(Container& c) {
        for (std::size_t i = c.size(); i > 1; --i) {
            using std::swap;
            swap(c[i - 1], c[below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

/// Derives an independent stream seed from a base seed and a tag.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag);

/// Worker count: CITEMAP_THREADS when set and positive, else hardware concurrency.
unsigned thread_count();

/// Runs fn(i) for i in [0, n) across worker threads. fn must only write to
/// slots owned by i; results are then independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

}  // namespace citemap
