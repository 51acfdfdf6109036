#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace sdfest
{
//! Seed plus replication substream; identical pairs give identical draws
struct RngStream
{
    std::uint64_t seed{0};
    std::uint64_t stream_index{0};
};

// splitmix64 finalizer
constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for substream \c stream_index of \c seed
constexpr std::uint64_t mix_stream_seed(std::uint64_t seed,
                                        std::uint64_t stream_index)
{
    return splitmix64(splitmix64(seed) ^ splitmix64(~stream_index));
}

//---------------------------------------------------------------------------//
/*!
 * Random source for one replication.
 *
 * Wraps std::mt19937_64 (whose output sequence is fixed by the standard) and
 * implements its own uniform and Poisson transforms, so draws are
 * reproducible bit-for-bit across standard library implementations.
 */
class Rng
{
  public:
    explicit Rng(RngStream stream)
        : engine_(mix_stream_seed(stream.seed, stream.stream_index))
    {
    }

    std::uint64_t bits() { return engine_(); }

    //! Uniform on [0, 1) with 53 random bits
    double uniform()
    {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    //! Uniform integer on [0, bound)
    std::uint64_t below(std::uint64_t bound);

    // Poisson(mean): inversion for mean < 10, PTRS transformed rejection
    // (Hormann 1993) otherwise
    std::uint64_t poisson(double mean);

  private:
    std::mt19937_64 engine_;
};

//---------------------------------------------------------------------------//
/*!
 * Walker/Vose alias table: O(K) build, O(1) categorical draw.
 */
class AliasTable
{
  public:
    explicit AliasTable(std::span<double const> probabilities);

    std::size_t sample(Rng& rng) const
    {
        std::uint64_t column = rng.below(prob_.size());
        return rng.uniform() < prob_[column] ? column : alias_[column];
    }

    std::size_t size() const { return prob_.size(); }

  private:
    std::vector<double> prob_;
    std::vector<std::size_t> alias_;
};
}  // namespace sdfest
