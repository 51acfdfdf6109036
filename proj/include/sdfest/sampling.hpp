#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "model.hpp"
#include "rng.hpp"

namespace sdfest
{
enum class CountsKind
{
    multinomial,
    poissonized,
};

char const* to_string(CountsKind kind);

//---------------------------------------------------------------------------//
/*!
 * Realised cell (or group) counts.
 *
 * \c nominal_size is n; \c realized_size is the number of draws actually
 * made: n for multinomial sampling, the Poisson(n) draw N otherwise. The
 * counts always sum to \c realized_size.
 */
struct CountsVector
{
    CountsKind kind{CountsKind::multinomial};
    std::vector<std::uint64_t> counts;
    std::uint64_t nominal_size{0};
    std::uint64_t realized_size{0};

    void validate() const;
};

struct CoupledCounts
{
    CountsVector multinomial;   //!< first n draws of the stream
    CountsVector poissonized;   //!< first N draws of the same stream
};

//---------------------------------------------------------------------------//
/*!
 * Categorical/multinomial sampler bound to one cell model.
 *
 * The alias table is built once; reuse the sampler across replications.
 */
class MultinomialSampler
{
  public:
    explicit MultinomialSampler(CellModel const& cells);

    std::size_t num_cells() const { return table_.size(); }

    CountsVector draw(std::uint64_t n, Rng& rng) const;

    // N ~ Poisson(n); one categorical stream of max(n, N) draws; nu counts
    // the first n draws and rho the first N
    CoupledCounts draw_coupled(std::uint64_t n, Rng& rng) const;

    // Adds \c draws categorical draws to \c counts
    void accumulate(std::uint64_t draws,
                    Rng& rng,
                    std::vector<std::uint64_t>& counts) const;

  private:
    AliasTable table_;
};

CountsVector draw_multinomial(CellModel const& cells,
                              std::uint64_t n,
                              RngStream stream);

CoupledCounts draw_coupled(CellModel const& cells,
                           std::uint64_t n,
                           RngStream stream);

// Independent Poisson(n p_j) per cell
CountsVector draw_poissonized(CellModel const& cells,
                              std::uint64_t n,
                              RngStream stream);

// Independent Poisson(n q_j) per group
CountsVector draw_poissonized_grouped(GroupedModel const& grouped,
                                      std::uint64_t n,
                                      RngStream stream);
CountsVector draw_poissonized_grouped(GroupedModel const& grouped,
                                      std::uint64_t n,
                                      Rng& rng);

// Block sums of size k, following \c cell_order when the scheme is ordered.
// cell_order must be the permutation stored in the GroupedModel built from
// the same cells and scheme.
CountsVector group_counts(CountsVector const& counts,
                          GroupingScheme const& scheme,
                          std::span<std::size_t const> cell_order = {});
}  // namespace sdfest
