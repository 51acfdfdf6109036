#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "step_cdf.hpp"

namespace sdfest
{
//---------------------------------------------------------------------------//
/*!
 * Multinomial cell probabilities p_1..p_M.
 *
 * Invariants: M >= 1, p_j >= 0 and sum p_j = 1 within 1e-12 (compensated).
 */
class CellModel
{
  public:
    explicit CellModel(std::vector<double> probabilities);

    std::size_t num_cells() const { return p_.size(); }
    std::span<double const> probabilities() const { return p_; }
    double operator[](std::size_t j) const { return p_[j]; }

  private:
    std::vector<double> p_;
};

//---------------------------------------------------------------------------//
/*!
 * Partition of M cells into m consecutive groups of equal size k.
 *
 * With \c ordered set the cells are first sorted by ascending probability
 * (stable), and the same permutation must be applied to the counts.
 */
struct GroupingScheme
{
    std::size_t num_cells{};
    std::size_t num_groups{};
    std::size_t group_size{};
    bool ordered{false};

    // Build and validate: num_groups must divide num_cells
    static GroupingScheme make(std::size_t num_cells,
                               std::size_t num_groups,
                               bool ordered = false);

    void validate() const;
};

//---------------------------------------------------------------------------//
/*!
 * Grouped cell probabilities q_1..q_m.
 *
 * \c cell_order is the permutation used to form the blocks (identity for
 * unordered schemes); group_counts reuses it so that counts are grouped
 * consistently with the probabilities.
 */
class GroupedModel
{
  public:
    GroupedModel(std::vector<double> q, std::vector<std::size_t> cell_order);

    std::size_t num_groups() const { return q_.size(); }
    std::span<double const> probabilities() const { return q_; }
    std::span<std::size_t const> cell_order() const { return order_; }

  private:
    std::vector<double> q_;
    std::vector<std::size_t> order_;
};

// F_M: empirical cdf of M * p_j
StepCdf structural_cdf(CellModel const& cells);

// q_j = sum of p over block j (after ascending sort when scheme.ordered)
GroupedModel group_model(CellModel const& cells, GroupingScheme const& scheme);

// F_m: empirical cdf of m * q_j
StepCdf grouped_structural_cdf(GroupedModel const& grouped);

// Stable ascending permutation of the probabilities
std::vector<std::size_t> ascending_order(std::span<double const> values);
}  // namespace sdfest
