#pragma once

#include "nearcol/core.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace nearcol {

using IntVector = Eigen::Matrix<int, Eigen::Dynamic, 1>;
using SignMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

/// Coarsest partition of the bit positions into classes on which every
/// pair of group members is either identical or complementary.
///
/// Classes are ordered by their smallest position and positions inside a
/// class are ascending. signs(i, j) is +1 when member i agrees with the
/// reference member on class j and -1 when it is the complement there.
struct IndexPartition {
    std::vector<std::vector<std::size_t>> classes;
    std::size_t reference_index = 0;
    Template reference;
    SignMatrix signs;  // |group| x |classes|

    std::size_t num_classes() const noexcept { return classes.size(); }
};

IndexPartition index_partition(std::span<const Template> group, std::size_t reference_index = 0);

/// True when every pair of group members is identical or complementary on `positions`.
bool positions_uniform(std::span<const Template> group, std::span<const std::size_t> positions);

/// The reduced feasibility system over per-class flip counts N:
///
///     signs * N <= epsilon - dist_to_ref,   0 <= N <= bounds
///
/// where dist_to_ref(i) = d_H(member i, reference) and bounds(j) = min(epsilon, |K_j|).
/// A template p with per-class distances N to the reference covers the group
/// within epsilon exactly when N satisfies the system.
struct ReducedSystem {
    IndexPartition partition;
    int epsilon = 0;
    IntVector dist_to_ref;
    IntVector bounds;

    std::size_t rows() const noexcept { return static_cast<std::size_t>(dist_to_ref.size()); }
    std::size_t cols() const noexcept { return static_cast<std::size_t>(bounds.size()); }

    /// epsilon - dist_to_ref.
    IntVector rhs() const { return IntVector::Constant(dist_to_ref.size(), epsilon) - dist_to_ref; }
    /// rhs - signs * N; N is feasible iff this is non-negative and N is in bounds.
    IntVector slack(const IntVector& flips) const { return rhs() - partition.signs * flips; }

    bool in_bounds(const IntVector& flips) const;
    bool feasible(const IntVector& flips) const;
    /// Sum over rows of min(0, slack); zero exactly on feasible in-bounds N.
    int energy(const IntVector& flips) const;

    /// Number of points of the search box prod_j (bounds(j) + 1), saturating.
    std::uint64_t box_size() const noexcept;
};

ReducedSystem build_reduced_system(std::span<const Template> group, int epsilon, std::size_t reference_index = 0);

/// Per-class distance vector of p to the reference (the N that p realizes).
IntVector class_distances(const Template& p, const ReducedSystem& sys);

/// Reference with the lowest-indexed flips(j) positions of every class j flipped.
/// Throws std::invalid_argument when N is infeasible.
Template decode(const IntVector& flips, const ReducedSystem& sys);

/// Every template realizing the per-class distances N (all position choices).
std::vector<Template> expand(const IntVector& flips, const ReducedSystem& sys);

enum class CoverStatus { Found, NotFound, Unknown };
enum class SolverKind { Exact, Sann };

std::string_view to_string(CoverStatus s) noexcept;
std::string_view to_string(SolverKind s) noexcept;
std::optional<SolverKind> parse_solver(std::string_view name) noexcept;

struct CoverResult {
    CoverStatus status = CoverStatus::Unknown;
    std::optional<Template> center;
    std::optional<IntVector> flips;
    SolverKind solver = SolverKind::Exact;
    std::uint64_t iterations = 0;
    std::chrono::nanoseconds elapsed{0};

    bool found() const noexcept { return status == CoverStatus::Found; }
};

struct ExactOptions {
    /// Search-node budget; 0 means unlimited. Exceeding it yields Unknown.
    std::uint64_t node_budget = 0;
};

/// Depth-first search over the flip-count box with bound pruning. Returns
/// the first feasible N (decoded) or NotFound after exhausting the box.
CoverResult solve_exact(const ReducedSystem& sys, const ExactOptions& options = {});

/// Every feasible flip-count vector.
std::vector<IntVector> enumerate_feasible(const ReducedSystem& sys);

/// The full epsilon-cover-template set of the group: every feasible N
/// expanded to all templates that realize it, sorted ascending.
std::vector<Template> enumerate_covers(const ReducedSystem& sys);

// --- simulated annealing ----------------------------------------------------

enum class CoolingSchedule { Additive, LinearMultiplicative, Exponential, Logarithmic };

std::string_view to_string(CoolingSchedule s) noexcept;
std::optional<CoolingSchedule> parse_schedule(std::string_view name) noexcept;
inline constexpr CoolingSchedule kAllSchedules[] = {CoolingSchedule::Additive, CoolingSchedule::LinearMultiplicative,
                                                    CoolingSchedule::Exponential, CoolingSchedule::Logarithmic};

struct CoolingConstants {
    double alpha = 1.0;
    /// Exponential ratio; 0 selects beta with beta^max_steps = 1e-3.
    double beta = 0.0;
};

/// Temperature at `step` of `max_steps`:
///   additive               t0 * (1 - step / max_steps)
///   linear multiplicative  t0 / (1 + alpha * step)
///   exponential            t0 * beta^step
///   logarithmic            t0 / (1 + alpha * ln(1 + step))
double cooling_temperature(CoolingSchedule schedule, double t0, std::uint64_t step, std::uint64_t max_steps,
                           const CoolingConstants& constants = {});

struct SannOptions {
    CoolingSchedule schedule = CoolingSchedule::Additive;
    std::uint64_t max_iters = 200'000;
    std::uint64_t seed = 0;
    CoolingConstants constants{};
    /// Probability of proposing the energy-increasing direction.
    double uphill_bias = 0.75;
};

/// Simulated annealing over flip counts, maximizing the (non-positive) energy
/// from N = 0. Found on reaching energy 0; Unknown when the budget runs out.
CoverResult solve_sann(const ReducedSystem& sys, const SannOptions& options = {});

/// Chooses the solver and runs it on a group.
struct CoverSearch {
    SolverKind solver = SolverKind::Exact;
    ExactOptions exact{};
    SannOptions sann{};
};

CoverResult find_cover(std::span<const Template> group, int epsilon, const CoverSearch& search);

}  // namespace nearcol
