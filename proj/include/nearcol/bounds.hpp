#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nearcol {

using BigInt = boost::multiprecision::cpp_int;

BigInt binomial(int n, int k);

/// log2 of a positive big integer, accurate to double precision.
double log2_big(const BigInt& x);

/// S_eps(n) = sum_{i <= eps} C(n, i). Throws std::invalid_argument unless 0 <= eps <= n.
BigInt ball_volume(int n, int epsilon);

/// ceil(2^n / S_eps(n)): the pigeonhole size beyond which two enrolled
/// templates must share an epsilon-ball.
BigInt dirichlet_bound(int n, int epsilon);

/// log2 of 2^{n/2} S_eps(n)^{-1/2}: database size with about even odds of
/// holding a near-collision.
double birthday_bound_log2(int n, int epsilon);

/// log2 of 2^{(n+1)/2} S_eps(n)^{-1/2}: expected size at which the first
/// two-member cluster appears.
double first_cluster_bound_log2(int n, int epsilon);

/// C(k, 2) S_eps(n) 2^{-n}, evaluated in log space.
double expected_near_collisions(int n, int epsilon, std::uint64_t k);

/// floor(pct * n / 100).
int epsilon_from_percent(int n, double pct);

/// Parses "12" (absolute) or "10%" (percent of n, rounded down).
int parse_epsilon(const std::string& text, int n);

struct CapacityReport {
    int n = 0;
    int epsilon = 0;
    BigInt ball_volume;
    BigInt dirichlet_k;
    double birthday_log2_k = 0;
    double first_cluster_log2_k = 0;
    std::optional<std::uint64_t> k;
    std::optional<double> expected_collisions;
    /// n >= 512 and epsilon <= 51.
    bool meets_recommendation = false;
    /// k below the birthday bound (only with k).
    std::optional<bool> k_within_capacity;
};

CapacityReport capacity_report(int n, int epsilon, std::optional<std::uint64_t> k = std::nullopt);

struct CurveRow {
    int n = 0;
    int epsilon = 0;
    double log2_k = 0;
};

/// Grid for the two panels: log2 k against n at fixed epsilon percentages,
/// and log2 k against the epsilon percentage at fixed n.
struct CurveConfig {
    std::vector<int> panel_a_n{32, 64, 128, 256, 512, 1024};
    std::vector<double> panel_a_pct{5, 10, 20, 40};
    std::vector<int> panel_b_n{128, 256, 512};
    std::vector<double> panel_b_pct{0, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
};

std::vector<CurveRow> emit_curves(const CurveConfig& config);
/// Header `n,epsilon,log2_k`, one row per grid point.
void write_curves_csv(std::ostream& out, const std::vector<CurveRow>& rows);

}  // namespace nearcol
