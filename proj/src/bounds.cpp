#include "nearcol/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace nearcol {

namespace {

void require_valid(int n, int epsilon) {
    if (n < 1) throw std::invalid_argument("n must be positive");
    if (epsilon < 0 || epsilon > n) throw std::invalid_argument("epsilon must lie in [0, n]");
}

}  // namespace

BigInt binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    BigInt c = 1;
    for (int i = 1; i <= k; ++i) {
        c *= n - k + i;
        c /= i;
    }
    return c;
}

double log2_big(const BigInt& x) {
    if (x <= 0) throw std::invalid_argument("log2 of a non-positive integer");
    const auto msb = static_cast<long>(boost::multiprecision::msb(x));
    if (msb < 53) return std::log2(x.convert_to<double>());
    const BigInt top = x >> static_cast<unsigned>(msb - 52);
    return static_cast<double>(msb - 52) + std::log2(top.convert_to<double>());
}

BigInt ball_volume(int n, int epsilon) {
    require_valid(n, epsilon);
    BigInt total = 0;
    BigInt term = 1;  // C(n, i), built incrementally
    for (int i = 0; i <= epsilon; ++i) {
        if (i > 0) {
            term *= n - i + 1;
            term /= i;
        }
        total += term;
    }
    return total;
}

BigInt dirichlet_bound(int n, int epsilon) {
    const BigInt space = BigInt(1) << n;
    const BigInt vol = ball_volume(n, epsilon);
    return (space + vol - 1) / vol;
}

double birthday_bound_log2(int n, int epsilon) { return 0.5 * n - 0.5 * log2_big(ball_volume(n, epsilon)); }

double first_cluster_bound_log2(int n, int epsilon) {
    return 0.5 * (n + 1) - 0.5 * log2_big(ball_volume(n, epsilon));
}

double expected_near_collisions(int n, int epsilon, std::uint64_t k) {
    if (k < 2) throw std::invalid_argument("need at least two templates");
    const double kd = static_cast<double>(k);
    const double log2_pairs = std::log2(kd) + std::log2(kd - 1) - 1.0;
    return std::exp2(log2_pairs + log2_big(ball_volume(n, epsilon)) - n);
}

int epsilon_from_percent(int n, double pct) {
    if (pct < 0 || pct > 100) throw std::invalid_argument("percentage must lie in [0, 100]");
    // Tolerate binary rounding of products such as 0.1 * 70.
    return static_cast<int>(std::floor(pct * n / 100.0 + 1e-9));
}

int parse_epsilon(const std::string& text, int n) {
    if (text.empty()) throw std::invalid_argument("empty epsilon");
    std::size_t used = 0;
    if (text.back() == '%') {
        const double pct = std::stod(text.substr(0, text.size() - 1), &used);
        if (used != text.size() - 1) throw std::invalid_argument("malformed epsilon '" + text + "'");
        return epsilon_from_percent(n, pct);
    }
    const int eps = std::stoi(text, &used);
    if (used != text.size() || eps < 0) throw std::invalid_argument("malformed epsilon '" + text + "'");
    return eps;
}

CapacityReport capacity_report(int n, int epsilon, std::optional<std::uint64_t> k) {
    CapacityReport r;
    r.n = n;
    r.epsilon = epsilon;
    r.ball_volume = ball_volume(n, epsilon);
    r.dirichlet_k = dirichlet_bound(n, epsilon);
    r.birthday_log2_k = birthday_bound_log2(n, epsilon);
    r.first_cluster_log2_k = first_cluster_bound_log2(n, epsilon);
    r.meets_recommendation = n >= 512 && epsilon <= 51;
    r.k = k;
    if (k) {
        if (*k >= 2) r.expected_collisions = expected_near_collisions(n, epsilon, *k);
        r.k_within_capacity = std::log2(static_cast<double>(*k)) < r.birthday_log2_k;
    }
    return r;
}

std::vector<CurveRow> emit_curves(const CurveConfig& config) {
    std::vector<CurveRow> rows;
    auto add = [&rows](int n, double pct) {
        const int eps = epsilon_from_percent(n, pct);
        rows.push_back({n, eps, birthday_bound_log2(n, eps)});
    };
    for (double pct : config.panel_a_pct) {
        for (int n : config.panel_a_n) add(n, pct);
    }
    for (int n : config.panel_b_n) {
        for (double pct : config.panel_b_pct) add(n, pct);
    }
    return rows;
}

void write_curves_csv(std::ostream& out, const std::vector<CurveRow>& rows) {
    out << "n,epsilon,log2_k\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.6f", r.log2_k);
        out << r.n << ',' << r.epsilon << ',' << buf << '\n';
    }
}

}  // namespace nearcol
