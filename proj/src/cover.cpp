#include "nearcol/cover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace nearcol {

namespace {

using Clock = std::chrono::steady_clock;

void require_group(std::span<const Template> group, std::size_t reference_index) {
    if (group.empty()) throw std::invalid_argument("group must not be empty");
    if (reference_index >= group.size()) throw std::invalid_argument("reference index outside the group");
    for (const auto& t : group) {
        if (t.size() != group.front().size()) throw DimensionMismatch("group members differ in dimension");
    }
}

}  // namespace

IndexPartition index_partition(std::span<const Template> group, std::size_t reference_index) {
    require_group(group, reference_index);
    const std::size_t n = group.front().size();
    const std::size_t rows = group.size();
    const Template& ref = group[reference_index];

    // Column c normalised against the reference row: bit i is set when member
    // i differs from the reference at c. Identical-or-opposite columns share
    // the same normalised column.
    IndexPartition part;
    part.reference_index = reference_index;
    part.reference = ref;
    std::unordered_map<Template, std::size_t, TemplateHash> class_of;
    std::vector<Template> patterns;
    for (std::size_t c = 0; c < n; ++c) {
        Template column(rows);
        const bool r = ref.get(c);
        for (std::size_t i = 0; i < rows; ++i) {
            if (group[i].get(c) != r) column.set(i, true);
        }
        auto [it, inserted] = class_of.try_emplace(column, part.classes.size());
        if (inserted) {
            part.classes.emplace_back();
            patterns.push_back(std::move(column));
        }
        part.classes[it->second].push_back(c);
    }

    part.signs.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(part.classes.size()));
    for (std::size_t j = 0; j < part.classes.size(); ++j) {
        for (std::size_t i = 0; i < rows; ++i) {
            part.signs(Eigen::Index(i), Eigen::Index(j)) = patterns[j].get(i) ? -1 : 1;
        }
    }
    return part;
}

bool positions_uniform(std::span<const Template> group, std::span<const std::size_t> positions) {
    for (std::size_t a = 0; a < group.size(); ++a) {
        for (std::size_t b = a + 1; b < group.size(); ++b) {
            const auto d = hamming_on(group[a], group[b], positions);
            if (d != 0 && d != positions.size()) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------

bool ReducedSystem::in_bounds(const IntVector& flips) const {
    return flips.size() == bounds.size() && (flips.array() >= 0).all() && (flips.array() <= bounds.array()).all();
}

bool ReducedSystem::feasible(const IntVector& flips) const {
    return in_bounds(flips) && (slack(flips).array() >= 0).all();
}

int ReducedSystem::energy(const IntVector& flips) const { return slack(flips).array().min(0).sum(); }

std::uint64_t ReducedSystem::box_size() const noexcept {
    std::uint64_t total = 1;
    for (Eigen::Index j = 0; j < bounds.size(); ++j) {
        const auto f = static_cast<std::uint64_t>(bounds(j)) + 1;
        if (total > std::numeric_limits<std::uint64_t>::max() / f) return std::numeric_limits<std::uint64_t>::max();
        total *= f;
    }
    return total;
}

ReducedSystem build_reduced_system(std::span<const Template> group, int epsilon, std::size_t reference_index) {
    if (epsilon < 0) throw std::invalid_argument("epsilon must be non-negative");
    ReducedSystem sys;
    sys.partition = index_partition(group, reference_index);
    sys.epsilon = epsilon;
    const auto& ref = sys.partition.reference;
    sys.dist_to_ref.resize(static_cast<Eigen::Index>(group.size()));
    for (std::size_t i = 0; i < group.size(); ++i) {
        sys.dist_to_ref(Eigen::Index(i)) = static_cast<int>(hamming(group[i], ref));
    }
    sys.bounds.resize(static_cast<Eigen::Index>(sys.partition.num_classes()));
    for (std::size_t j = 0; j < sys.partition.num_classes(); ++j) {
        sys.bounds(Eigen::Index(j)) = std::min(epsilon, static_cast<int>(sys.partition.classes[j].size()));
    }
    return sys;
}

IntVector class_distances(const Template& p, const ReducedSystem& sys) {
    const auto& part = sys.partition;
    IntVector out(static_cast<Eigen::Index>(part.num_classes()));
    for (std::size_t j = 0; j < part.num_classes(); ++j) {
        out(Eigen::Index(j)) = static_cast<int>(hamming_on(p, part.reference, part.classes[j]));
    }
    return out;
}

Template decode(const IntVector& flips, const ReducedSystem& sys) {
    if (!sys.feasible(flips)) throw std::invalid_argument("flip-count vector is not feasible");
    Template p = sys.partition.reference;
    for (std::size_t j = 0; j < sys.partition.num_classes(); ++j) {
        const auto& cls = sys.partition.classes[j];
        for (int f = 0; f < flips(Eigen::Index(j)); ++f) p.flip(cls[static_cast<std::size_t>(f)]);
    }
    return p;
}

std::vector<Template> expand(const IntVector& flips, const ReducedSystem& sys) {
    if (!sys.in_bounds(flips)) throw std::invalid_argument("flip-count vector out of bounds");
    std::vector<Template> out{sys.partition.reference};
    for (std::size_t j = 0; j < sys.partition.num_classes(); ++j) {
        const auto& cls = sys.partition.classes[j];
        const auto choose = static_cast<std::size_t>(flips(Eigen::Index(j)));
        if (choose == 0) continue;
        // All size-`choose` subsets of the class via a selection mask.
        std::vector<char> mask(cls.size(), 0);
        std::fill(mask.end() - static_cast<std::ptrdiff_t>(choose), mask.end(), 1);
        std::vector<Template> next;
        do {
            for (const auto& base : out) {
                Template t = base;
                for (std::size_t q = 0; q < cls.size(); ++q) {
                    if (mask[q]) t.flip(cls[q]);
                }
                next.push_back(std::move(t));
            }
        } while (std::next_permutation(mask.begin(), mask.end()));
        out = std::move(next);
    }
    return out;
}

std::string_view to_string(CoverStatus s) noexcept {
    switch (s) {
        case CoverStatus::Found: return "found";
        case CoverStatus::NotFound: return "not_found";
        case CoverStatus::Unknown: return "unknown";
    }
    return "?";
}

std::string_view to_string(SolverKind s) noexcept { return s == SolverKind::Exact ? "exact" : "sann"; }

std::optional<SolverKind> parse_solver(std::string_view name) noexcept {
    if (name == "exact") return SolverKind::Exact;
    if (name == "sann") return SolverKind::Sann;
    return std::nullopt;
}

// --- exact search -------------------------------------------------------------

namespace {

class BoundedSearch {
public:
    BoundedSearch(const ReducedSystem& sys, std::uint64_t budget) : sys_(sys), budget_(budget) {
        rows_ = sys.rows();
        cols_ = sys.cols();
        rhs_.resize(rows_);
        for (std::size_t i = 0; i < rows_; ++i) rhs_[i] = sys.epsilon - sys.dist_to_ref(Eigen::Index(i));

        // Branch first on classes where many currently violated rows disagree
        // with the reference: flipping there relieves the most constraints.
        order_.resize(cols_);
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::vector<int> score(cols_, 0);
        for (std::size_t j = 0; j < cols_; ++j) {
            for (std::size_t i = 0; i < rows_; ++i) {
                if (rhs_[i] < 0 && sign(i, j) < 0) score[j] += 1;
            }
        }
        std::stable_sort(order_.begin(), order_.end(), [&](auto a, auto b) { return score[a] > score[b]; });

        // relief_[t * rows + i]: total decrease row i can still get from order_[t..].
        relief_.assign((cols_ + 1) * rows_, 0);
        for (std::size_t t = cols_; t-- > 0;) {
            const std::size_t j = order_[t];
            for (std::size_t i = 0; i < rows_; ++i) {
                relief_[t * rows_ + i] = relief_[(t + 1) * rows_ + i] + (sign(i, j) < 0 ? sys.bounds(Eigen::Index(j)) : 0);
            }
        }
        lhs_.assign(rows_, 0);
        flips_ = IntVector::Zero(static_cast<Eigen::Index>(cols_));
    }

    // Returns true when stopped early (solution found in first-only mode, or budget hit).
    bool run(bool first_only) {
        first_only_ = first_only;
        descend(0, 0);
        return stopped_;
    }

    bool exhausted_budget() const noexcept { return budget_hit_; }
    std::uint64_t nodes() const noexcept { return nodes_; }
    std::vector<IntVector>& solutions() noexcept { return solutions_; }

private:
    int sign(std::size_t i, std::size_t j) const { return sys_.partition.signs(Eigen::Index(i), Eigen::Index(j)); }

    bool satisfied_now() const {
        for (std::size_t i = 0; i < rows_; ++i) {
            if (lhs_[i] > rhs_[i]) return false;
        }
        return true;
    }

    bool viable(std::size_t depth, int used) const {
        const int budget = sys_.epsilon - used;
        if (budget < 0) return false;
        const int* relief = &relief_[depth * rows_];
        for (std::size_t i = 0; i < rows_; ++i) {
            if (lhs_[i] - std::min(relief[i], budget) > rhs_[i]) return false;
        }
        return true;
    }

    void record() { solutions_.push_back(flips_); }

    void descend(std::size_t depth, int used) {
        if (stopped_) return;
        if (first_only_ && satisfied_now()) {
            // Remaining coordinates at zero leave every row unchanged.
            record();
            stopped_ = true;
            return;
        }
        if (depth == cols_) {
            if (satisfied_now()) record();
            return;
        }
        const std::size_t j = order_[depth];
        const int bound = sys_.bounds(Eigen::Index(j));
        const auto* col = sys_.partition.signs.col(Eigen::Index(j)).data();
        for (int v = 0; v <= bound; ++v) {
            if (budget_ != 0 && nodes_ >= budget_) {
                budget_hit_ = stopped_ = true;
                return;
            }
            ++nodes_;
            if (v > 0) {
                for (std::size_t i = 0; i < rows_; ++i) lhs_[i] += col[i];
            }
            flips_(Eigen::Index(j)) = v;
            if (viable(depth + 1, used + v)) descend(depth + 1, used + v);
            if (stopped_) return;
        }
        for (std::size_t i = 0; i < rows_; ++i) lhs_[i] -= bound * col[i];
        flips_(Eigen::Index(j)) = 0;
    }

    const ReducedSystem& sys_;
    std::uint64_t budget_;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<int> rhs_;
    std::vector<std::size_t> order_;
    std::vector<int> relief_;
    std::vector<int> lhs_;
    IntVector flips_;
    std::vector<IntVector> solutions_;
    std::uint64_t nodes_ = 0;
    bool first_only_ = true;
    bool stopped_ = false;
    bool budget_hit_ = false;
};

}  // namespace

CoverResult solve_exact(const ReducedSystem& sys, const ExactOptions& options) {
    const auto start = Clock::now();
    CoverResult result;
    result.solver = SolverKind::Exact;
    BoundedSearch search(sys, options.node_budget);
    search.run(true);
    result.iterations = search.nodes();
    if (!search.solutions().empty()) {
        result.status = CoverStatus::Found;
        result.flips = search.solutions().front();
        result.center = decode(*result.flips, sys);
    } else {
        result.status = search.exhausted_budget() ? CoverStatus::Unknown : CoverStatus::NotFound;
    }
    result.elapsed = Clock::now() - start;
    return result;
}

std::vector<IntVector> enumerate_feasible(const ReducedSystem& sys) {
    BoundedSearch search(sys, 0);
    search.run(false);
    return std::move(search.solutions());
}

std::vector<Template> enumerate_covers(const ReducedSystem& sys) {
    std::vector<Template> out;
    for (const auto& flips : enumerate_feasible(sys)) {
        auto templates = expand(flips, sys);
        out.insert(out.end(), std::make_move_iterator(templates.begin()), std::make_move_iterator(templates.end()));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// --- simulated annealing ----------------------------------------------------------

std::string_view to_string(CoolingSchedule s) noexcept {
    switch (s) {
        case CoolingSchedule::Additive: return "additive";
        case CoolingSchedule::LinearMultiplicative: return "linear-multiplicative";
        case CoolingSchedule::Exponential: return "exponential";
        case CoolingSchedule::Logarithmic: return "logarithmic";
    }
    return "?";
}

std::optional<CoolingSchedule> parse_schedule(std::string_view name) noexcept {
    for (auto s : kAllSchedules) {
        if (to_string(s) == name) return s;
    }
    return std::nullopt;
}

double cooling_temperature(CoolingSchedule schedule, double t0, std::uint64_t step, std::uint64_t max_steps,
                           const CoolingConstants& constants) {
    if (!(t0 > 0)) throw std::invalid_argument("initial temperature must be positive");
    if (max_steps == 0 || step > max_steps) throw std::invalid_argument("step must lie in [0, max_steps]");
    if (!(constants.alpha > 0)) throw std::invalid_argument("alpha must be positive");
    const auto k = static_cast<double>(step);
    switch (schedule) {
        case CoolingSchedule::Additive:
            return t0 * (1.0 - k / static_cast<double>(max_steps));
        case CoolingSchedule::LinearMultiplicative:
            return t0 / (1.0 + constants.alpha * k);
        case CoolingSchedule::Exponential: {
            const double beta =
                constants.beta == 0.0 ? std::pow(1e-3, 1.0 / static_cast<double>(max_steps)) : constants.beta;
            if (!(beta > 0 && beta < 1)) throw std::invalid_argument("beta must lie in (0, 1)");
            return t0 * std::pow(beta, k);
        }
        case CoolingSchedule::Logarithmic:
            return t0 / (1.0 + constants.alpha * std::log1p(k));
    }
    throw std::invalid_argument("unknown cooling schedule");
}

CoverResult solve_sann(const ReducedSystem& sys, const SannOptions& options) {
    if (options.max_iters == 0) throw std::invalid_argument("max_iters must be at least 1");
    const auto start = Clock::now();
    CoverResult result;
    result.solver = SolverKind::Sann;

    const auto rows = static_cast<Eigen::Index>(sys.rows());
    const auto cols = static_cast<Eigen::Index>(sys.cols());
    IntVector flips = IntVector::Zero(cols);
    IntVector slack = sys.rhs();
    int energy = slack.array().min(0).sum();

    auto finish = [&](CoverStatus status) {
        result.status = status;
        if (status == CoverStatus::Found) {
            result.flips = flips;
            result.center = decode(flips, sys);
        }
        result.elapsed = Clock::now() - start;
        return result;
    };

    if (energy == 0) return finish(CoverStatus::Found);
    if ((sys.bounds.array() == 0).all()) return finish(CoverStatus::Unknown);

    // A single coordinate step moves each row's slack by at most one, so
    // |dE| <= rows and every first move passes the Metropolis test.
    const double t0 = static_cast<double>(rows);
    CoolingConstants constants = options.constants;
    if (options.schedule == CoolingSchedule::Exponential && constants.beta == 0.0) {
        constants.beta = std::pow(1e-3, 1.0 / static_cast<double>(options.max_iters));
    }

    Rng rng(options.seed);
    std::uniform_int_distribution<Eigen::Index> pick_coord(0, cols - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto& signs = sys.partition.signs;

    auto delta_energy = [&](Eigen::Index j, int step) {
        const int* col = signs.col(j).data();
        int delta = 0;
        for (Eigen::Index i = 0; i < rows; ++i) {
            const int before = slack(i);
            const int after = before - step * col[i];
            delta += std::min(0, after) - std::min(0, before);
        }
        return delta;
    };

    for (std::uint64_t it = 0; it < options.max_iters; ++it) {
        result.iterations = it + 1;
        const double temperature = cooling_temperature(options.schedule, t0, it, options.max_iters, constants);

        const Eigen::Index j = pick_coord(rng);
        const bool can_up = flips(j) < sys.bounds(j);
        const bool can_down = flips(j) > 0;
        int step = 0;
        int delta = 0;
        if (can_up && can_down) {
            const int up = delta_energy(j, +1);
            const int down = delta_energy(j, -1);
            const bool prefer_up = up > down || (up == down && unit(rng) < 0.5);
            const bool take_preferred = unit(rng) < options.uphill_bias;
            step = (prefer_up == take_preferred) ? +1 : -1;
            delta = step > 0 ? up : down;
        } else if (can_up || can_down) {
            step = can_up ? +1 : -1;
            delta = delta_energy(j, step);
        } else {
            continue;
        }

        const bool accept = delta >= 0 || (temperature > 0 && unit(rng) < std::exp(delta / temperature));
        if (!accept) continue;
        flips(j) += step;
        slack -= step * signs.col(j);
        energy += delta;
        if (energy == 0) return finish(CoverStatus::Found);
    }
    return finish(CoverStatus::Unknown);
}

CoverResult find_cover(std::span<const Template> group, int epsilon, const CoverSearch& search) {
    const auto sys = build_reduced_system(group, epsilon);
    return search.solver == SolverKind::Exact ? solve_exact(sys, search.exact) : solve_sann(sys, search.sann);
}

}  // namespace nearcol
