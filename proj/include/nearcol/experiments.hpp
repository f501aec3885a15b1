#pragma once

#include "nearcol/cover.hpp"
#include "nearcol/partition.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

namespace nearcol {

struct ExperimentConfig {
    int n = 15;
    int epsilon = 10;
    std::size_t clients = 50;
    std::size_t reps = 200;
    SolverKind solver = SolverKind::Exact;
    CoolingSchedule schedule = CoolingSchedule::Additive;
    std::uint64_t seed = 1;
    std::uint64_t max_iters = 200'000;
};

/// Seed of replication `rep` for a configuration; independent of the pool layout.
std::uint64_t replication_seed(const ExperimentConfig& config, std::size_t rep);

/// Runs fn(0..count-1) over a pool of worker threads.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

struct PartitionBenchRow {
    ExperimentConfig config;
    double clust_mean = 0;
    double clust_greedy_mean = 0;
    double efficiency = 0;       // clust_greedy_mean / clust_mean
    double not_worse_share = 0;  // share of runs with algorithm entries <= greedy entries
    double time_ms = 0;
    double time_greedy_ms = 0;
};

/// Seeded replications of partition_database and partition_greedy on fresh
/// random databases.
PartitionBenchRow bench_partition(const ExperimentConfig& config);

/// `clients` distinct templates drawn uniformly from B(center, epsilon),
/// excluding the center itself.
std::vector<Template> planted_group(const Template& center, int epsilon, std::size_t clients, Rng& rng);

struct SannBenchRow {
    ExperimentConfig config;
    double error_pct = 0;
    double time_ms = 0;
};

/// Planted-instance miss rate of the annealing cover search.
SannBenchRow bench_sann(const ExperimentConfig& config);

void write_partition_csv(std::ostream& out, const std::vector<PartitionBenchRow>& rows);
void write_sann_csv(std::ostream& out, const std::vector<SannBenchRow>& rows);
void write_cooling_csv(std::ostream& out, const std::vector<SannBenchRow>& rows);

}  // namespace nearcol
