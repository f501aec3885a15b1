#include "nearcol/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>
#include <thread>
#include <unordered_set>

namespace nearcol {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

void write_metadata(std::ostream& out, const char* kind, const ExperimentConfig& c) {
    out << "# " << kind << " reps=" << c.reps << " seed=" << c.seed << " solver=" << to_string(c.solver)
        << " schedule=" << to_string(c.schedule) << " max_iters=" << c.max_iters << '\n';
}

}  // namespace

std::uint64_t replication_seed(const ExperimentConfig& config, std::size_t rep) {
    std::uint64_t s = mix_seed(config.seed, static_cast<std::uint64_t>(config.n));
    s = mix_seed(s, static_cast<std::uint64_t>(config.epsilon));
    s = mix_seed(s, config.clients);
    return mix_seed(s, rep);
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

PartitionBenchRow bench_partition(const ExperimentConfig& config) {
    struct Rep {
        std::size_t algo = 0, greedy = 0;
        double algo_ms = 0, greedy_ms = 0;
    };
    std::vector<Rep> reps(config.reps);
    parallel_for(config.reps, [&](std::size_t r) {
        const std::uint64_t seed = replication_seed(config, r);
        const auto db = random_database(static_cast<std::size_t>(config.n), config.clients, seed);

        PartitionOptions options;
        options.search.solver = config.solver;
        options.search.sann.schedule = config.schedule;
        options.search.sann.max_iters = config.max_iters;
        options.seed = mix_seed(seed, 1);

        auto start = Clock::now();
        reps[r].algo = partition_database(db, config.epsilon, options).size();
        reps[r].algo_ms = ms_since(start);
        start = Clock::now();
        reps[r].greedy = partition_greedy(db, config.epsilon, mix_seed(seed, 2)).size();
        reps[r].greedy_ms = ms_since(start);
    });

    PartitionBenchRow row{config};
    std::size_t not_worse = 0;
    for (const auto& r : reps) {
        row.clust_mean += static_cast<double>(r.algo);
        row.clust_greedy_mean += static_cast<double>(r.greedy);
        row.time_ms += r.algo_ms;
        row.time_greedy_ms += r.greedy_ms;
        not_worse += r.algo <= r.greedy;
    }
    const auto count = static_cast<double>(std::max<std::size_t>(config.reps, 1));
    row.clust_mean /= count;
    row.clust_greedy_mean /= count;
    row.time_ms /= count;
    row.time_greedy_ms /= count;
    row.efficiency = row.clust_mean > 0 ? row.clust_greedy_mean / row.clust_mean : 0;
    row.not_worse_share = static_cast<double>(not_worse) / count;
    return row;
}

std::vector<Template> planted_group(const Template& center, int epsilon, std::size_t clients, Rng& rng) {
    const BigInt room = ball_volume(static_cast<int>(center.size()), std::min<int>(epsilon, int(center.size()))) - 1;
    if (BigInt(clients) > room) throw std::invalid_argument("ball too small for the requested number of clients");
    std::unordered_set<Template, TemplateHash> seen{center};
    std::vector<Template> group;
    group.reserve(clients);
    while (group.size() < clients) {
        Template t = random_in_ball(center, static_cast<std::size_t>(epsilon), rng);
        if (seen.insert(t).second) group.push_back(std::move(t));
    }
    return group;
}

SannBenchRow bench_sann(const ExperimentConfig& config) {
    struct Rep {
        bool miss = false;
        double ms = 0;
    };
    std::vector<Rep> reps(config.reps);
    parallel_for(config.reps, [&](std::size_t r) {
        const std::uint64_t seed = replication_seed(config, r);
        Rng rng(seed);
        const Template center = random_template(static_cast<std::size_t>(config.n), rng);
        const auto group = planted_group(center, config.epsilon, config.clients, rng);

        SannOptions options;
        options.schedule = config.schedule;
        options.max_iters = config.max_iters;
        options.seed = mix_seed(seed, 1);
        const auto start = Clock::now();
        const auto result = solve_sann(build_reduced_system(group, config.epsilon), options);
        reps[r].ms = ms_since(start);
        reps[r].miss = !result.found();
    });

    SannBenchRow row{config};
    std::size_t misses = 0;
    for (const auto& r : reps) {
        misses += r.miss;
        row.time_ms += r.ms;
    }
    const auto count = static_cast<double>(std::max<std::size_t>(config.reps, 1));
    row.error_pct = 100.0 * static_cast<double>(misses) / count;
    row.time_ms /= count;
    return row;
}

void write_partition_csv(std::ostream& out, const std::vector<PartitionBenchRow>& rows) {
    if (!rows.empty()) write_metadata(out, "bench", rows.front().config);
    out << "n,epsilon,clients,clust_mean,clust_greedy_mean,efficiency,time_ms,time_greedy_ms\n";
    for (const auto& r : rows) {
        out << r.config.n << ',' << r.config.epsilon << ',' << r.config.clients << ',' << fixed(r.clust_mean, 3) << ','
            << fixed(r.clust_greedy_mean, 3) << ',' << fixed(r.efficiency, 3) << ',' << fixed(r.time_ms, 3) << ','
            << fixed(r.time_greedy_ms, 3) << '\n';
    }
}

void write_sann_csv(std::ostream& out, const std::vector<SannBenchRow>& rows) {
    if (!rows.empty()) write_metadata(out, "sann-bench", rows.front().config);
    out << "n,epsilon,clients,error_pct,time_ms\n";
    for (const auto& r : rows) {
        out << r.config.n << ',' << r.config.epsilon << ',' << r.config.clients << ',' << fixed(r.error_pct, 2) << ','
            << fixed(r.time_ms, 3) << '\n';
    }
}

void write_cooling_csv(std::ostream& out, const std::vector<SannBenchRow>& rows) {
    if (!rows.empty()) write_metadata(out, "cooling-bench", rows.front().config);
    out << "schedule,n,epsilon,clients,error_pct,time_ms\n";
    for (const auto& r : rows) {
        out << to_string(r.config.schedule) << ',' << r.config.n << ',' << r.config.epsilon << ',' << r.config.clients
            << ',' << fixed(r.error_pct, 2) << ',' << fixed(r.time_ms, 3) << '\n';
    }
}

}  // namespace nearcol
