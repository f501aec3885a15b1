// Prints one PASS/FAIL line per acceptance criterion; exits non-zero when any fails.

#include "nearcol/attack.hpp"
#include "nearcol/bounds.hpp"
#include "nearcol/cover.hpp"
#include "nearcol/experiments.hpp"
#include "nearcol/partition.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <string>

namespace {

using namespace nearcol;
using testing::ball_intersection_brute;
using testing::naive_hamming;
using testing::parse_all;

int failures = 0;

void report(int id, bool ok, const std::string& detail, double seconds) {
    std::printf("%s criterion %d: %s (%.1fs)\n", ok ? "PASS" : "FAIL", id, detail.c_str(), seconds);
    std::fflush(stdout);
    if (!ok) ++failures;
}

template <class F>
void criterion(int id, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail += std::string(" exception: ") + e.what();
    }
    report(id, ok, detail, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// 1. Exact cover search against the enumerated ball intersection.
bool cover_oracle(std::string& detail) {
    Rng rng(1);
    int mismatches = 0, nonempty = 0;
    for (int inst = 0; inst < 500; ++inst) {
        const std::size_t n = 2 + rng() % 11;
        const int eps = int(rng() % (n / 2 + 2));
        const std::size_t k = 1 + rng() % std::min<std::size_t>(8, (std::size_t{1} << n) - 1);
        std::vector<Template> group;
        if (inst % 2) {
            const auto db = random_database(n, k, rng());
            group.assign(db.members().begin(), db.members().end());
        } else {
            // Clustered instances so that many intersections are non-empty.
            const auto c = random_template(n, rng);
            std::set<Template> seen;
            while (group.size() < k) {
                auto t = random_in_ball(c, std::size_t(eps), rng);
                if (seen.insert(t).second) group.push_back(std::move(t));
                if (seen.size() == std::size_t(ball_volume(int(n), eps))) break;
            }
        }
        const auto sys = build_reduced_system(group, eps);
        const auto brute = ball_intersection_brute(group, eps);
        const auto covers = enumerate_covers(sys);
        const std::set<Template> found(covers.begin(), covers.end());
        const auto exact = solve_exact(sys);
        const bool ok = found == brute && covers.size() == brute.size() && exact.found() == !brute.empty() &&
                        (!exact.found() || brute.count(*exact.center));
        mismatches += !ok;
        nonempty += !brute.empty();
    }
    detail = "500 instances n<=12, " + std::to_string(nonempty) + " with covers, " + std::to_string(mismatches) +
             " mismatches";
    return mismatches == 0;
}

// 2. Even-weight code of length 3.
bool example_one(std::string& detail) {
    const auto full = parse_all({"000", "011", "101", "110"});
    const auto r1 = solve_exact(build_reduced_system(full, 1));
    const auto r2 = solve_exact(build_reduced_system(parse_all({"011", "101", "110"}), 1));
    detail = "full D: " + std::string(to_string(r1.status)) + ", D without 000: " + std::string(to_string(r2.status)) +
             (r2.center ? " " + r2.center->to_string() : "");
    return r1.status == CoverStatus::NotFound && r2.found() && *r2.center == Template::from_string("111");
}

// 3. Seven-bit index partition example (1-based positions).
bool seven_bit_example(std::string& detail) {
    const auto p = index_partition(parse_all({"1011011", "1001011", "1011111", "1001110"}));
    std::ostringstream s;
    s << '{';
    for (std::size_t j = 0; j < p.classes.size(); ++j) {
        s << (j ? ",{" : "{");
        for (std::size_t q = 0; q < p.classes[j].size(); ++q) s << (q ? "," : "") << p.classes[j][q] + 1;
        s << '}';
    }
    s << '}';
    detail = "I = " + s.str();
    return s.str() == "{{1,2,4,6},{3},{5},{7}}";
}

ExperimentConfig config(int n, int eps, std::size_t k, std::size_t reps) {
    ExperimentConfig c;
    c.n = n;
    c.epsilon = eps;
    c.clients = k;
    c.reps = reps;
    return c;
}

// 4. Partition algorithm against the greedy baseline.
bool table_one(std::string& detail) {
    const auto r15 = bench_partition(config(15, 10, 50, 200));
    const auto r45 = bench_partition(config(45, 10, 50, 200));
    const bool ok15_mean = r15.clust_mean >= 0.9 && r15.clust_mean <= 1.5;
    const bool ok15_eff = r15.efficiency >= 20;
    const bool ok45 = r45.efficiency >= 1.6 && r45.efficiency <= 2.7;
    detail = "n=15 algo " + fmt("%.3f", r15.clust_mean) + (ok15_mean ? " ok" : " out") + ", greedy " +
             fmt("%.3f", r15.clust_greedy_mean) + ", eff " + fmt("%.2f", r15.efficiency) + (ok15_eff ? " ok" : " <20") +
             "; n=45 eff " + fmt("%.2f", r45.efficiency) + (ok45 ? " ok" : " out") + "; n=50 eff";
    bool ok50 = true;
    for (std::size_t k = 30; k <= 190; k += 20) {
        const auto r = bench_partition(config(50, 10, k, 200));
        const bool ok = r.efficiency >= 0.95 && r.efficiency <= 1.1;
        ok50 = ok50 && ok;
        detail += " k" + std::to_string(k) + "=" + fmt("%.2f", r.efficiency) + (ok ? "" : "!");
    }
    const auto r70 = bench_partition(config(70, 10, 30, 200));
    detail += " [n=70 k=30 eff " + fmt("%.2f", r70.efficiency) + ", informational]";
    return ok15_mean && ok15_eff && ok45 && ok50;
}

// 5. Planted-instance annealing error.
bool table_four(std::string& detail) {
    bool ok = true;
    for (int n : {25, 30, 35}) {
        auto c = config(n, 10, 50, 1000);
        c.solver = SolverKind::Sann;
        const auto r = bench_sann(c);
        ok = ok && r.error_pct <= 1.0;
        detail += "n=" + std::to_string(n) + " " + fmt("%.2f", r.error_pct) + "% ";
    }
    auto c = config(15, 10, 50, 1000);
    c.solver = SolverKind::Sann;
    const auto r15 = bench_sann(c);
    const bool ok15 = r15.error_pct >= 8.0;
    detail += "(<=1% each); n=15 " + fmt("%.2f", r15.error_pct) + "% (needs >=8%)";
    return ok && ok15;
}

// 6. Cooling schedules.
bool table_five(std::string& detail) {
    const int ns[] = {45, 55, 65};
    double err[4][3];
    for (int s = 0; s < 4; ++s) {
        for (int i = 0; i < 3; ++i) {
            auto c = config(ns[i], 10, 50, 200);
            c.solver = SolverKind::Sann;
            c.schedule = kAllSchedules[s];
            err[s][i] = bench_sann(c).error_pct;
        }
    }
    bool spread_ok = true, monotone_ok = true;
    for (int i = 0; i < 3; ++i) {
        double lo = 100, hi = 0;
        for (int s = 0; s < 4; ++s) {
            lo = std::min(lo, err[s][i]);
            hi = std::max(hi, err[s][i]);
        }
        spread_ok = spread_ok && hi - lo <= 10.0;
    }
    for (int s = 0; s < 4; ++s) {
        const bool inc = err[s][0] <= err[s][1] && err[s][1] <= err[s][2] && err[s][2] > err[s][0];
        monotone_ok = monotone_ok && inc;
        detail += std::string(to_string(kAllSchedules[s])) + " " + fmt("%.1f", err[s][0]) + "/" + fmt("%.1f", err[s][1]) +
                  "/" + fmt("%.1f", err[s][2]) + "; ";
    }
    detail += std::string("spread<=10pp ") + (spread_ok ? "ok" : "no") + ", increasing " + (monotone_ok ? "ok" : "no");
    return spread_ok && monotone_ok;
}

// 7. Bounds: exact small values and the birthday probability by simulation.
bool bounds_check(std::string& detail) {
    const bool exact = ball_volume(3, 1) == 4 && dirichlet_bound(3, 1) == 2;
    detail = std::string("(3,1) S=") + ball_volume(3, 1).str() + " dirichlet=" + dirichlet_bound(3, 1).str();
    bool ok = exact;
    Rng rng(7);
    for (auto [n, eps] : {std::pair{16, 2}, {20, 3}, {24, 4}}) {
        const auto k = static_cast<std::size_t>(std::llround(std::exp2(birthday_bound_log2(n, eps))));
        int hits = 0;
        std::vector<Template> db(k);
        for (int t = 0; t < 2000; ++t) {
            for (auto& x : db) x = random_template(std::size_t(n), rng);
            bool hit = false;
            for (std::size_t i = 0; i < k && !hit; ++i) {
                for (std::size_t j = i + 1; j < k && !hit; ++j) hit = hamming(db[i], db[j]) <= std::size_t(eps);
            }
            hits += hit;
        }
        const double p = hits / 2000.0;
        ok = ok && p >= 0.35 && p <= 0.65;
        detail += "; (" + std::to_string(n) + "," + std::to_string(eps) + ") k=" + std::to_string(k) + " P=" +
                  fmt("%.3f", p);
    }
    return ok;
}

// 8. Ball intersection against enumeration.
bool intersection_check(std::string& detail) {
    const int n = 10, eps = 3;
    const auto space = testing::whole_space(n);
    const Template a(n);
    int bad = 0;
    for (int d = 0; d <= n; ++d) {
        Template b(n);
        for (int i = 0; i < d; ++i) b.set(std::size_t(i), true);
        long count = 0;
        for (const auto& p : space) count += naive_hamming(p, a) <= eps && naive_hamming(p, b) <= eps;
        bad += ball_intersection(d, n, eps) != count;
    }
    detail = "n=10 eps=3 d=0..10, " + std::to_string(bad) + " mismatches";
    return bad == 0;
}

// 9. Both attacks reduce to the partition of criterion 4.
bool attack_check(std::string& detail) {
    const auto c = config(15, 10, 50, 200);
    std::size_t equal = 0, full_coverage = 0;
    double clusters = 0, items = 0;
    for (std::size_t r = 0; r < c.reps; ++r) {
        const auto seed = replication_seed(c, r);
        const auto hidden = random_database(15, 50, seed);
        const auto other = random_database(15, 50, mix_seed(seed, 3));
        PartitionOptions opt;
        opt.seed = mix_seed(seed, 1);
        const auto expected = partition_database(hidden, 10, opt).size();
        clusters += double(expected);

        attack::AttackOptions aopt;
        aopt.partition = opt;
        const auto f = attack::master_feature_attack(
            attack::leak_of(attack::enroll(hidden, other), attack::AttackKind::MasterFeatureSet), 10, aopt);
        const auto k = attack::masterkey_attack(
            attack::leak_of(attack::enroll(other, hidden), attack::AttackKind::MasterKeySet), 10, aopt);
        items += double(f.items.size());
        equal += f.items.size() == expected && k.items.size() == expected;
        full_coverage += f.coverage == 1.0 && k.coverage == 1.0;
    }
    detail = "200 leaks n=15 tau=10 k=50: sizes equal cluster count in " + std::to_string(equal) +
             ", full coverage in " + std::to_string(full_coverage) + ", mean set size " + fmt("%.3f", items / 200) +
             " vs clusters " + fmt("%.3f", clusters / 200);
    return equal == 200 && full_coverage == 200;
}

// 10. Absolute timings are hardware bound; what is checked instead is that
// timing is reported and every non-timing column replays exactly.
bool timing_substitute(std::string& detail) {
    auto c = config(30, 10, 50, 50);
    const auto a = bench_partition(c), b = bench_partition(c);
    c.solver = SolverKind::Sann;
    const auto s1 = bench_sann(c), s2 = bench_sann(c);
    const bool replay = a.clust_mean == b.clust_mean && a.clust_greedy_mean == b.clust_greedy_mean &&
                        s1.error_pct == s2.error_pct;
    const bool timed = std::isfinite(a.time_ms) && a.time_ms > 0 && a.time_greedy_ms > 0 && s1.time_ms > 0;
    detail = "timings reported (algo " + fmt("%.3f", a.time_ms) + " ms, greedy " + fmt("%.3f", a.time_greedy_ms) +
             " ms, sann " + fmt("%.3f", s1.time_ms) + " ms), seeded replay " + (replay ? "identical" : "differs");
    return replay && timed;
}

}  // namespace

int main() {
    criterion(1, cover_oracle);
    criterion(2, example_one);
    criterion(3, seven_bit_example);
    criterion(4, table_one);
    criterion(5, table_four);
    criterion(6, table_five);
    criterion(7, bounds_check);
    criterion(8, intersection_check);
    criterion(9, attack_check);
    criterion(10, timing_substitute);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
