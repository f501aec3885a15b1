#include "cli.hpp"

#include "nearcol/attack.hpp"
#include "nearcol/bounds.hpp"
#include "nearcol/core.hpp"
#include "nearcol/cover.hpp"
#include "nearcol/experiments.hpp"
#include "nearcol/partition.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

namespace nearcol::cli {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

const std::vector<std::string> kSolverNames{"exact", "sann"};
const std::vector<std::string> kScheduleNames{"additive", "linear-multiplicative", "exponential", "logarithmic"};

TemplateDatabase load_database(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return parse_database(in);
}

// Writes to `path`, or to `fallback` when path is empty or "-".
void emit(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& body) {
    if (path.empty() || path == "-") {
        body(fallback);
        return;
    }
    std::ofstream file(path);
    if (!file) throw DataError("cannot write '" + path + "'");
    body(file);
    if (!file) throw DataError("failed writing '" + path + "'");
}

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct SearchFlags {
    std::string solver = "exact";
    std::string schedule = "additive";
    std::uint64_t seed = 1;
    std::uint64_t max_iters = 200'000;

    void attach(CLI::App& app) {
        app.add_option("--solver", solver, "cover search: exact or sann")->check(CLI::IsMember(kSolverNames));
        app.add_option("--schedule", schedule, "annealing cooling schedule")->check(CLI::IsMember(kScheduleNames));
        app.add_option("--seed", seed, "random seed");
        app.add_option("--max-iters", max_iters, "annealing iteration budget")->check(CLI::PositiveNumber);
    }

    CoverSearch search() const {
        CoverSearch s;
        s.solver = *parse_solver(solver);
        s.sann.schedule = *parse_schedule(schedule);
        s.sann.max_iters = max_iters;
        s.sann.seed = seed;
        return s;
    }
};

struct SweepFlags {
    std::vector<int> n{15};
    std::vector<std::string> epsilon{"10"};
    std::vector<std::size_t> clients{50};
    std::size_t reps = 200;
    std::string out;
    SearchFlags search;

    void attach(CLI::App& app) {
        app.add_option("--n", n, "space dimensions (comma separated)")->delimiter(',');
        app.add_option("--epsilon", epsilon, "thresholds, absolute or P% of n (comma separated)")->delimiter(',');
        app.add_option("--clients", clients, "database sizes (comma separated)")->delimiter(',');
        app.add_option("--reps", reps, "replications per configuration")->check(CLI::PositiveNumber);
        app.add_option("--out", out, "output CSV path (default stdout)");
        search.attach(app);
    }

    std::vector<ExperimentConfig> configs() const {
        std::vector<ExperimentConfig> out_configs;
        for (int dim : n) {
            if (dim < 1) throw std::invalid_argument("--n must be positive");
            for (const auto& eps_text : epsilon) {
                for (auto k : clients) {
                    ExperimentConfig c;
                    c.n = dim;
                    c.epsilon = parse_epsilon(eps_text, dim);
                    c.clients = k;
                    c.reps = reps;
                    c.solver = *parse_solver(search.solver);
                    c.schedule = *parse_schedule(search.schedule);
                    c.seed = search.seed;
                    c.max_iters = search.max_iters;
                    out_configs.push_back(c);
                }
            }
        }
        return out_configs;
    }
};

json mts_json(const MasterTemplateSet& mts) {
    json entries = json::array();
    for (const auto& e : mts.entries) entries.push_back({{"center", e.center.to_string()}, {"size", e.covered.size()}});
    return entries;
}

std::string big_string(const BigInt& x) { return x.str(); }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Near-collision analysis of binary biometric template databases", "nearcol"};
    app.require_subcommand(1);

    // gen --------------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "generate a random template database or leak file");
    int gen_n = 0;
    std::size_t gen_k = 0;
    std::uint64_t gen_seed = 1;
    std::string gen_leak, gen_out;
    int gen_ball = -1;
    gen->add_option("--n", gen_n, "dimension")->required()->check(CLI::PositiveNumber);
    gen->add_option("--clients", gen_k, "number of templates")->required()->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "random seed");
    gen->add_option("--ball", gen_ball, "draw members inside a ball of this radius around a random center");
    gen->add_option("--leak", gen_leak, "emit a leak file for this attack kind instead of a database")
        ->check(CLI::IsMember({"feature", "key"}));
    gen->add_option("--out", gen_out, "output path (default stdout)");

    // partition / greedy -----------------------------------------------------------
    auto* part = app.add_subcommand("partition", "partition a database into an epsilon-master-template-set");
    auto* greedy = app.add_subcommand("greedy", "greedy baseline partition");
    std::string part_db, part_eps, part_out;
    SearchFlags part_search;
    for (auto* cmd : {part, greedy}) {
        cmd->add_option("--db", part_db, "template database file")->required();
        cmd->add_option("--epsilon", part_eps, "threshold, absolute or P% of n")->required();
        cmd->add_option("--out", part_out, "MTS output path (default stdout)");
    }
    part_search.attach(*part);
    greedy->add_option("--seed", part_search.seed, "random seed");

    // cover --------------------------------------------------------------------------
    auto* cover = app.add_subcommand("cover", "search a cover template for a whole database");
    std::string cover_db, cover_eps;
    bool cover_all = false;
    SearchFlags cover_search;
    cover->add_option("--db", cover_db, "template database file")->required();
    cover->add_option("--epsilon", cover_eps, "threshold, absolute or P% of n")->required();
    cover->add_flag("--all", cover_all, "enumerate every cover template (exact search only)");
    cover_search.attach(*cover);

    // sweeps -------------------------------------------------------------------------
    auto* bench = app.add_subcommand("bench", "partition algorithm against the greedy baseline (CSV)");
    SweepFlags bench_flags;
    bench_flags.attach(*bench);

    auto* sann = app.add_subcommand("sann-bench", "planted-instance error rate of the annealing search (CSV)");
    SweepFlags sann_flags;
    sann_flags.n = {15, 20, 25, 30, 35, 40, 45};
    sann_flags.search.solver = "sann";
    sann_flags.attach(*sann);

    auto* cooling = app.add_subcommand("cooling-bench", "compare the four cooling schedules (CSV)");
    SweepFlags cooling_flags;
    cooling_flags.n = {45, 50, 55, 60, 65};
    cooling_flags.search.solver = "sann";
    cooling_flags.attach(*cooling);

    // bounds / curves -----------------------------------------------------------------
    auto* bounds = app.add_subcommand("bounds", "database capacity for (n, epsilon)");
    int bounds_n = 0;
    std::string bounds_eps;
    std::uint64_t bounds_k = 0;
    bool bounds_json = false;
    bounds->add_option("--n", bounds_n, "dimension")->required()->check(CLI::PositiveNumber);
    bounds->add_option("--epsilon", bounds_eps, "threshold, absolute or P% of n")->required();
    bounds->add_option("--clients", bounds_k, "database size to assess");
    bounds->add_flag("--json", bounds_json, "emit JSON");

    auto* curves = app.add_subcommand("curves", "log2 k against n and epsilon (CSV)");
    std::string curves_out;
    CurveConfig curve_config;
    curves->add_option("--n", curve_config.panel_b_n, "dimensions for the epsilon sweep")->delimiter(',');
    curves->add_option("--out", curves_out, "output CSV path (default stdout)");

    // attack -------------------------------------------------------------------------------
    auto* attack_cmd = app.add_subcommand("attack", "masterkey-set / master-feature-set attack on a leak file");
    std::string attack_leak, attack_kind = "feature";
    int attack_tau = 0;
    bool attack_no_partition = false;
    SearchFlags attack_search;
    attack_cmd->add_option("--leak", attack_leak, "leak file")->required();
    attack_cmd->add_option("--kind", attack_kind, "feature or key")
        ->check(CLI::IsMember({"feature", "key", "master-feature-set", "masterkey-set"}));
    attack_cmd->add_option("--tau,--epsilon", attack_tau, "matching threshold")->required()->check(CLI::NonNegativeNumber);
    attack_cmd->add_flag("--no-partition", attack_no_partition, "return every recovered value");
    attack_search.attach(*attack_cmd);

    // add-user / remove-user --------------------------------------------------------------------
    auto* add = app.add_subcommand("add-user", "enroll a template against an existing MTS");
    std::string add_db, add_mts, add_id, add_bits, add_eps, add_out_db, add_out_mts;
    add->add_option("--db", add_db, "template database file")->required();
    add->add_option("--mts", add_mts, "master-template-set file")->required();
    add->add_option("--epsilon", add_eps, "threshold, absolute or P% of n")->required();
    add->add_option("--id", add_id, "new user id")->required();
    add->add_option("--bits", add_bits, "new template bit string")->required();
    add->add_option("--out-db", add_out_db, "write the updated database here");
    add->add_option("--out-mts", add_out_mts, "write the updated MTS here");

    auto* remove = app.add_subcommand("remove-user", "revoke a user and report overlapping acceptance regions");
    std::string rm_db, rm_id, rm_eps, rm_out_db;
    std::uint64_t rm_prior = 0;
    remove->add_option("--db", rm_db, "template database file")->required();
    remove->add_option("--id", rm_id, "user id to remove")->required();
    remove->add_option("--epsilon", rm_eps, "threshold, absolute or P% of n")->required();
    remove->add_option("--removed", rm_prior, "users already removed from this system");
    remove->add_option("--out-db", rm_out_db, "write the updated database here");

    std::vector<const char*> argv{"nearcol"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return e.get_exit_code() == 0 ? kOk : kUsage;
    }

    try {
        if (gen->parsed()) {
            Rng rng(gen_seed);
            auto draw = [&](std::uint64_t seed) {
                if (gen_ball < 0) return random_database(std::size_t(gen_n), gen_k, seed);
                Rng local(seed);
                const Template center = random_template(std::size_t(gen_n), local);
                auto group = planted_group(center, gen_ball, gen_k, local);
                std::vector<std::string> ids;
                for (std::size_t i = 0; i < group.size(); ++i) ids.push_back("u" + std::to_string(i + 1));
                return TemplateDatabase(std::move(ids), std::move(group));
            };
            if (gen_leak.empty()) {
                const auto db = draw(gen_seed);
                emit(gen_out, out, [&](std::ostream& o) { write_database(o, db); });
            } else {
                const auto kind = *attack::parse_kind(gen_leak);
                // The attacked side is drawn (optionally planted); the other side is uniform.
                const auto hidden = draw(gen_seed);
                const auto other = random_database(std::size_t(gen_n), gen_k, mix_seed(gen_seed, 1));
                const auto records = kind == attack::AttackKind::MasterFeatureSet ? attack::enroll(hidden, other)
                                                                                   : attack::enroll(other, hidden);
                const auto leak = attack::leak_of(records, kind);
                emit(gen_out, out, [&](std::ostream& o) { attack::write_leak(o, leak); });
            }
            return kOk;
        }

        if (part->parsed() || greedy->parsed()) {
            const auto db = load_database(part_db);
            const int eps = parse_epsilon(part_eps, int(db.dim()));
            const auto start = Clock::now();
            MasterTemplateSet mts;
            if (part->parsed()) {
                PartitionOptions options;
                options.search = part_search.search();
                options.seed = part_search.seed;
                mts = partition_database(db, eps, options);
            } else {
                mts = partition_greedy(db, eps, part_search.seed);
            }
            const double ms = ms_since(start);
            emit(part_out, out, [&](std::ostream& o) { write_master_template_set(o, mts, db); });
            out << (part_out.empty() ? "# " : "") << "entries=" << mts.size() << " epsilon=" << eps
                << " time_ms=" << ms << '\n';
            return kOk;
        }

        if (cover->parsed()) {
            const auto db = load_database(cover_db);
            const int eps = parse_epsilon(cover_eps, int(db.dim()));
            const auto sys = build_reduced_system(db.members(), eps);
            const auto search = cover_search.search();
            const auto result = search.solver == SolverKind::Exact ? solve_exact(sys, search.exact)
                                                                   : solve_sann(sys, search.sann);
            json j{{"status", to_string(result.status)},
                   {"solver", to_string(result.solver)},
                   {"epsilon", eps},
                   {"classes", sys.cols()},
                   {"iterations", result.iterations},
                   {"time_ms", std::chrono::duration<double, std::milli>(result.elapsed).count()}};
            j["center"] = result.center ? json(result.center->to_string()) : json(nullptr);
            if (cover_all) {
                json covers = json::array();
                for (const auto& t : enumerate_covers(sys)) covers.push_back(t.to_string());
                j["covers"] = std::move(covers);
            }
            out << j.dump(2) << '\n';
            return kOk;
        }

        if (bench->parsed()) {
            std::vector<PartitionBenchRow> rows;
            for (const auto& c : bench_flags.configs()) rows.push_back(bench_partition(c));
            emit(bench_flags.out, out, [&](std::ostream& o) { write_partition_csv(o, rows); });
            return kOk;
        }

        if (sann->parsed()) {
            std::vector<SannBenchRow> rows;
            for (const auto& c : sann_flags.configs()) rows.push_back(bench_sann(c));
            emit(sann_flags.out, out, [&](std::ostream& o) { write_sann_csv(o, rows); });
            return kOk;
        }

        if (cooling->parsed()) {
            std::vector<CoolingSchedule> schedules(std::begin(kAllSchedules), std::end(kAllSchedules));
            if (cooling->count("--schedule") > 0) schedules = {*parse_schedule(cooling_flags.search.schedule)};
            std::vector<SannBenchRow> rows;
            for (auto schedule : schedules) {
                for (auto c : cooling_flags.configs()) {
                    c.schedule = schedule;
                    rows.push_back(bench_sann(c));
                }
            }
            emit(cooling_flags.out, out, [&](std::ostream& o) { write_cooling_csv(o, rows); });
            return kOk;
        }

        if (bounds->parsed()) {
            const int eps = parse_epsilon(bounds_eps, bounds_n);
            const auto report =
                capacity_report(bounds_n, eps, bounds->count("--clients") ? std::optional(bounds_k) : std::nullopt);
            if (bounds_json) {
                json j{{"n", report.n},
                       {"epsilon", report.epsilon},
                       {"ball_volume", big_string(report.ball_volume)},
                       {"log2_ball_volume", log2_big(report.ball_volume)},
                       {"dirichlet_k", big_string(report.dirichlet_k)},
                       {"birthday_log2_k", report.birthday_log2_k},
                       {"first_cluster_log2_k", report.first_cluster_log2_k},
                       {"meets_recommendation", report.meets_recommendation}};
                if (report.k) j["clients"] = *report.k;
                if (report.expected_collisions) j["expected_near_collisions"] = *report.expected_collisions;
                if (report.k_within_capacity) j["clients_within_capacity"] = *report.k_within_capacity;
                out << j.dump(2) << '\n';
            } else {
                out << "n = " << report.n << ", epsilon = " << report.epsilon << '\n'
                    << "ball volume S = " << report.ball_volume << " (log2 " << log2_big(report.ball_volume) << ")\n"
                    << "dirichlet bound = " << report.dirichlet_k << '\n'
                    << "birthday bound log2 k = " << report.birthday_log2_k << '\n'
                    << "first-cluster bound log2 k = " << report.first_cluster_log2_k << '\n'
                    << "recommendation (n >= 512, epsilon <= 51): " << (report.meets_recommendation ? "safe" : "unsafe")
                    << '\n';
                if (report.k) {
                    out << "clients = " << *report.k;
                    if (report.expected_collisions) out << ", expected near-collisions = " << *report.expected_collisions;
                    out << ", within capacity: " << (*report.k_within_capacity ? "yes" : "no") << '\n';
                }
            }
            return kOk;
        }

        if (curves->parsed()) {
            const auto rows = emit_curves(curve_config);
            emit(curves_out, out, [&](std::ostream& o) { write_curves_csv(o, rows); });
            return kOk;
        }

        if (attack_cmd->parsed()) {
            std::ifstream in(attack_leak);
            if (!in) throw DataError("cannot open '" + attack_leak + "'");
            const auto leak = attack::parse_leak(in);
            attack::AttackOptions options;
            options.use_partition = !attack_no_partition;
            options.partition.search = attack_search.search();
            options.partition.seed = attack_search.seed;
            const auto kind = *attack::parse_kind(attack_kind);
            const auto result = kind == attack::AttackKind::MasterFeatureSet
                                    ? attack::master_feature_attack(leak, attack_tau, options)
                                    : attack::masterkey_attack(leak, attack_tau, options);
            json items = json::array();
            for (const auto& t : result.items) items.push_back(t.to_string());
            json j{{"kind", attack::to_string(result.kind)},
                   {"tau", attack_tau},
                   {"records", leak.size()},
                   {"partitioned", options.use_partition},
                   {"item_count", result.items.size()},
                   {"inversion_calls", result.inversion_calls},
                   {"coverage", result.coverage},
                   {"items", std::move(items)}};
            out << j.dump(2) << '\n';
            return kOk;
        }

        if (add->parsed()) {
            const auto db = load_database(add_db);
            const int eps = parse_epsilon(add_eps, int(db.dim()));
            std::ifstream in(add_mts);
            if (!in) throw DataError("cannot open '" + add_mts + "'");
            const auto mts = parse_master_template_set(in, db, eps);
            if (auto problem = check_master_template_set(mts, db); !problem.empty()) throw DataError("MTS: " + problem);
            const auto outcome = add_user(mts, db, add_id, Template::from_string(add_bits));
            if (!add_out_db.empty()) emit(add_out_db, out, [&](std::ostream& o) { write_database(o, outcome.db); });
            if (!add_out_mts.empty()) {
                emit(add_out_mts, out, [&](std::ostream& o) { write_master_template_set(o, outcome.mts, outcome.db); });
            }
            json j{{"id", add_id},
                   {"attached", outcome.attached},
                   {"entry", outcome.entry},
                   {"entries", outcome.mts.size()},
                   {"members", outcome.db.size()}};
            out << j.dump(2) << '\n';
            return kOk;
        }

        if (remove->parsed()) {
            const auto db = load_database(rm_db);
            const int eps = parse_epsilon(rm_eps, int(db.dim()));
            const auto report = remove_user(db, rm_id, eps, rm_prior);
            if (!rm_out_db.empty()) emit(rm_out_db, out, [&](std::ostream& o) { write_database(o, report.db); });
            json affected = json::array();
            for (const auto& a : report.affected) {
                affected.push_back({{"id", a.id}, {"distance", a.distance}, {"overlap", big_string(a.overlap)}});
            }
            json j{{"removed", report.removed_id},
                   {"epsilon", eps},
                   {"affected", std::move(affected)},
                   {"removed_count", report.removed_count},
                   {"removed_volume", big_string(report.removed_volume)},
                   {"capacity_log2", report.capacity_log2},
                   {"capacity_breach", report.capacity_breach},
                   {"members", report.db.size()}};
            out << j.dump(2) << '\n';
            return kOk;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    }
    return kUsage;
}

}  // namespace nearcol::cli
