#include "nearcol/partition.hpp"

#include "nearcol/clustering.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace nearcol {

std::string check_master_template_set(const MasterTemplateSet& mts, const TemplateDatabase& db) {
    std::vector<int> owner(db.size(), -1);
    for (std::size_t e = 0; e < mts.entries.size(); ++e) {
        const auto& entry = mts.entries[e];
        if (entry.center.size() != db.dim()) return "entry " + std::to_string(e) + ": center has wrong dimension";
        if (entry.covered.empty()) return "entry " + std::to_string(e) + ": covers nothing";
        for (auto m : entry.covered) {
            if (m >= db.size()) return "entry " + std::to_string(e) + ": member index out of range";
            if (owner[m] >= 0) return "member " + db.id(m) + " assigned twice";
            owner[m] = static_cast<int>(e);
            if (hamming(entry.center, db[m]) > static_cast<std::size_t>(mts.epsilon)) {
                return "member " + db.id(m) + " is further than epsilon from its center";
            }
        }
    }
    for (std::size_t m = 0; m < db.size(); ++m) {
        if (owner[m] < 0) return "member " + db.id(m) + " is not covered";
    }
    return {};
}

MasterTemplateSet partition_database(const TemplateDatabase& db, int epsilon, const PartitionOptions& options) {
    if (epsilon < 0) throw std::invalid_argument("epsilon must be non-negative");
    MasterTemplateSet mts;
    mts.epsilon = epsilon;

    const DissimilarityMatrix full = dissimilarity_matrix(db);
    std::vector<Eigen::Index> remaining(db.size());
    std::iota(remaining.begin(), remaining.end(), Eigen::Index{0});

    int s = 2 * epsilon;
    for (std::uint64_t pass = 0; !remaining.empty(); ++pass) {
        const DissimilarityMatrix sub = full(remaining, remaining);
        const Clustering clustering = cluster_complete_link(sub, s);

        std::vector<char> retired(remaining.size(), 0);
        for (std::size_t c = 0; c < clustering.clusters.size(); ++c) {
            const auto& cluster = clustering.clusters[c];
            std::vector<Template> group;
            group.reserve(cluster.size());
            for (auto local : cluster) group.push_back(db[static_cast<std::size_t>(remaining[local])]);

            CoverSearch search = options.search;
            search.sann.seed = mix_seed(options.seed, (pass << 32) | c);
            const CoverResult found = find_cover(group, epsilon, search);
            // An annealing miss is inconclusive; the cluster waits for a tighter pass.
            if (!found.found()) continue;

            MasterEntry entry{*found.center, {}};
            for (auto local : cluster) {
                entry.covered.push_back(static_cast<std::size_t>(remaining[local]));
                retired[local] = 1;
            }
            std::sort(entry.covered.begin(), entry.covered.end());
            mts.entries.push_back(std::move(entry));
        }

        std::vector<Eigen::Index> next;
        for (std::size_t r = 0; r < remaining.size(); ++r) {
            if (!retired[r]) next.push_back(remaining[r]);
        }
        remaining = std::move(next);
        s = std::max(s - 1, 0);
    }
    return mts;
}

MasterTemplateSet partition_greedy(const TemplateDatabase& db, int epsilon, std::uint64_t seed) {
    if (epsilon < 0) throw std::invalid_argument("epsilon must be non-negative");
    MasterTemplateSet mts;
    mts.epsilon = epsilon;
    Rng rng(seed);
    std::vector<std::size_t> remaining(db.size());
    std::iota(remaining.begin(), remaining.end(), std::size_t{0});
    while (!remaining.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, remaining.size() - 1);
        const Template& center = db[remaining[pick(rng)]];
        MasterEntry entry{center, {}};
        std::vector<std::size_t> keep;
        for (auto m : remaining) {
            if (hamming(center, db[m]) <= static_cast<std::size_t>(epsilon)) {
                entry.covered.push_back(m);
            } else {
                keep.push_back(m);
            }
        }
        mts.entries.push_back(std::move(entry));
        remaining = std::move(keep);
    }
    return mts;
}

AddOutcome add_user(const MasterTemplateSet& mts, const TemplateDatabase& db, std::string id, Template t) {
    if (t.size() != db.dim()) throw DimensionMismatch("new template has the wrong dimension");
    if (db.find_id(id) != db.size()) throw DataError("user '" + id + "' is already enrolled");
    if (db.find(t) != db.size()) throw DataError("template is already enrolled");

    AddOutcome out{mts, db.with_member(std::move(id), t), false, 0};
    const std::size_t index = db.size();
    std::size_t best = mts.entries.size();
    std::size_t best_dist = std::numeric_limits<std::size_t>::max();
    for (std::size_t e = 0; e < mts.entries.size(); ++e) {
        const auto d = hamming(mts.entries[e].center, t);
        if (d <= static_cast<std::size_t>(mts.epsilon) && d < best_dist) {
            best = e;
            best_dist = d;
        }
    }
    if (best < mts.entries.size()) {
        out.mts.entries[best].covered.push_back(index);
        out.attached = true;
        out.entry = best;
    } else {
        out.mts.entries.push_back({std::move(t), {index}});
        out.entry = out.mts.entries.size() - 1;
    }
    return out;
}

BigInt ball_intersection(int d, int n, int epsilon) {
    if (n < 1 || d < 0 || d > n) throw std::invalid_argument("distance must lie in [0, n]");
    if (epsilon < 0) throw std::invalid_argument("epsilon must be non-negative");
    // Points at distance i from a inside the d differing positions and j
    // outside them sit at distance i + j from a and (d - i) + j from b.
    BigInt total = 0;
    for (int i = 0; i <= d; ++i) {
        for (int j = 0; j <= n - d; ++j) {
            if (i + j <= epsilon && (d - i) + j <= epsilon) total += binomial(d, i) * binomial(n - d, j);
        }
    }
    return total;
}

RemovalReport remove_user(const TemplateDatabase& db, const std::string& id, int epsilon,
                          std::uint64_t previously_removed) {
    if (epsilon < 0) throw std::invalid_argument("epsilon must be non-negative");
    const std::size_t index = db.find_id(id);
    if (index == db.size()) throw DataError("user '" + id + "' is not enrolled");

    const int n = static_cast<int>(db.dim());
    const int radius = std::min(epsilon, n);
    const Template& revoked = db[index];

    RemovalReport report;
    report.db = db.without_member(index);
    report.removed_id = id;
    for (std::size_t m = 0; m < db.size(); ++m) {
        if (m == index) continue;
        const auto d = static_cast<int>(hamming(db[m], revoked));
        if (d <= 2 * epsilon) report.affected.push_back({db.id(m), d, ball_intersection(d, n, radius)});
    }
    report.removed_count = previously_removed + 1;
    report.removed_volume = BigInt(report.removed_count) * ball_volume(n, radius);
    report.capacity_log2 = birthday_bound_log2(n, radius);
    const double occupied = static_cast<double>(report.db.size() + report.removed_count);
    report.capacity_breach = std::log2(occupied) >= report.capacity_log2;
    return report;
}

void write_master_template_set(std::ostream& out, const MasterTemplateSet& mts, const TemplateDatabase& db) {
    for (const auto& entry : mts.entries) {
        out << entry.center << ' ';
        for (std::size_t q = 0; q < entry.covered.size(); ++q) {
            if (q) out << ',';
            out << db.id(entry.covered[q]);
        }
        out << '\n';
    }
}

std::string write_master_template_set(const MasterTemplateSet& mts, const TemplateDatabase& db) {
    std::ostringstream out;
    write_master_template_set(out, mts, db);
    return out.str();
}

MasterTemplateSet parse_master_template_set(std::istream& in, const TemplateDatabase& db, int epsilon) {
    MasterTemplateSet mts;
    mts.epsilon = epsilon;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto space = line.find(' ');
        if (space == std::string::npos) throw ParseError("line " + std::to_string(line_no) + ": expected '<bits> <ids>'");
        MasterEntry entry{Template::from_string(std::string_view(line).substr(0, space)), {}};
        if (entry.center.size() != db.dim()) throw ParseError("line " + std::to_string(line_no) + ": wrong center width");
        std::istringstream ids(line.substr(space + 1));
        std::string id;
        while (std::getline(ids, id, ',')) {
            const auto m = db.find_id(id);
            if (m == db.size()) throw ParseError("line " + std::to_string(line_no) + ": unknown id '" + id + "'");
            entry.covered.push_back(m);
        }
        std::sort(entry.covered.begin(), entry.covered.end());
        mts.entries.push_back(std::move(entry));
    }
    return mts;
}

}  // namespace nearcol
