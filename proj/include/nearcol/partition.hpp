#pragma once

#include "nearcol/bounds.hpp"
#include "nearcol/core.hpp"
#include "nearcol/cover.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace nearcol {

struct MasterEntry {
    Template center;
    std::vector<std::size_t> covered;  // member indices into the source database, ascending
};

/// An epsilon-master-template-set together with the assignment of every
/// database member to exactly one center within epsilon of it.
struct MasterTemplateSet {
    std::vector<MasterEntry> entries;
    int epsilon = 0;

    std::size_t size() const noexcept { return entries.size(); }
};

/// Empty string when `mts` is a valid epsilon-MTS partition of `db`,
/// otherwise a description of the first violation.
std::string check_master_template_set(const MasterTemplateSet& mts, const TemplateDatabase& db);

struct PartitionOptions {
    CoverSearch search{};
    /// Seeds the per-cluster annealing runs.
    std::uint64_t seed = 0;
};

/// Cluster with diameter bound s = 2*epsilon, look for a cover template of
/// every cluster, retire the covered clusters, lower s by one per pass and
/// repeat until every member is covered.
MasterTemplateSet partition_database(const TemplateDatabase& db, int epsilon, const PartitionOptions& options = {});

/// Baseline: repeatedly pick a remaining member uniformly at random and
/// retire it with every remaining member within epsilon.
MasterTemplateSet partition_greedy(const TemplateDatabase& db, int epsilon, std::uint64_t seed);

struct AddOutcome {
    MasterTemplateSet mts;
    TemplateDatabase db;
    bool attached = false;    // joined an existing entry
    std::size_t entry = 0;    // entry holding the new member
};

/// Enrolls (id, t): attaches it to the nearest center within epsilon
/// (lowest entry index on ties) or opens a singleton entry.
AddOutcome add_user(const MasterTemplateSet& mts, const TemplateDatabase& db, std::string id, Template t);

/// |B(a, eps) ∩ B(b, eps)| for d_H(a, b) = d in F_2^n.
BigInt ball_intersection(int d, int n, int epsilon);

struct AffectedUser {
    std::string id;
    int distance = 0;
    BigInt overlap;  // size of the shared acceptance region
};

struct RemovalReport {
    TemplateDatabase db;
    std::string removed_id;
    std::vector<AffectedUser> affected;
    std::uint64_t removed_count = 0;  // including this removal
    BigInt removed_volume;            // removed_count * S_eps(n)
    double capacity_log2 = 0.0;       // log2 of 2^{n/2} S_eps(n)^{-1/2}
    bool capacity_breach = false;     // enrolled + removed >= capacity
};

/// Removes the user with this id and reports users whose acceptance balls
/// overlap the revoked one. `previously_removed` carries the count of
/// earlier removals from the same system.
RemovalReport remove_user(const TemplateDatabase& db, const std::string& id, int epsilon,
                          std::uint64_t previously_removed = 0);

/// `<center bits> <id,id,...>` per entry.
void write_master_template_set(std::ostream& out, const MasterTemplateSet& mts, const TemplateDatabase& db);
std::string write_master_template_set(const MasterTemplateSet& mts, const TemplateDatabase& db);
MasterTemplateSet parse_master_template_set(std::istream& in, const TemplateDatabase& db, int epsilon);

}  // namespace nearcol
