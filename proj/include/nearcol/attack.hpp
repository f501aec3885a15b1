#pragma once

#include "nearcol/core.hpp"
#include "nearcol/partition.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Masterkey-set and master-feature-set attacks against a salting transform
// whose inversions are cheap. The transform here is the toy XOR salting
// T(F, P) = F ^ P over n-bit features F and n-bit tokens P.
namespace nearcol::attack {

inline Template transform(const Template& feature, const Template& token) { return feature ^ token; }

/// Token P with transform(feature, P) == templ.
inline Template invert_token(const Template& feature, const Template& templ) { return templ ^ feature; }

/// Feature F with transform(F, token) == templ.
inline Template invert_feature(const Template& token, const Template& templ) { return templ ^ token; }

enum class AttackKind { MasterKeySet, MasterFeatureSet };

std::string_view to_string(AttackKind kind) noexcept;
std::optional<AttackKind> parse_kind(std::string_view name) noexcept;

/// One leaked enrollment: the side value the attacker holds (the token for a
/// master-feature attack, the feature for a masterkey attack) and the
/// protected template.
struct LeakRecord {
    std::string id;
    Template known;
    Template templ;
};

/// Enrollment as simulated by the test oracle; the attacker never sees it whole.
struct EnrolledRecord {
    std::string id;
    Template feature;
    Template token;
    Template templ;
};

std::vector<EnrolledRecord> enroll(const TemplateDatabase& features, const TemplateDatabase& tokens);

/// The leak visible to an attacker of the given kind.
std::vector<LeakRecord> leak_of(std::span<const EnrolledRecord> records, AttackKind kind);

struct AttackResult {
    AttackKind kind = AttackKind::MasterFeatureSet;
    std::vector<Template> items;
    std::vector<std::size_t> assignment;  // item index per leak record
    std::uint64_t inversion_calls = 0;
    double coverage = 0.0;
};

/// Fraction of records matched within tau by their assigned item, checking
/// d(T(m, P_i), t_i) <= tau for master-features and d(T(x_i, m), t_i) <= tau
/// for masterkeys.
double verify_coverage(AttackKind kind, std::span<const LeakRecord> leak, std::span<const Template> items,
                       std::span<const std::size_t> assignment, int tau);

/// Same check with every record free to use any item.
double verify_coverage_any(AttackKind kind, std::span<const LeakRecord> leak, std::span<const Template> items, int tau);

struct AttackOptions {
    bool use_partition = true;
    PartitionOptions partition{};
};

/// Recovers each record's hidden value by inversion and, when partitioning,
/// replaces them with the centers of an epsilon = tau master-template-set.
AttackResult master_feature_attack(std::span<const LeakRecord> leak, int tau, const AttackOptions& options = {});
AttackResult masterkey_attack(std::span<const LeakRecord> leak, int tau, const AttackOptions& options = {});

/// Lines `<id> <known bits> <template bits>`.
std::vector<LeakRecord> parse_leak(std::istream& in);
void write_leak(std::ostream& out, std::span<const LeakRecord> leak);

}  // namespace nearcol::attack
