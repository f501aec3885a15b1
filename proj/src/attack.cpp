#include "nearcol/attack.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace nearcol::attack {

std::string_view to_string(AttackKind kind) noexcept {
    return kind == AttackKind::MasterKeySet ? "masterkey-set" : "master-feature-set";
}

std::optional<AttackKind> parse_kind(std::string_view name) noexcept {
    if (name == "masterkey-set" || name == "key") return AttackKind::MasterKeySet;
    if (name == "master-feature-set" || name == "feature") return AttackKind::MasterFeatureSet;
    return std::nullopt;
}

std::vector<EnrolledRecord> enroll(const TemplateDatabase& features, const TemplateDatabase& tokens) {
    if (features.size() != tokens.size()) throw std::invalid_argument("need one token per feature");
    std::vector<EnrolledRecord> out;
    out.reserve(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        out.push_back({features.id(i), features[i], tokens[i], transform(features[i], tokens[i])});
    }
    return out;
}

std::vector<LeakRecord> leak_of(std::span<const EnrolledRecord> records, AttackKind kind) {
    std::vector<LeakRecord> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        out.push_back({r.id, kind == AttackKind::MasterFeatureSet ? r.token : r.feature, r.templ});
    }
    return out;
}

namespace {

bool matches(AttackKind kind, const LeakRecord& record, const Template& item, int tau) {
    const Template candidate =
        kind == AttackKind::MasterFeatureSet ? transform(item, record.known) : transform(record.known, item);
    return hamming(candidate, record.templ) <= static_cast<std::size_t>(tau);
}

AttackResult run_attack(AttackKind kind, std::span<const LeakRecord> leak, int tau, const AttackOptions& options) {
    if (leak.empty()) throw std::invalid_argument("empty leak");
    if (tau < 0) throw std::invalid_argument("tau must be non-negative");

    AttackResult result;
    result.kind = kind;

    // Recover every hidden value; repeated values collapse to one member.
    std::vector<std::string> ids;
    std::vector<Template> hidden;
    std::unordered_map<Template, std::size_t, TemplateHash> slot;
    std::vector<std::size_t> record_slot(leak.size());
    for (std::size_t i = 0; i < leak.size(); ++i) {
        if (leak[i].known.size() != leak[i].templ.size()) throw DimensionMismatch("leak record '" + leak[i].id + "'");
        Template value = kind == AttackKind::MasterFeatureSet ? invert_feature(leak[i].known, leak[i].templ)
                                                              : invert_token(leak[i].known, leak[i].templ);
        ++result.inversion_calls;
        auto [it, inserted] = slot.try_emplace(value, hidden.size());
        if (inserted) {
            ids.push_back(leak[i].id);
            hidden.push_back(std::move(value));
        }
        record_slot[i] = it->second;
    }

    std::vector<std::size_t> slot_item(hidden.size());
    if (options.use_partition) {
        const TemplateDatabase db(std::move(ids), hidden);
        const auto mts = partition_database(db, tau, options.partition);
        for (std::size_t e = 0; e < mts.entries.size(); ++e) {
            result.items.push_back(mts.entries[e].center);
            for (auto m : mts.entries[e].covered) slot_item[m] = e;
        }
    } else {
        result.items = hidden;
        for (std::size_t s = 0; s < hidden.size(); ++s) slot_item[s] = s;
    }

    result.assignment.resize(leak.size());
    for (std::size_t i = 0; i < leak.size(); ++i) result.assignment[i] = slot_item[record_slot[i]];
    result.coverage = verify_coverage(kind, leak, result.items, result.assignment, tau);
    return result;
}

}  // namespace

double verify_coverage(AttackKind kind, std::span<const LeakRecord> leak, std::span<const Template> items,
                       std::span<const std::size_t> assignment, int tau) {
    if (leak.empty()) return 0.0;
    if (assignment.size() != leak.size()) throw std::invalid_argument("one assignment per record required");
    std::size_t hit = 0;
    for (std::size_t i = 0; i < leak.size(); ++i) {
        if (assignment[i] < items.size() && matches(kind, leak[i], items[assignment[i]], tau)) ++hit;
    }
    return static_cast<double>(hit) / static_cast<double>(leak.size());
}

double verify_coverage_any(AttackKind kind, std::span<const LeakRecord> leak, std::span<const Template> items, int tau) {
    if (leak.empty()) return 0.0;
    std::size_t hit = 0;
    for (const auto& record : leak) {
        for (const auto& item : items) {
            if (matches(kind, record, item, tau)) {
                ++hit;
                break;
            }
        }
    }
    return static_cast<double>(hit) / static_cast<double>(leak.size());
}

AttackResult master_feature_attack(std::span<const LeakRecord> leak, int tau, const AttackOptions& options) {
    return run_attack(AttackKind::MasterFeatureSet, leak, tau, options);
}

AttackResult masterkey_attack(std::span<const LeakRecord> leak, int tau, const AttackOptions& options) {
    return run_attack(AttackKind::MasterKeySet, leak, tau, options);
}

std::vector<LeakRecord> parse_leak(std::istream& in) {
    std::vector<LeakRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::istringstream fields(line);
        std::string id, known, templ, extra;
        if (!(fields >> id >> known >> templ) || (fields >> extra)) {
            throw ParseError("line " + std::to_string(line_no) + ": expected '<id> <bits> <bits>'");
        }
        LeakRecord record{id, Template::from_string(known), Template::from_string(templ)};
        if (record.known.size() != record.templ.size() || (!out.empty() && record.templ.size() != out.front().templ.size())) {
            throw ParseError("line " + std::to_string(line_no) + ": inconsistent widths");
        }
        out.push_back(std::move(record));
    }
    if (out.empty()) throw ParseError("no leak records found");
    return out;
}

void write_leak(std::ostream& out, std::span<const LeakRecord> leak) {
    for (const auto& r : leak) out << r.id << ' ' << r.known << ' ' << r.templ << '\n';
}

}  // namespace nearcol::attack
