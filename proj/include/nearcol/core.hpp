#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nearcol {

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input text (template files, leak files, MTS files).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Data that is well-formed but violates a domain invariant
/// (duplicate ids, duplicate templates, unknown users, ...).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A point of F_2^n, bit-packed into 64-bit words. Bit i lives in
/// word i / 64 at position i % 64; padding bits of the last word are zero.
class Template {
public:
    Template() = default;
    explicit Template(std::size_t n);

    /// Parses a string of '0'/'1' characters, most significant position first
    /// (character i is bit i).
    static Template from_string(std::string_view bits);

    std::size_t size() const noexcept { return n_; }
    bool get(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i, bool value) noexcept;
    void flip(std::size_t i) noexcept { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

    std::span<const std::uint64_t> words() const noexcept { return words_; }
    std::span<std::uint64_t> words() noexcept { return words_; }

    Template& operator^=(const Template& other);
    friend Template operator^(Template a, const Template& b) { return a ^= b; }
    Template complement() const;
    std::size_t popcount() const noexcept;

    std::string to_string() const;

    friend bool operator==(const Template&, const Template&) = default;
    friend std::strong_ordering operator<=>(const Template& a, const Template& b);

    /// Clears the padding bits of the last word after raw word writes.
    void mask_tail() noexcept;

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> words_;
};

std::ostream& operator<<(std::ostream& os, const Template& t);

struct TemplateHash {
    std::size_t operator()(const Template& t) const noexcept;
};

/// Number of differing positions. Throws DimensionMismatch on unequal sizes.
std::size_t hamming(const Template& a, const Template& b);

/// Hamming distance restricted to the given positions.
std::size_t hamming_on(const Template& a, const Template& b, std::span<const std::size_t> positions);

/// Ordered collection of distinct templates of a common dimension, each with
/// a unique opaque user id.
class TemplateDatabase {
public:
    TemplateDatabase() = default;
    TemplateDatabase(std::vector<std::string> ids, std::vector<Template> members);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return members_.size(); }
    bool empty() const noexcept { return members_.empty(); }

    const Template& operator[](std::size_t i) const { return members_[i]; }
    const std::string& id(std::size_t i) const { return ids_[i]; }
    std::span<const Template> members() const noexcept { return members_; }
    std::span<const std::string> ids() const noexcept { return ids_; }

    /// Index of the member with this id, or size() if absent.
    std::size_t find_id(std::string_view id) const noexcept;
    /// Index of the member equal to t, or size() if absent.
    std::size_t find(const Template& t) const noexcept;

    TemplateDatabase with_member(std::string id, Template t) const;
    TemplateDatabase without_member(std::size_t index) const;

    friend bool operator==(const TemplateDatabase&, const TemplateDatabase&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<std::string> ids_;
    std::vector<Template> members_;
};

using DissimilarityMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

DissimilarityMatrix dissimilarity_matrix(std::span<const Template> members);
inline DissimilarityMatrix dissimilarity_matrix(const TemplateDatabase& db) {
    return dissimilarity_matrix(db.members());
}

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; derives independent child seeds from (seed, stream).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

Template random_template(std::size_t n, Rng& rng);

/// Uniform draw from the Hamming ball B(center, radius).
Template random_in_ball(const Template& center, std::size_t radius, Rng& rng);

/// k distinct uniform templates of dimension n, ids "u1".."uk".
/// Throws std::invalid_argument when k exceeds 2^n.
TemplateDatabase random_database(std::size_t n, std::size_t k, std::uint64_t seed);

/// Text format: one `<id> <bits>` record per line, `#` comments, blank lines skipped.
TemplateDatabase parse_database(std::istream& in);
TemplateDatabase parse_database(std::string_view text);
void write_database(std::ostream& out, const TemplateDatabase& db);
std::string write_database(const TemplateDatabase& db);

}  // namespace nearcol
