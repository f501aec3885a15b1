#include "nearcol/core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace nearcol {

namespace {

constexpr std::size_t words_for(std::size_t n) { return (n + 63) / 64; }

void require_same_dim(const Template& a, const Template& b) {
    if (a.size() != b.size()) {
        throw DimensionMismatch("template dimensions differ: " + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
    }
}

}  // namespace

Template::Template(std::size_t n) : n_(n), words_(words_for(n), 0) {}

Template Template::from_string(std::string_view bits) {
    Template t(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        const char c = bits[i];
        if (c == '1') {
            t.set(i, true);
        } else if (c != '0') {
            throw ParseError("invalid bit character '" + std::string(1, c) + "'");
        }
    }
    return t;
}

void Template::set(std::size_t i, bool value) noexcept {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (value) {
        words_[i >> 6] |= mask;
    } else {
        words_[i >> 6] &= ~mask;
    }
}

Template& Template::operator^=(const Template& other) {
    require_same_dim(*this, other);
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
    return *this;
}

Template Template::complement() const {
    Template t = *this;
    for (auto& w : t.words_) w = ~w;
    t.mask_tail();
    return t;
}

std::size_t Template::popcount() const noexcept {
    std::size_t total = 0;
    for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
    return total;
}

void Template::mask_tail() noexcept {
    if (const std::size_t rem = n_ & 63; rem != 0 && !words_.empty()) {
        words_.back() &= (std::uint64_t{1} << rem) - 1;
    }
}

std::string Template::to_string() const {
    std::string s(n_, '0');
    for (std::size_t i = 0; i < n_; ++i) {
        if (get(i)) s[i] = '1';
    }
    return s;
}

std::strong_ordering operator<=>(const Template& a, const Template& b) {
    if (auto c = a.n_ <=> b.n_; c != 0) return c;
    // Lexicographic on the bit string, position 0 first.
    for (std::size_t i = 0; i < a.n_; ++i) {
        if (a.get(i) != b.get(i)) return a.get(i) ? std::strong_ordering::greater : std::strong_ordering::less;
    }
    return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const Template& t) { return os << t.to_string(); }

std::size_t TemplateHash::operator()(const Template& t) const noexcept {
    std::uint64_t h = t.size();
    for (auto w : t.words()) h = mix_seed(h, w);
    return static_cast<std::size_t>(h);
}

std::size_t hamming(const Template& a, const Template& b) {
    require_same_dim(a, b);
    const auto wa = a.words();
    const auto wb = b.words();
    std::size_t d = 0;
    for (std::size_t w = 0; w < wa.size(); ++w) d += static_cast<std::size_t>(std::popcount(wa[w] ^ wb[w]));
    return d;
}

std::size_t hamming_on(const Template& a, const Template& b, std::span<const std::size_t> positions) {
    require_same_dim(a, b);
    std::size_t d = 0;
    for (auto p : positions) d += a.get(p) != b.get(p);
    return d;
}

// ---------------------------------------------------------------------------

TemplateDatabase::TemplateDatabase(std::vector<std::string> ids, std::vector<Template> members)
    : ids_(std::move(ids)), members_(std::move(members)) {
    if (members_.empty()) throw DataError("template database must not be empty");
    if (ids_.size() != members_.size()) throw DataError("ids and members differ in length");
    dim_ = members_.front().size();
    if (dim_ == 0) throw DataError("template dimension must be positive");
    if (dim_ <= 62 && members_.size() >= (std::uint64_t{1} << dim_)) {
        throw DataError("template database must be a proper subset of the template space");
    }
    std::unordered_set<std::string_view> seen_ids;
    std::unordered_set<Template, TemplateHash> seen;
    for (std::size_t i = 0; i < members_.size(); ++i) {
        if (members_[i].size() != dim_) {
            throw DimensionMismatch("member '" + ids_[i] + "' has dimension " + std::to_string(members_[i].size()) +
                                    ", expected " + std::to_string(dim_));
        }
        if (ids_[i].empty() || ids_[i].front() == '#' ||
            ids_[i].find_first_of(" \t\r\n") != std::string::npos) {
            throw DataError("invalid user id '" + ids_[i] + "'");
        }
        if (!seen_ids.insert(ids_[i]).second) throw DataError("duplicate id '" + ids_[i] + "'");
        if (!seen.insert(members_[i]).second) throw DataError("duplicate template for id '" + ids_[i] + "'");
    }
}

std::size_t TemplateDatabase::find_id(std::string_view id) const noexcept {
    auto it = std::find(ids_.begin(), ids_.end(), id);
    return static_cast<std::size_t>(it - ids_.begin());
}

std::size_t TemplateDatabase::find(const Template& t) const noexcept {
    auto it = std::find(members_.begin(), members_.end(), t);
    return static_cast<std::size_t>(it - members_.begin());
}

TemplateDatabase TemplateDatabase::with_member(std::string id, Template t) const {
    auto ids = ids_;
    auto members = members_;
    ids.push_back(std::move(id));
    members.push_back(std::move(t));
    return TemplateDatabase(std::move(ids), std::move(members));
}

TemplateDatabase TemplateDatabase::without_member(std::size_t index) const {
    if (index >= size()) throw std::out_of_range("member index out of range");
    // Removing cannot break distinctness, so the result is assembled directly;
    // this also admits the empty database left after removing the last user.
    TemplateDatabase out;
    out.dim_ = dim_;
    out.ids_ = ids_;
    out.members_ = members_;
    out.ids_.erase(out.ids_.begin() + static_cast<std::ptrdiff_t>(index));
    out.members_.erase(out.members_.begin() + static_cast<std::ptrdiff_t>(index));
    return out;
}

DissimilarityMatrix dissimilarity_matrix(std::span<const Template> members) {
    const auto k = static_cast<Eigen::Index>(members.size());
    DissimilarityMatrix m = DissimilarityMatrix::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = i + 1; j < k; ++j) {
            m(i, j) = m(j, i) = static_cast<int>(hamming(members[i], members[j]));
        }
    }
    return m;
}

// ---------------------------------------------------------------------------

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Template random_template(std::size_t n, Rng& rng) {
    Template t(n);
    for (auto& w : t.words()) w = rng();
    t.mask_tail();
    return t;
}

Template random_in_ball(const Template& center, std::size_t radius, Rng& rng) {
    const std::size_t n = center.size();
    radius = std::min(radius, n);
    // P(distance = r) is proportional to C(n, r); weights formed in log space
    // so that n in the thousands does not overflow.
    std::vector<double> log_w(radius + 1);
    for (std::size_t r = 0; r <= radius; ++r) {
        log_w[r] = std::lgamma(double(n) + 1) - std::lgamma(double(r) + 1) - std::lgamma(double(n - r) + 1);
    }
    const double top = *std::max_element(log_w.begin(), log_w.end());
    std::vector<double> w(radius + 1);
    std::transform(log_w.begin(), log_w.end(), w.begin(), [top](double lw) { return std::exp(lw - top); });
    std::discrete_distribution<std::size_t> pick_radius(w.begin(), w.end());
    const std::size_t r = pick_radius(rng);

    std::vector<std::size_t> pos(n);
    std::iota(pos.begin(), pos.end(), std::size_t{0});
    Template t = center;
    for (std::size_t i = 0; i < r; ++i) {
        std::uniform_int_distribution<std::size_t> u(i, n - 1);
        std::swap(pos[i], pos[u(rng)]);
        t.flip(pos[i]);
    }
    return t;
}

TemplateDatabase random_database(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("dimension must be positive");
    if (k == 0) throw std::invalid_argument("database size must be at least 1");
    if (n <= 62 && k >= (std::uint64_t{1} << n)) {
        throw std::invalid_argument("cannot draw " + std::to_string(k) + " distinct templates as a proper subset of a space of size 2^" +
                                    std::to_string(n));
    }
    Rng rng(seed);
    std::unordered_set<Template, TemplateHash> seen;
    std::vector<Template> members;
    std::vector<std::string> ids;
    members.reserve(k);
    ids.reserve(k);
    while (members.size() < k) {
        Template t = random_template(n, rng);
        if (seen.insert(t).second) {
            members.push_back(std::move(t));
            ids.push_back("u" + std::to_string(members.size()));
        }
    }
    return TemplateDatabase(std::move(ids), std::move(members));
}

TemplateDatabase parse_database(std::istream& in) {
    std::vector<std::string> ids;
    std::vector<Template> members;
    std::string line;
    std::size_t line_no = 0;
    std::size_t dim = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto space = line.find(' ');
        if (space == std::string::npos || space == 0 || line.find(' ', space + 1) != std::string::npos) {
            throw ParseError("line " + std::to_string(line_no) + ": expected '<id> <bits>'");
        }
        Template t;
        try {
            t = Template::from_string(std::string_view(line).substr(space + 1));
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (t.size() == 0) throw ParseError("line " + std::to_string(line_no) + ": empty bit string");
        if (dim == 0) dim = t.size();
        if (t.size() != dim) {
            throw ParseError("line " + std::to_string(line_no) + ": width " + std::to_string(t.size()) +
                             " differs from " + std::to_string(dim));
        }
        ids.push_back(line.substr(0, space));
        members.push_back(std::move(t));
    }
    if (members.empty()) throw ParseError("no template records found");
    return TemplateDatabase(std::move(ids), std::move(members));
}

TemplateDatabase parse_database(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_database(in);
}

void write_database(std::ostream& out, const TemplateDatabase& db) {
    for (std::size_t i = 0; i < db.size(); ++i) out << db.id(i) << ' ' << db[i] << '\n';
}

std::string write_database(const TemplateDatabase& db) {
    std::ostringstream out;
    write_database(out, db);
    return out.str();
}

}  // namespace nearcol
