#include "nearcol/clustering.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace nearcol {

namespace {

constexpr int kNone = std::numeric_limits<int>::max();

// Slot i always holds the cluster whose smallest member is i, so comparing
// slot pairs compares (min index, max index) of the clusters themselves.
struct Linkage {
    DissimilarityMatrix d;
    std::vector<char> active;
    std::vector<int> best_dist;           // min over active j > i of d(i, j)
    std::vector<Eigen::Index> best_with;  // argmin, smallest j on ties

    void refresh(Eigen::Index i) {
        best_dist[i] = kNone;
        best_with[i] = -1;
        for (Eigen::Index j = i + 1; j < d.rows(); ++j) {
            if (active[j] && d(i, j) < best_dist[i]) {
                best_dist[i] = d(i, j);
                best_with[i] = j;
            }
        }
    }
};

}  // namespace

Clustering cluster_complete_link(const DissimilarityMatrix& dist, int s) {
    if (s < 0) throw std::invalid_argument("diameter bound must be non-negative");
    const Eigen::Index k = dist.rows();
    if (dist.cols() != k) throw std::invalid_argument("dissimilarity matrix must be square");

    Linkage link{dist, std::vector<char>(k, 1), std::vector<int>(k, kNone), std::vector<Eigen::Index>(k, -1)};
    std::vector<std::vector<std::size_t>> members(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        members[i] = {static_cast<std::size_t>(i)};
        link.refresh(i);
    }

    for (;;) {
        Eigen::Index a = -1;
        for (Eigen::Index i = 0; i < k; ++i) {
            if (link.active[i] && link.best_with[i] >= 0 && (a < 0 || link.best_dist[i] < link.best_dist[a])) a = i;
        }
        if (a < 0 || link.best_dist[a] > s) break;
        const Eigen::Index b = link.best_with[a];

        // Lance-Williams update for complete linkage.
        for (Eigen::Index m = 0; m < k; ++m) {
            if (!link.active[m] || m == a || m == b) continue;
            const int merged = std::max(link.d(a, m), link.d(b, m));
            link.d(a, m) = link.d(m, a) = merged;
        }
        link.active[b] = 0;
        members[a].insert(members[a].end(), members[b].begin(), members[b].end());
        std::sort(members[a].begin(), members[a].end());
        members[b].clear();

        // Rows above a only grew at column a, so their cache is stale only
        // if it pointed at a or b. Rows between a and b may point at b.
        for (Eigen::Index r = 0; r < b; ++r) {
            if (link.active[r] && (r == a || link.best_with[r] == a || link.best_with[r] == b)) link.refresh(r);
        }
    }

    Clustering out;
    out.diameter_bound = s;
    for (Eigen::Index i = 0; i < k; ++i) {
        if (link.active[i]) out.clusters.push_back(std::move(members[i]));
    }
    return out;
}

int cluster_diameter(const DissimilarityMatrix& dist, const std::vector<std::size_t>& cluster) {
    int diameter = 0;
    for (std::size_t x = 0; x < cluster.size(); ++x) {
        for (std::size_t y = x + 1; y < cluster.size(); ++y) {
            diameter = std::max(diameter, dist(Eigen::Index(cluster[x]), Eigen::Index(cluster[y])));
        }
    }
    return diameter;
}

int complete_link_distance(const DissimilarityMatrix& dist, const std::vector<std::size_t>& a,
                           const std::vector<std::size_t>& b) {
    int worst = 0;
    for (auto i : a) {
        for (auto j : b) worst = std::max(worst, dist(Eigen::Index(i), Eigen::Index(j)));
    }
    return worst;
}

}  // namespace nearcol
