#pragma once

#include "nearcol/core.hpp"

#include <cstddef>
#include <vector>

namespace nearcol {

/// Disjoint clusters of member indices whose pairwise distances are all
/// at most diameter_bound. Clusters are ordered by their smallest member
/// index; indices inside a cluster are ascending.
struct Clustering {
    std::vector<std::vector<std::size_t>> clusters;
    int diameter_bound = 0;
};

/// Complete-link agglomerative clustering that stops as soon as the closest
/// pair of clusters is further apart than `s`. Ties on linkage distance go
/// to the lexicographically smallest (min index, max index) pair.
Clustering cluster_complete_link(const DissimilarityMatrix& dist, int s);

inline Clustering cluster_complete_link(const TemplateDatabase& db, int s) {
    return cluster_complete_link(dissimilarity_matrix(db), s);
}

/// Largest pairwise distance inside `cluster`.
int cluster_diameter(const DissimilarityMatrix& dist, const std::vector<std::size_t>& cluster);

/// Complete-link distance between two clusters (max cross-pair distance).
int complete_link_distance(const DissimilarityMatrix& dist, const std::vector<std::size_t>& a,
                           const std::vector<std::size_t>& b);

}  // namespace nearcol
