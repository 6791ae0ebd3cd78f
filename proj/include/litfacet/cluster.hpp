#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "litfacet/ingest.hpp"

namespace litfacet {

// ---------------------------------------------------------------------------
// Dimensionality reduction

struct ReductionConfig {
    int target_dim = 5;
};

struct PcaResult {
    /// n x t scores of the centered data.
    Eigen::MatrixXd projected;
    /// d x t orthonormal principal directions, largest variance first. The
    /// largest-magnitude entry of each column is positive.
    Eigen::MatrixXd components;
    Eigen::VectorXd mean;
    /// Sample-covariance eigenvalues (1/(n-1) normalisation) of the kept directions.
    Eigen::VectorXd variances;
};

/// Throws degenerate_input (fewer than 2 rows) or dim_error (target_dim
/// outside [1, cols]).
PcaResult pca(const Eigen::MatrixXd& data, int target_dim);
Eigen::MatrixXd pca_reduce(const Eigen::MatrixXd& data, const ReductionConfig& config);
/// Maps projected scores back to the input space.
Eigen::MatrixXd pca_reconstruct(const PcaResult& result);

// ---------------------------------------------------------------------------
// Density clustering

struct HdbscanParams {
    int min_cluster_size = 5;
    /// Defaults to min_cluster_size.
    std::optional<int> min_samples;
    /// When false the root of the condensed tree is never selected.
    bool allow_single_cluster = false;

    int effective_min_samples() const { return min_samples.value_or(min_cluster_size); }
    /// Throws invalid_config or k_too_large for n points.
    void validate(std::size_t n) const;
};

/// Distance from each row to its k-th nearest other row. Throws k_too_large
/// unless 1 <= k <= n-1.
std::vector<double> core_distances(const Eigen::MatrixXd& points, int k);

/// max(core(a), core(b), |a-b|), zero on the diagonal.
class MutualReachability {
public:
    MutualReachability(const Eigen::MatrixXd& points, std::vector<double> cores);

    double operator()(std::size_t a, std::size_t b) const;
    std::size_t size() const noexcept { return cores_.size(); }
    const std::vector<double>& cores() const noexcept { return cores_; }

private:
    const Eigen::MatrixXd& points_;
    std::vector<double> cores_;
};

struct MstEdge {
    std::size_t a = 0;
    std::size_t b = 0;
    double weight = 0.0;
};

/// Prim's algorithm over the complete graph, O(n^2). Ties go to the lower
/// vertex index. Edges come out in the order vertices join the tree.
template <typename Distance>
std::vector<MstEdge> build_mst(const Distance& distance, std::size_t n) {
    std::vector<MstEdge> edges;
    if (n < 2) {
        return edges;
    }
    edges.reserve(n - 1);
    std::vector<bool> in_tree(n, false);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> parent(n, 0);
    std::size_t current = 0;
    in_tree[0] = true;
    for (std::size_t step = 1; step < n; ++step) {
        std::size_t next = n;
        for (std::size_t v = 0; v < n; ++v) {
            if (in_tree[v]) {
                continue;
            }
            double d = distance(current, v);
            if (d < best[v]) {
                best[v] = d;
                parent[v] = current;
            }
            if (next == n || best[v] < best[next]) {
                next = v;
            }
        }
        in_tree[next] = true;
        edges.push_back({parent[next], next, best[next]});
        current = next;
    }
    return edges;
}

double total_weight(std::span<const MstEdge> edges);

/// Single-linkage hierarchy condensed by a minimum cluster size.
struct CondensedTree {
    struct Cluster {
        int parent = -1;
        double lambda_birth = 0.0;
        std::size_t size = 0;
        std::vector<int> children;
        /// Sum over member points of (lambda leaving this cluster - lambda_birth).
        double stability = 0.0;
    };

    std::size_t num_points = 0;
    /// Index 0 is the root. Children always have larger ids than parents.
    std::vector<Cluster> clusters;
    /// Deepest cluster each point belonged to.
    std::vector<int> point_cluster;
    /// Lambda (1 / distance) at which the point left that cluster.
    std::vector<double> point_lambda;
};

/// Distances below this are treated as this value when converted to lambda.
inline constexpr double kMinLinkageDistance = 1e-12;

/// Builds the single-linkage dendrogram from MST edges (ascending weight,
/// stable) and condenses it: a split side smaller than min_cluster_size is
/// points falling out of the parent; two large sides become child clusters.
CondensedTree condense(std::span<const MstEdge> mst, std::size_t num_points, int min_cluster_size);

struct FlatClustering {
    /// -1 for noise, else 0..num_clusters-1 ordered by smallest member index.
    std::vector<int> labels;
    /// lambda_point / lambda_max of the assigned cluster; 0 for noise.
    std::vector<double> probabilities;
    /// Condensed-tree cluster id behind each label.
    std::vector<int> selected;

    int num_clusters() const { return static_cast<int>(selected.size()); }
};

/// Excess-of-mass selection: a cluster is kept iff its stability is
/// strictly greater than the best total of its descendants.
FlatClustering extract_clusters(const CondensedTree& tree, bool allow_single_cluster = false);

/// core distances -> mutual reachability -> MST -> condense -> extract.
FlatClustering hdbscan(const Eigen::MatrixXd& points, const HdbscanParams& params);

// ---------------------------------------------------------------------------
// Challenge clusters

struct ClusterAssignment {
    std::string statement_id;
    std::string paper_id;
    int label = -1;
    double probability = 0.0;

    bool operator==(const ClusterAssignment&) const = default;
};

struct ChallengeClusterSet {
    std::vector<ClusterAssignment> assignments;
    std::map<int, std::string> labels;
    /// Up to three statement ids per cluster, highest probability first.
    std::map<int, std::vector<std::string>> exemplars;
    std::map<int, std::size_t> sizes;
    ReductionConfig reduction;
    HdbscanParams params;
    int num_clusters = 0;
    std::size_t num_noise = 0;
    std::vector<std::string> warnings;
};

inline constexpr std::size_t kExemplarsPerCluster = 3;

Eigen::MatrixXd embedding_matrix(const EmbeddingSet& embeddings);

/// Runs the full pipeline. Labels from label_map are attached to produced
/// clusters; ids that were not produced are ignored with a warning, and
/// unlabeled clusters are named "cluster-<k>".
ChallengeClusterSet cluster_problems(const EmbeddingSet& embeddings, const ReductionConfig& reduction,
                                     const HdbscanParams& params,
                                     const std::map<int, std::string>& label_map = {});

nlohmann::json to_json(const ChallengeClusterSet& set);
ChallengeClusterSet challenge_set_from_json(const nlohmann::json& j);
/// {"0": "label", ...}
std::map<int, std::string> label_map_from_json(const nlohmann::json& j);

} // namespace litfacet
