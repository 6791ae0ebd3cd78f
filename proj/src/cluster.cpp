#include "litfacet/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "litfacet/error.hpp"

namespace litfacet {

using nlohmann::json;

// ---------------------------------------------------------------------------
// PCA

PcaResult pca(const Eigen::MatrixXd& data, int target_dim) {
    const auto n = data.rows();
    const auto d = data.cols();
    if (n < 2) {
        throw Error(ErrorCode::degenerate_input, "PCA needs at least 2 rows, got " + std::to_string(n));
    }
    if (target_dim < 1 || target_dim > d) {
        throw Error(ErrorCode::dim_error,
                    "target_dim " + std::to_string(target_dim) + " not in [1, " + std::to_string(d) + "]");
    }
    PcaResult result;
    result.mean = data.colwise().mean().transpose();
    Eigen::MatrixXd centered = data.rowwise() - result.mean.transpose();
    Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::degenerate_input, "covariance eigendecomposition failed");
    }
    // Eigen returns ascending eigenvalues.
    result.components.resize(d, target_dim);
    result.variances.resize(target_dim);
    for (int k = 0; k < target_dim; ++k) {
        auto src = d - 1 - k;
        Eigen::VectorXd v = solver.eigenvectors().col(src);
        Eigen::Index pivot = 0;
        for (Eigen::Index i = 1; i < d; ++i) {
            if (std::abs(v(i)) > std::abs(v(pivot))) {
                pivot = i;
            }
        }
        if (v(pivot) < 0) {
            v = -v;
        }
        result.components.col(k) = v;
        result.variances(k) = std::max(0.0, solver.eigenvalues()(src));
    }
    result.projected = centered * result.components;
    return result;
}

Eigen::MatrixXd pca_reduce(const Eigen::MatrixXd& data, const ReductionConfig& config) {
    return pca(data, config.target_dim).projected;
}

Eigen::MatrixXd pca_reconstruct(const PcaResult& r) {
    Eigen::MatrixXd out = r.projected * r.components.transpose();
    out.rowwise() += r.mean.transpose();
    return out;
}

// ---------------------------------------------------------------------------
// Core and mutual reachability distances

void HdbscanParams::validate(std::size_t n) const {
    if (min_cluster_size < 2) {
        throw Error(ErrorCode::invalid_config, "min_cluster_size must be >= 2");
    }
    if (min_samples && *min_samples < 1) {
        throw Error(ErrorCode::invalid_config, "min_samples must be >= 1");
    }
    auto k = static_cast<std::size_t>(effective_min_samples());
    if (n < 2 || k > n - 1) {
        throw Error(ErrorCode::k_too_large,
                    "min_samples " + std::to_string(k) + " needs more than " + std::to_string(n) + " points");
    }
}

namespace {

double euclidean(const Eigen::MatrixXd& points, std::size_t a, std::size_t b) {
    return (points.row(static_cast<Eigen::Index>(a)) - points.row(static_cast<Eigen::Index>(b))).norm();
}

} // namespace

std::vector<double> core_distances(const Eigen::MatrixXd& points, int k) {
    const auto n = static_cast<std::size_t>(points.rows());
    if (k < 1 || n < 2 || static_cast<std::size_t>(k) > n - 1) {
        throw Error(ErrorCode::k_too_large,
                    "k=" + std::to_string(k) + " requires 1 <= k <= n-1 with n=" + std::to_string(n));
    }
    std::vector<double> cores(n);
    std::vector<double> dist;
    dist.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        dist.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) {
                dist.push_back(euclidean(points, i, j));
            }
        }
        auto kth = dist.begin() + (k - 1);
        std::nth_element(dist.begin(), kth, dist.end());
        cores[i] = *kth;
    }
    return cores;
}

MutualReachability::MutualReachability(const Eigen::MatrixXd& points, std::vector<double> cores)
    : points_(points), cores_(std::move(cores)) {
    if (cores_.size() != static_cast<std::size_t>(points_.rows())) {
        throw Error(ErrorCode::dim_error, "one core distance per point required");
    }
}

double MutualReachability::operator()(std::size_t a, std::size_t b) const {
    if (a == b) {
        return 0.0;
    }
    return std::max({cores_[a], cores_[b], euclidean(points_, a, b)});
}

double total_weight(std::span<const MstEdge> edges) {
    double sum = 0.0;
    for (const auto& e : edges) {
        sum += e.weight;
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Condensed tree

namespace {

struct Dendrogram {
    // Node ids: [0, n) points, [n, 2n-1) merges.
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    std::vector<double> distance;
    std::vector<std::size_t> size;
};

Dendrogram single_linkage(std::span<const MstEdge> mst, std::size_t n) {
    std::vector<std::size_t> order(mst.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return mst[x].weight < mst[y].weight; });

    const std::size_t total = n + mst.size();
    Dendrogram tree;
    tree.left.assign(total, 0);
    tree.right.assign(total, 0);
    tree.distance.assign(total, 0.0);
    tree.size.assign(total, 1);

    // Union-find over points; each set remembers its current dendrogram node.
    std::vector<std::size_t> uf(n);
    std::iota(uf.begin(), uf.end(), 0);
    std::vector<std::size_t> node_of(n);
    std::iota(node_of.begin(), node_of.end(), 0);
    auto find = [&](std::size_t x) {
        while (uf[x] != x) {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        return x;
    };

    std::size_t next = n;
    for (auto idx : order) {
        const auto& e = mst[idx];
        auto ra = find(e.a);
        auto rb = find(e.b);
        if (ra == rb) {
            throw Error(ErrorCode::degenerate_input, "MST edges contain a cycle");
        }
        auto na = node_of[ra];
        auto nb = node_of[rb];
        tree.left[next] = std::min(na, nb);
        tree.right[next] = std::max(na, nb);
        tree.distance[next] = e.weight;
        tree.size[next] = tree.size[na] + tree.size[nb];
        uf[rb] = ra;
        node_of[ra] = next;
        ++next;
    }
    return tree;
}

void collect_leaves(const Dendrogram& tree, std::size_t node, std::size_t n, std::vector<std::size_t>& out) {
    std::vector<std::size_t> stack{node};
    while (!stack.empty()) {
        auto x = stack.back();
        stack.pop_back();
        if (x < n) {
            out.push_back(x);
        } else {
            stack.push_back(tree.right[x]);
            stack.push_back(tree.left[x]);
        }
    }
}

double to_lambda(double distance) { return 1.0 / std::max(distance, kMinLinkageDistance); }

} // namespace

CondensedTree condense(std::span<const MstEdge> mst, std::size_t n, int min_cluster_size) {
    if (min_cluster_size < 2) {
        throw Error(ErrorCode::invalid_config, "min_cluster_size must be >= 2");
    }
    if (n > 0 && mst.size() != n - 1) {
        throw Error(ErrorCode::degenerate_input, "expected " + std::to_string(n - 1) + " MST edges");
    }
    CondensedTree ct;
    ct.num_points = n;
    ct.point_cluster.assign(n, 0);
    ct.point_lambda.assign(n, 0.0);
    ct.clusters.push_back({-1, 0.0, n, {}, 0.0});
    if (n < 2) {
        return ct;
    }

    const auto tree = single_linkage(mst, n);
    const auto mcs = static_cast<std::size_t>(min_cluster_size);
    std::vector<std::size_t> leaves;

    auto fall_out = [&](std::size_t node, int cluster, double lambda) {
        leaves.clear();
        collect_leaves(tree, node, n, leaves);
        for (auto p : leaves) {
            ct.point_cluster[p] = cluster;
            ct.point_lambda[p] = lambda;
        }
        auto& c = ct.clusters[static_cast<std::size_t>(cluster)];
        c.stability += static_cast<double>(leaves.size()) * (lambda - c.lambda_birth);
    };

    struct Work {
        std::size_t node;
        int cluster;
    };
    std::vector<Work> stack{{2 * n - 2, 0}};
    while (!stack.empty()) {
        auto [node, cluster] = stack.back();
        stack.pop_back();
        const double lambda = to_lambda(tree.distance[node]);
        const auto l = tree.left[node];
        const auto r = tree.right[node];
        const bool big_l = tree.size[l] >= mcs;
        const bool big_r = tree.size[r] >= mcs;

        if (big_l && big_r) {
            for (auto child : {r, l}) {
                int id = static_cast<int>(ct.clusters.size());
                ct.clusters.push_back({cluster, lambda, tree.size[child], {}, 0.0});
                auto& parent = ct.clusters[static_cast<std::size_t>(cluster)];
                parent.children.push_back(id);
                parent.stability += static_cast<double>(tree.size[child]) * (lambda - parent.lambda_birth);
                stack.push_back({child, id});
            }
            // Keep children listed left first.
            auto& kids = ct.clusters[static_cast<std::size_t>(cluster)].children;
            std::reverse(kids.end() - 2, kids.end());
        } else if (big_l) {
            fall_out(r, cluster, lambda);
            stack.push_back({l, cluster});
        } else if (big_r) {
            fall_out(l, cluster, lambda);
            stack.push_back({r, cluster});
        } else {
            fall_out(l, cluster, lambda);
            fall_out(r, cluster, lambda);
        }
    }
    return ct;
}

FlatClustering extract_clusters(const CondensedTree& tree, bool allow_single_cluster) {
    const auto m = tree.clusters.size();
    std::vector<double> best(m, 0.0);
    std::vector<bool> selected(m, false);

    auto deselect_subtree = [&](int root) {
        std::vector<int> stack(tree.clusters[static_cast<std::size_t>(root)].children);
        while (!stack.empty()) {
            auto c = static_cast<std::size_t>(stack.back());
            stack.pop_back();
            selected[c] = false;
            for (int k : tree.clusters[c].children) {
                stack.push_back(k);
            }
        }
    };

    for (std::size_t i = m; i-- > 0;) {
        const auto& c = tree.clusters[i];
        if (i == 0 && !allow_single_cluster) {
            break;
        }
        if (c.children.empty()) {
            selected[i] = true;
            best[i] = c.stability;
            continue;
        }
        double below = 0.0;
        for (int k : c.children) {
            below += best[static_cast<std::size_t>(k)];
        }
        if (c.stability > below) {
            selected[i] = true;
            best[i] = c.stability;
            deselect_subtree(static_cast<int>(i));
        } else {
            best[i] = below;
        }
    }

    const auto n = tree.num_points;
    FlatClustering out;
    out.labels.assign(n, -1);
    out.probabilities.assign(n, 0.0);

    // Owning selected cluster for each point, found by walking up.
    std::vector<int> owner(n, -1);
    for (std::size_t p = 0; p < n; ++p) {
        for (int c = tree.point_cluster[p]; c >= 0; c = tree.clusters[static_cast<std::size_t>(c)].parent) {
            if (selected[static_cast<std::size_t>(c)]) {
                owner[p] = c;
                break;
            }
        }
    }
    std::map<int, std::size_t> first_member;
    std::map<int, double> lambda_max;
    for (std::size_t p = 0; p < n; ++p) {
        if (owner[p] < 0) {
            continue;
        }
        first_member.try_emplace(owner[p], p);
        auto& lm = lambda_max[owner[p]];
        lm = std::max(lm, tree.point_lambda[p]);
    }
    std::vector<std::pair<std::size_t, int>> order;
    for (const auto& [cluster, first] : first_member) {
        order.emplace_back(first, cluster);
    }
    std::sort(order.begin(), order.end());
    std::map<int, int> label_of;
    for (const auto& [first, cluster] : order) {
        label_of[cluster] = static_cast<int>(out.selected.size());
        out.selected.push_back(cluster);
    }
    for (std::size_t p = 0; p < n; ++p) {
        if (owner[p] < 0) {
            continue;
        }
        out.labels[p] = label_of[owner[p]];
        auto lm = lambda_max[owner[p]];
        out.probabilities[p] = lm > 0.0 ? std::min(1.0, tree.point_lambda[p] / lm) : 1.0;
    }
    return out;
}

FlatClustering hdbscan(const Eigen::MatrixXd& points, const HdbscanParams& params) {
    const auto n = static_cast<std::size_t>(points.rows());
    params.validate(n);
    MutualReachability mrd(points, core_distances(points, params.effective_min_samples()));
    auto mst = build_mst(mrd, n);
    auto tree = condense(mst, n, params.min_cluster_size);
    return extract_clusters(tree, params.allow_single_cluster);
}

// ---------------------------------------------------------------------------
// Challenge clusters

Eigen::MatrixXd embedding_matrix(const EmbeddingSet& embeddings) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(embeddings.size()), static_cast<Eigen::Index>(embeddings.dim));
    for (std::size_t i = 0; i < embeddings.size(); ++i) {
        const auto& v = embeddings.statements[i].vector;
        if (v.size() != embeddings.dim) {
            throw Error(ErrorCode::dim_mismatch, embeddings.statements[i].statement_id);
        }
        for (std::size_t j = 0; j < v.size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[j];
        }
    }
    return m;
}

ChallengeClusterSet cluster_problems(const EmbeddingSet& embeddings, const ReductionConfig& reduction,
                                     const HdbscanParams& params, const std::map<int, std::string>& label_map) {
    if (embeddings.size() == 0) {
        throw Error(ErrorCode::degenerate_input, "no embeddings to cluster");
    }
    params.validate(embeddings.size());
    auto reduced = pca_reduce(embedding_matrix(embeddings), reduction);
    auto flat = hdbscan(reduced, params);

    ChallengeClusterSet set;
    set.reduction = reduction;
    set.params = params;
    set.num_clusters = flat.num_clusters();
    for (std::size_t i = 0; i < embeddings.size(); ++i) {
        const auto& s = embeddings.statements[i];
        set.assignments.push_back({s.statement_id, s.paper_id, flat.labels[i], flat.probabilities[i]});
        if (flat.labels[i] < 0) {
            ++set.num_noise;
        } else {
            ++set.sizes[flat.labels[i]];
        }
    }
    for (int k = 0; k < set.num_clusters; ++k) {
        auto it = label_map.find(k);
        set.labels[k] = it != label_map.end() ? it->second : "cluster-" + std::to_string(k);

        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < set.assignments.size(); ++i) {
            if (set.assignments[i].label == k) {
                members.push_back(i);
            }
        }
        std::stable_sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
            return set.assignments[a].probability > set.assignments[b].probability;
        });
        auto& ex = set.exemplars[k];
        for (std::size_t j = 0; j < members.size() && j < kExemplarsPerCluster; ++j) {
            ex.push_back(set.assignments[members[j]].statement_id);
        }
    }
    for (const auto& [k, label] : label_map) {
        if (k < 0 || k >= set.num_clusters) {
            set.warnings.push_back("label for cluster " + std::to_string(k) + " ('" + label +
                                   "') ignored: no such cluster");
        }
    }
    return set;
}

json to_json(const ChallengeClusterSet& set) {
    json assignments = json::array();
    for (const auto& a : set.assignments) {
        assignments.push_back({{"statement_id", a.statement_id},
                               {"paper_id", a.paper_id},
                               {"label", a.label},
                               {"probability", a.probability}});
    }
    json labels = json::object();
    for (const auto& [k, v] : set.labels) {
        labels[std::to_string(k)] = v;
    }
    json exemplars = json::object();
    for (const auto& [k, v] : set.exemplars) {
        exemplars[std::to_string(k)] = v;
    }
    json sizes = json::object();
    for (const auto& [k, v] : set.sizes) {
        sizes[std::to_string(k)] = v;
    }
    json params = {{"min_cluster_size", set.params.min_cluster_size},
                   {"min_samples", set.params.effective_min_samples()},
                   {"allow_single_cluster", set.params.allow_single_cluster},
                   {"metric", "euclidean"},
                   {"reduction", "pca"},
                   {"target_dim", set.reduction.target_dim}};
    return {{"assignments", assignments}, {"labels", labels},       {"exemplars", exemplars},
            {"sizes", sizes},             {"params", params},       {"num_clusters", set.num_clusters},
            {"num_noise", set.num_noise}, {"warnings", set.warnings}};
}

namespace {

int cluster_key(const std::string& key) {
    try {
        std::size_t used = 0;
        int k = std::stoi(key, &used);
        if (used == key.size()) {
            return k;
        }
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::parse_error, "cluster key '" + key + "' is not an integer");
}

} // namespace

std::map<int, std::string> label_map_from_json(const json& j) {
    if (!j.is_object()) {
        throw Error(ErrorCode::parse_error, "label map must be an object of id -> label");
    }
    std::map<int, std::string> out;
    for (const auto& [key, value] : j.items()) {
        if (!value.is_string()) {
            throw Error(ErrorCode::parse_error, "label for cluster " + key + " must be a string");
        }
        out[cluster_key(key)] = value.get<std::string>();
    }
    return out;
}

ChallengeClusterSet challenge_set_from_json(const json& j) {
    try {
        ChallengeClusterSet set;
        for (const auto& a : j.at("assignments")) {
            set.assignments.push_back({a.at("statement_id").get<std::string>(), a.at("paper_id").get<std::string>(),
                                       a.at("label").get<int>(), a.at("probability").get<double>()});
        }
        set.labels = label_map_from_json(j.at("labels"));
        for (const auto& [key, value] : j.at("exemplars").items()) {
            set.exemplars[cluster_key(key)] = value.get<std::vector<std::string>>();
        }
        if (auto it = j.find("sizes"); it != j.end()) {
            for (const auto& [key, value] : it->items()) {
                set.sizes[cluster_key(key)] = value.get<std::size_t>();
            }
        }
        const auto& p = j.at("params");
        set.params.min_cluster_size = p.at("min_cluster_size").get<int>();
        set.params.min_samples = p.at("min_samples").get<int>();
        set.params.allow_single_cluster = p.value("allow_single_cluster", false);
        set.reduction.target_dim = p.at("target_dim").get<int>();
        set.num_clusters = j.at("num_clusters").get<int>();
        set.num_noise = j.at("num_noise").get<std::size_t>();
        if (auto it = j.find("warnings"); it != j.end()) {
            set.warnings = it->get<std::vector<std::string>>();
        }
        return set;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::parse_error, std::string("challenge report: ") + e.what());
    }
}

} // namespace litfacet
