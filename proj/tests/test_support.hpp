// Helpers shared by the unit tests and the acceptance runner: fixture paths,
// seeded random corpora, and slow reference implementations used as oracles.
#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "litfacet/cluster.hpp"
#include "litfacet/corpus_model.hpp"
#include "litfacet/ingest.hpp"
#include "litfacet/search.hpp"

namespace testsupport {

inline std::filesystem::path data_dir() { return LITFACET_DATA_DIR; }
inline std::filesystem::path sample(const std::string& name) { return data_dir() / "sample" / name; }
inline std::filesystem::path fixture(const std::string& name) { return data_dir() / "fixtures" / name; }

inline std::string ascii_lower(std::string s) {
    for (auto& c : s) {
        if (c >= 'A' && c <= 'Z') {
            c = static_cast<char>(c - 'A' + 'a');
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Random corpora

struct CorpusGen {
    std::mt19937_64 rng;
    explicit CorpusGen(std::uint64_t seed) : rng(seed) {}

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

    template <typename C>
    std::set<std::string> subset(const C& pool, int lo, int hi) {
        std::vector<std::string> v(pool.begin(), pool.end());
        std::shuffle(v.begin(), v.end(), rng);
        int k = std::min<int>(uniform(lo, hi), static_cast<int>(v.size()));
        return {v.begin(), v.begin() + k};
    }

    // Random casing so case-folded matching gets exercised.
    std::string jitter_case(std::string s) {
        if (coin(0.2)) {
            for (auto& c : s) {
                if (c >= 'a' && c <= 'z' && coin()) {
                    c = static_cast<char>(c - 'a' + 'A');
                }
            }
        }
        return s;
    }

    static const std::vector<std::string>& domains() {
        static const std::vector<std::string> v = {"news", "scientific", "dialogue", "legal", "medical", "reviews"};
        return v;
    }
    static const std::vector<std::string>& datasets() {
        static const std::vector<std::string> v = {"cnn/dm", "xsum", "arxiv", "pubmed", "samsum", "multi-news",
                                                   "bigpatent", "wikihow", "gigaword", "duc"};
        return v;
    }
    static const std::vector<std::string>& metrics() {
        static const std::vector<std::string> v = {"rouge", "bertscore", "meteor", "qags", "factcc", "bleu"};
        return v;
    }
    static const std::vector<std::string>& criteria() {
        static const std::vector<std::string> v = {"informativeness", "fluency", "coherence", "faithfulness",
                                                   "relevance"};
        return v;
    }
    static const std::vector<std::string>& words() {
        static const std::vector<std::string> v = {
            "summary",  "document", "attention", "encoder",  "extractive", "abstractive", "graph", "news",
            "dialogue", "factual",  "long",      "sentence", "discourse",  "reinforce",   "query", "length",
            "salience", "coverage", "pointer",   "copy",     "transformer", "pretrained", "review", "legal"};
        return v;
    }

    std::string text(int lo, int hi) {
        std::string out;
        int n = uniform(lo, hi);
        for (int i = 0; i < n; ++i) {
            if (i) {
                out += ' ';
            }
            const auto& w = words()[uniform(0, static_cast<int>(words().size()) - 1)];
            out += coin(0.1) ? jitter_case(w) : w;
        }
        return out;
    }

    std::set<std::string> jittered(std::set<std::string> in) {
        std::set<std::string> out;
        for (const auto& v : in) {
            out.insert(jitter_case(v));
        }
        return out;
    }

    litfacet::PaperRecord record(int i) {
        litfacet::PaperRecord r;
        char id[16];
        std::snprintf(id, sizeof id, "r%04d", i);
        r.id = id;
        r.title = text(3, 8);
        r.abstract = text(10, 30);
        const auto& venues = litfacet::known_venues();
        r.venue = jitter_case(venues[uniform(0, static_cast<int>(venues.size()) - 1)]);
        r.year = uniform(2010, 2023);
        r.paper_types = subset(litfacet::paper_type_values(), 1, 2);
        r.facet_tags = subset(litfacet::boolean_tag_keys(), 0, 5);
        r.learning_paradigms = subset(litfacet::learning_paradigm_values(), 0, 2);
        r.domains = jittered(subset(domains(), 0, 2));
        r.datasets = jittered(subset(datasets(), 0, 3));
        r.auto_metrics = jittered(subset(metrics(), 0, 3));
        r.human_criteria = jittered(subset(criteria(), 0, 2));
        r.has_code = coin(0.4);
        if (r.has_code) {
            r.code_url = "https://example.org/" + r.id;
        }
        r.challenges = subset(litfacet::default_challenges().labels(), 0, 2);
        return r;
    }

    litfacet::CorpusSnapshot corpus(int n) {
        std::vector<litfacet::PaperRecord> records;
        for (int i = 0; i < n; ++i) {
            records.push_back(record(i));
        }
        return litfacet::make_snapshot(std::move(records), "random");
    }
};

// ---------------------------------------------------------------------------
// Faceted filter oracle: linear scan over records.

inline bool record_matches(const litfacet::PaperRecord& r, const litfacet::FacetFilters& f) {
    for (const auto& [dim, accepted] : f.values) {
        bool any = false;
        for (const auto& v : litfacet::record_values(r, dim)) {
            for (const auto& a : accepted) {
                if (ascii_lower(v) == ascii_lower(a)) {
                    any = true;
                }
            }
        }
        if (!any) {
            return false;
        }
    }
    if (f.years && (r.year < f.years->from || r.year > f.years->to)) {
        return false;
    }
    return true;
}

inline std::set<std::string> scan_filter(const litfacet::CorpusSnapshot& snap, const litfacet::FacetFilters& f) {
    std::set<std::string> out;
    for (const auto& [id, r] : snap.records) {
        if (record_matches(r, f)) {
            out.insert(id);
        }
    }
    return out;
}

// Draws filters from values that occur in the corpus plus occasional misses.
inline litfacet::FacetFilters random_filters(CorpusGen& g, const litfacet::CorpusSnapshot& snap) {
    using litfacet::Dimension;
    std::vector<const litfacet::PaperRecord*> recs;
    for (const auto& [id, r] : snap.records) {
        recs.push_back(&r);
    }
    litfacet::FacetFilters f;
    int dims = g.uniform(0, 3);
    const auto& all = litfacet::all_dimensions();
    for (int k = 0; k < dims; ++k) {
        auto dim = all[g.uniform(0, static_cast<int>(all.size()) - 1)];
        if (dim == Dimension::year_range) {
            int a = g.uniform(2008, 2024), b = g.uniform(2008, 2024);
            f.years = litfacet::YearRange{std::min(a, b), std::max(a, b)};
            continue;
        }
        auto& accepted = f.values[dim];
        int n = g.uniform(0, 3);
        for (int j = 0; j < n; ++j) {
            if (g.coin(0.1)) {
                accepted.insert("no-such-value");
                continue;
            }
            const auto* r = recs[g.uniform(0, static_cast<int>(recs.size()) - 1)];
            auto vals = litfacet::record_values(*r, dim);
            if (!vals.empty()) {
                auto v = vals[g.uniform(0, static_cast<int>(vals.size()) - 1)];
                accepted.insert(g.coin(0.3) ? g.jitter_case(v) : v);
            }
        }
    }
    return f;
}

// ---------------------------------------------------------------------------
// Clustering oracles

inline Eigen::MatrixXd random_points(std::mt19937_64& rng, int n, int d) {
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    Eigen::MatrixXd m(n, d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) {
            m(i, j) = u(rng);
        }
    }
    return m;
}

struct DisjointSet {
    std::vector<std::size_t> parent;
    explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            x = parent[x] = parent[parent[x]];
        }
        return x;
    }
    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) {
            return false;
        }
        parent[b] = a;
        return true;
    }
};

// Kruskal over all pairs; returns the MST total weight.
template <typename Distance>
double kruskal_weight(const Distance& dist, std::size_t n) {
    struct E {
        double w;
        std::size_t a, b;
    };
    std::vector<E> edges;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            edges.push_back({dist(a, b), a, b});
        }
    }
    std::sort(edges.begin(), edges.end(), [](const E& x, const E& y) { return x.w < y.w; });
    DisjointSet ds(n);
    double total = 0.0;
    for (const auto& e : edges) {
        if (ds.unite(e.a, e.b)) {
            total += e.w;
        }
    }
    return total;
}

// Brute-force single linkage: repeatedly merge the two closest clusters
// (min pairwise distance) until k clusters remain. Returns a partition as a
// set of sorted member lists.
inline std::set<std::vector<std::size_t>> single_linkage_partition(const Eigen::MatrixXd& pts, std::size_t k) {
    std::vector<std::vector<std::size_t>> clusters;
    for (std::size_t i = 0; i < static_cast<std::size_t>(pts.rows()); ++i) {
        clusters.push_back({i});
    }
    while (clusters.size() > k) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t ba = 0, bb = 1;
        for (std::size_t a = 0; a < clusters.size(); ++a) {
            for (std::size_t b = a + 1; b < clusters.size(); ++b) {
                for (auto i : clusters[a]) {
                    for (auto j : clusters[b]) {
                        double d = (pts.row(static_cast<Eigen::Index>(i)) - pts.row(static_cast<Eigen::Index>(j))).norm();
                        if (d < best) {
                            best = d;
                            ba = a;
                            bb = b;
                        }
                    }
                }
            }
        }
        clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(), clusters[bb].end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bb));
    }
    std::set<std::vector<std::size_t>> out;
    for (auto& c : clusters) {
        std::sort(c.begin(), c.end());
        out.insert(c);
    }
    return out;
}

inline std::set<std::vector<std::size_t>> label_partition(const std::vector<int>& labels) {
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        groups[labels[i]].push_back(i);
    }
    std::set<std::vector<std::size_t>> out;
    for (auto& [l, members] : groups) {
        out.insert(members);
    }
    return out;
}

// ---------------------------------------------------------------------------
// PCA oracle: cyclic Jacobi eigenvalue iteration on a symmetric matrix.

inline std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a) {
    const auto n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                off += a(p, q) * a(p, q);
            }
        }
        if (off < 1e-26) {
            break;
        }
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) {
                    continue;
                }
                double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        ev[static_cast<std::size_t>(i)] = a(i, i);
    }
    std::sort(ev.rbegin(), ev.rend());
    return ev;
}

// Sample covariance with explicit loops.
inline Eigen::MatrixXd covariance(const Eigen::MatrixXd& x) {
    const auto n = x.rows(), d = x.cols();
    std::vector<double> mean(static_cast<std::size_t>(d), 0.0);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            mean[static_cast<std::size_t>(j)] += x(i, j);
        }
        mean[static_cast<std::size_t>(j)] /= static_cast<double>(n);
    }
    Eigen::MatrixXd c(d, d);
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) {
            double s = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                s += (x(i, a) - mean[static_cast<std::size_t>(a)]) * (x(i, b) - mean[static_cast<std::size_t>(b)]);
            }
            c(a, b) = s / static_cast<double>(n - 1);
        }
    }
    return c;
}

inline Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            row.push_back(std::stod(cell));
        }
        rows.push_back(std::move(row));
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return m;
}

} // namespace testsupport
