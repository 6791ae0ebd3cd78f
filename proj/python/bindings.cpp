#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "litfacet/cluster.hpp"
#include "litfacet/error.hpp"
#include "litfacet/ingest.hpp"
#include "litfacet/llm_extract.hpp"
#include "litfacet/search.hpp"
#include "litfacet/service.hpp"
#include "litfacet/stats.hpp"

namespace py = pybind11;
using nlohmann::json;

// JSON crosses the boundary as text; the Python package decodes it.

namespace {

PyObject* g_error_type = nullptr;

std::string dump(const json& j) { return j.dump(); }

/// api:: handlers report failures in the body; surface them as exceptions.
std::string unwrap(const litfacet::ApiResponse& r) {
    if (r.status != 200) {
        const auto& err = r.body["error"];
        auto code = err["code"].get<std::string>();
        py::object inst = py::reinterpret_borrow<py::object>(g_error_type)(code + ": " + err["message"].get<std::string>());
        inst.attr("code") = code;
        PyErr_SetObject(g_error_type, inst.ptr());
        throw py::error_already_set();
    }
    return r.body.dump();
}

class Corpus {
public:
    Corpus(const std::filesystem::path& corpus, std::optional<std::filesystem::path> figures,
           std::optional<std::filesystem::path> challenges)
        : state_(litfacet::load_state({corpus, std::move(figures), std::move(challenges)})) {}

    std::size_t size() const { return state_->snapshot.size(); }
    std::vector<std::string> ids() const { return state_->indexes.facets.ids(); }
    std::string paper(const std::string& id) const { return unwrap(litfacet::api::paper(*state_, id)); }
    std::string summary(const std::string& id) const { return unwrap(litfacet::api::paper_summary(*state_, id)); }
    std::string search(const std::string& query) const { return unwrap(litfacet::api::search(*state_, query)); }
    std::string report() const { return unwrap(litfacet::api::stats_report(*state_)); }
    std::string distribution(const std::string& dim) const {
        return unwrap(litfacet::api::stats_dimension(*state_, dim));
    }
    std::string figures(std::optional<std::string> paper_id, std::optional<std::string> q) const {
        return unwrap(litfacet::api::figures(*state_, paper_id, q));
    }
    std::string challenges() const { return unwrap(litfacet::api::challenges(*state_)); }

private:
    std::shared_ptr<const litfacet::AppState> state_;
};

std::string load_corpus_report(const std::filesystem::path& path, bool lenient) {
    auto r = litfacet::load_corpus(path, {.lenient = lenient});
    json records = json::array();
    for (const auto& [id, rec] : r.snapshot.records) {
        records.push_back(litfacet::to_json(rec));
    }
    json rejected = json::array();
    for (const auto& rej : r.rejected) {
        rejected.push_back({{"line", rej.line}, {"code", litfacet::to_string(rej.code)}, {"detail", rej.detail}});
    }
    return dump({{"records", records}, {"rejected", rejected}, {"warnings", r.warnings}});
}

std::string validate_record(const std::string& record_json) {
    json out = json::array();
    for (const auto& v : litfacet::validate_record(litfacet::record_from_json(json::parse(record_json)))) {
        out.push_back(litfacet::to_json(v));
    }
    return out.dump();
}

std::string taxonomy() {
    json out = json::array();
    for (const auto& f : litfacet::taxonomy()) {
        out.push_back(litfacet::to_json(f));
    }
    return out.dump();
}

py::dict hdbscan(const Eigen::MatrixXd& points, int min_cluster_size, std::optional<int> min_samples,
                 bool allow_single_cluster) {
    litfacet::HdbscanParams params;
    params.min_cluster_size = min_cluster_size;
    params.min_samples = min_samples;
    params.allow_single_cluster = allow_single_cluster;
    auto flat = litfacet::hdbscan(points, params);
    py::dict d;
    d["labels"] = flat.labels;
    d["probabilities"] = flat.probabilities;
    d["num_clusters"] = flat.num_clusters();
    return d;
}

py::dict pca(const Eigen::MatrixXd& data, int target_dim) {
    auto r = litfacet::pca(data, target_dim);
    py::dict d;
    d["projected"] = r.projected;
    d["components"] = r.components;
    d["mean"] = r.mean;
    d["variances"] = r.variances;
    return d;
}

std::string cluster_embeddings(const std::filesystem::path& path, int min_cluster_size,
                               std::optional<int> min_samples, int target_dim, const std::string& labels_json) {
    auto emb = litfacet::load_embeddings(path);
    litfacet::HdbscanParams params;
    params.min_cluster_size = min_cluster_size;
    params.min_samples = min_samples;
    std::map<int, std::string> labels;
    if (!labels_json.empty()) {
        labels = litfacet::label_map_from_json(json::parse(labels_json));
    }
    return litfacet::to_json(litfacet::cluster_problems(emb, litfacet::ReductionConfig{target_dim}, params, labels)).dump();
}

std::vector<std::string> screen(const std::filesystem::path& candidates, const std::string& keyword) {
    auto c = litfacet::load_candidates(candidates);
    return litfacet::keyword_screen(c, keyword);
}

std::string extract_offline(const std::string& record_json, const std::string& kind,
                            const std::filesystem::path& fixtures, int max_retries) {
    litfacet::CompletionClientConfig config;
    config.max_retries = max_retries;
    litfacet::FixtureTransport transport(fixtures);
    auto record = litfacet::record_from_json(json::parse(record_json));
    return litfacet::to_json(litfacet::extract(litfacet::parse_prompt_kind(kind), record, config, transport)).dump();
}

py::tuple run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = 0;
    {
        py::gil_scoped_release release;
        code = litfacet::run_cli(std::move(args), out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
}

} // namespace

PYBIND11_MODULE(_litfacet, m) {
    m.doc() = "Native core of the litfacet package";

    g_error_type = PyErr_NewException("litfacet._litfacet.LitfacetError", PyExc_ValueError, nullptr);
    m.attr("LitfacetError") = py::handle(g_error_type);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const litfacet::Error& e) {
            std::string code(litfacet::to_string(e.code()));
            py::object inst = py::reinterpret_borrow<py::object>(g_error_type)(std::string(e.what()));
            inst.attr("code") = code;
            PyErr_SetObject(g_error_type, inst.ptr());
        }
    });

    m.def("taxonomy", &taxonomy);
    m.def("load_corpus", &load_corpus_report, py::arg("path"), py::arg("lenient") = false);
    m.def("validate_record", &validate_record, py::arg("record"));
    m.def("keyword_screen", &screen, py::arg("candidates"), py::arg("keyword"));

    py::class_<Corpus>(m, "Corpus")
        .def(py::init<const std::filesystem::path&, std::optional<std::filesystem::path>,
                      std::optional<std::filesystem::path>>(),
             py::arg("corpus"), py::arg("figures") = py::none(), py::arg("challenges") = py::none())
        .def("__len__", &Corpus::size)
        .def("ids", &Corpus::ids)
        .def("paper", &Corpus::paper, py::arg("id"))
        .def("summary", &Corpus::summary, py::arg("id"))
        .def("search", &Corpus::search, py::arg("query"))
        .def("report", &Corpus::report)
        .def("distribution", &Corpus::distribution, py::arg("dimension"))
        .def("figures", &Corpus::figures, py::arg("paper_id") = py::none(), py::arg("q") = py::none())
        .def("challenges", &Corpus::challenges);

    m.def("build_prompt", [](const std::string& kind, const std::string& intro) {
        return litfacet::build_prompt(litfacet::parse_prompt_kind(kind), intro);
    }, py::arg("kind"), py::arg("introduction"));
    m.def("parse_completion", [](const std::string& kind, const std::string& raw) {
        return litfacet::to_json(litfacet::parse_completion(litfacet::parse_prompt_kind(kind), raw)).dump();
    }, py::arg("kind"), py::arg("raw"));
    m.def("extract_offline", &extract_offline, py::arg("record"), py::arg("kind"), py::arg("fixtures"),
          py::arg("max_retries") = 2);

    m.def("bm25_scores", [](const std::vector<std::string>& docs, const std::string& query) {
        auto ti = litfacet::TextIndex::from_documents(docs);
        auto terms = litfacet::query_terms(query);
        std::vector<double> out;
        for (litfacet::DocId d = 0; d < docs.size(); ++d) {
            out.push_back(ti.score(d, terms));
        }
        return out;
    }, py::arg("documents"), py::arg("query"));

    m.def("pca", &pca, py::arg("data"), py::arg("target_dim"));
    m.def("hdbscan", &hdbscan, py::arg("points"), py::arg("min_cluster_size") = 5,
          py::arg("min_samples") = py::none(), py::arg("allow_single_cluster") = false);
    m.def("cluster_embeddings", &cluster_embeddings, py::arg("path"), py::arg("min_cluster_size") = 5,
          py::arg("min_samples") = py::none(), py::arg("target_dim") = 5, py::arg("labels") = "");

    m.def("run_cli", &run_cli, py::arg("args"));
}
