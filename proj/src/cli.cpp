#include <algorithm>
#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "litfacet/error.hpp"
#include "litfacet/service.hpp"
#include "litfacet/stats.hpp"

namespace litfacet {

using nlohmann::json;

namespace {

std::atomic<bool> g_stop{false};
std::atomic<bool> g_reload{false};

extern "C" void on_stop_signal(int) { g_stop = true; }
extern "C" void on_reload_signal(int) { g_reload = true; }

void write_output(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw Error(ErrorCode::io_error, "cannot write " + path);
    }
    f << text;
}

int cmd_validate(const std::string& corpus, const std::string& figures, std::ostream& out, std::ostream& err) {
    auto result = load_corpus(corpus, LoadOptions{.lenient = true});
    for (const auto& r : result.rejected) {
        err << corpus << ":" << r.line << ": " << to_string(r.code) << ": " << r.detail << "\n";
        for (const auto& v : r.violations) {
            err << "    " << v.field << ": " << v.rule;
            if (!v.detail.empty()) {
                err << " (" << v.detail << ")";
            }
            err << "\n";
        }
    }
    for (const auto& w : result.warnings) {
        err << "warning: " << w << "\n";
    }
    std::size_t figure_problems = 0;
    if (!figures.empty()) {
        auto assets = load_figures(figures);
        auto problems = cross_validate_figures(assets, result.snapshot);
        for (const auto& p : problems) {
            err << figures << ": " << p << "\n";
        }
        figure_problems = problems.size();
    }
    out << result.snapshot.size() << " valid, " << result.rejected.size() << " rejected\n";
    return result.rejected.empty() && figure_problems == 0 ? 0 : 1;
}

int cmd_screen(const std::string& keyword, const std::string& candidates, std::ostream& out) {
    auto list = load_candidates(candidates);
    for (const auto& id : keyword_screen(list, keyword)) {
        out << id << "\n";
    }
    return 0;
}

int cmd_index(const std::string& corpus, const std::string& query_text, std::ostream& out) {
    auto loaded = load_corpus(corpus);
    auto indexes = build_indexes(loaded.snapshot);
    if (!query_text.empty()) {
        json q;
        try {
            q = json::parse(query_text);
        } catch (const json::exception& e) {
            throw Error(ErrorCode::bad_query, e.what());
        }
        out << to_json(search(indexes, query_from_json(q))).dump(2) << "\n";
        return 0;
    }
    json facet_values = json::object();
    for (auto dim : all_dimensions()) {
        facet_values[std::string(to_string(dim))] = indexes.facets.values(dim).size();
    }
    json summary = {{"documents", indexes.text.doc_count()},
                    {"terms", indexes.text.term_count()},
                    {"facet_values", facet_values}};
    out << summary.dump(2) << "\n";
    return 0;
}

std::vector<PromptKind> kinds_from(const std::vector<std::string>& names) {
    std::vector<PromptKind> kinds;
    for (const auto& n : names) {
        if (n == "all") {
            return all_prompt_kinds();
        }
        auto k = parse_prompt_kind(n);
        if (std::find(kinds.begin(), kinds.end(), k) == kinds.end()) {
            kinds.push_back(k);
        }
    }
    return kinds;
}

int cmd_extract(const std::string& corpus, const std::vector<std::string>& kind_names, bool offline,
                const std::string& fixtures, int retries, const std::string& out_path, std::ostream& out,
                std::ostream& err) {
    auto kinds = kinds_from(kind_names);
    auto loaded = load_corpus(corpus);
    auto config = CompletionClientConfig::from_env();
    config.max_retries = retries;
    std::unique_ptr<CompletionTransport> transport;
    if (offline) {
        if (fixtures.empty()) {
            throw Error(ErrorCode::invalid_config, "--offline needs --fixtures");
        }
        transport = std::make_unique<FixtureTransport>(fixtures);
    } else {
        transport = std::make_unique<HttpCompletionTransport>(config);
    }
    auto result = enrich_corpus(loaded.snapshot, kinds, config, *transport);
    for (const auto& e : result.errors) {
        err << "error: " << e << "\n";
    }
    err << result.applied << " applied, " << result.skipped << " skipped, " << result.errors.size() << " failed\n";
    write_output(format_corpus(result.snapshot), out_path, out);
    return result.errors.empty() ? 0 : 1;
}

int cmd_cluster(const std::string& embeddings, int min_cluster_size, std::optional<int> min_samples,
                int target_dim, const std::string& labels, const std::string& out_path, const std::string& corpus,
                const std::string& corpus_out, std::ostream& out, std::ostream& err) {
    auto set = load_embeddings(embeddings);
    std::map<int, std::string> label_map;
    if (!labels.empty()) {
        try {
            label_map = label_map_from_json(json::parse(read_text_file(labels)));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::parse_error, labels + ": " + e.what());
        }
    }
    HdbscanParams params;
    params.min_cluster_size = min_cluster_size;
    params.min_samples = min_samples;
    auto clusters = cluster_problems(set, ReductionConfig{target_dim}, params, label_map);
    for (const auto& w : clusters.warnings) {
        err << "warning: " << w << "\n";
    }
    err << clusters.num_clusters << " clusters, " << clusters.num_noise << " noise\n";
    write_output(to_json(clusters).dump(2) + "\n", out_path, out);
    if (!corpus.empty()) {
        auto loaded = load_corpus(corpus);
        auto enriched = attach_challenges(loaded.snapshot, clusters);
        write_corpus(corpus_out.empty() ? std::filesystem::path(corpus) : std::filesystem::path(corpus_out),
                     enriched);
    }
    return 0;
}

int cmd_stats(const std::string& corpus, const std::string& dimension, const std::string& format,
              std::ostream& out) {
    auto loaded = load_corpus(corpus);
    const auto& snap = loaded.snapshot;
    if (dimension == "report") {
        auto r = report(snap);
        if (format == "json") {
            out << to_json(r).dump(2) << "\n";
        } else if (format == "csv") {
            out << to_csv(r);
        } else {
            out << to_table(r);
        }
        return 0;
    }
    auto d = distribution(snap, dimension);
    if (format == "json") {
        out << to_json(d).dump(2) << "\n";
    } else if (format == "csv") {
        out << to_csv(d);
    } else {
        out << to_table(d);
    }
    return 0;
}

int cmd_serve(const StatePaths& paths, const std::string& host, int port, std::ostream& out, std::ostream& err) {
    StateHolder holder(load_state(paths));
    ApiServer server(holder);
    int bound = server.bind(host, port);

    g_stop = false;
    g_reload = false;
    auto prev_int = std::signal(SIGINT, on_stop_signal);
    auto prev_term = std::signal(SIGTERM, on_stop_signal);
    auto prev_hup = std::signal(SIGHUP, on_reload_signal);

    std::jthread watcher([&](std::stop_token token) {
        while (!token.stop_requested()) {
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
            if (g_reload.exchange(false)) {
                try {
                    holder.replace(load_state(paths));
                    err << "reloaded " << paths.corpus.string() << "\n";
                } catch (const std::exception& e) {
                    // keep serving the previous state
                    err << "reload failed: " << e.what() << "\n";
                }
            }
            if (g_stop) {
                server.stop();
                return;
            }
        }
    });

    out << "listening on http://" << host << ":" << bound << std::endl;
    server.listen();
    watcher.request_stop();
    watcher.join();

    std::signal(SIGINT, prev_int);
    std::signal(SIGTERM, prev_term);
    std::signal(SIGHUP, prev_hup);
    return 0;
}

} // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Faceted exploration of annotated summarization papers", "litfacet"};
    app.require_subcommand(1);
    app.fallthrough(false);

    std::string corpus, figures, keyword, candidates, query, fixtures, out_path, embeddings, labels, challenges,
        corpus_out, dimension = "report", format = "table", host = "127.0.0.1";
    std::vector<std::string> kind_names;
    bool offline = false;
    int retries = 2, port = 8080, min_cluster_size = 5, target_dim = 5;
    std::optional<int> min_samples;

    auto* validate = app.add_subcommand("validate", "Check a corpus file (and optionally a figure manifest)");
    validate->add_option("corpus", corpus, "Corpus JSONL")->required();
    validate->add_option("--figures", figures, "Figure manifest to cross-check");

    auto* screen = app.add_subcommand("screen", "List candidate ids whose title or abstract contains a keyword");
    screen->add_option("--keyword", keyword, "Keyword (case-insensitive)")->required();
    screen->add_option("candidates", candidates, "Candidates JSONL")->required();

    auto* index = app.add_subcommand("index", "Build indexes and print their size, or run a query");
    index->add_option("corpus", corpus, "Corpus JSONL")->required();
    index->add_option("--query", query, "Query JSON to run against the index");

    auto* extract = app.add_subcommand("extract", "Run LLM extraction and write an enriched corpus");
    extract->add_option("corpus", corpus, "Corpus JSONL")->required();
    extract->add_option("--kind", kind_names, "context_factors, problems_solutions, glossary, acronyms or all")
        ->required();
    extract->add_flag("--offline", offline, "Replay completions from --fixtures");
    extract->add_option("--fixtures", fixtures, "Fixture directory ({kind}/{id}.txt)");
    extract->add_option("--retries", retries, "Parse retries")->check(CLI::NonNegativeNumber);
    extract->add_option("--out", out_path, "Output corpus (default stdout)");

    auto* cluster = app.add_subcommand("cluster", "Cluster problem-statement embeddings into challenges");
    cluster->add_option("--embeddings", embeddings, "Embeddings JSONL")->required();
    cluster->add_option("--min-cluster-size", min_cluster_size, "Minimum cluster size")->check(CLI::PositiveNumber);
    cluster->add_option("--min-samples", min_samples, "Core-distance neighbour count")->check(CLI::PositiveNumber);
    cluster->add_option("--target-dim", target_dim, "PCA dimensions")->check(CLI::PositiveNumber);
    cluster->add_option("--labels", labels, "Cluster label map JSON");
    cluster->add_option("--out", out_path, "Output cluster set JSON (default stdout)");
    cluster->add_option("--corpus", corpus, "Corpus whose challenges should be annotated");
    cluster->add_option("--corpus-out", corpus_out, "Where to write the annotated corpus (default: in place)");

    auto* stats = app.add_subcommand("stats", "Dashboard statistics");
    stats->add_option("corpus", corpus, "Corpus JSONL")->required();
    stats->add_option("--dimension", dimension, "A dimension name or 'report'");
    stats->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv", "table"}));

    auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
    serve->add_option("--corpus", corpus, "Corpus JSONL")->required();
    serve->add_option("--figures", figures, "Figure manifest JSON");
    serve->add_option("--challenges", challenges, "Cluster set JSON from 'cluster'");
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        if (code == 0) {
            return 0;
        }
        if (e.get_name() != "RequiredError" || app.get_subcommands().empty()) {
            err << app.help();
        }
        return 2;
    }

    try {
        if (*validate) {
            return cmd_validate(corpus, figures, out, err);
        }
        if (*screen) {
            return cmd_screen(keyword, candidates, out);
        }
        if (*index) {
            return cmd_index(corpus, query, out);
        }
        if (*extract) {
            return cmd_extract(corpus, kind_names, offline, fixtures, retries, out_path, out, err);
        }
        if (*cluster) {
            return cmd_cluster(embeddings, min_cluster_size, min_samples, target_dim, labels, out_path, corpus,
                               corpus_out, out, err);
        }
        if (*stats) {
            return cmd_stats(corpus, dimension, format, out);
        }
        if (*serve) {
            StatePaths paths{corpus, std::nullopt, std::nullopt};
            if (!figures.empty()) {
                paths.figures = figures;
            }
            if (!challenges.empty()) {
                paths.challenges = challenges;
            }
            return cmd_serve(paths, host, port, out, err);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        bool usage = e.code() == ErrorCode::unknown_dimension || e.code() == ErrorCode::invalid_config;
        return usage ? 2 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << app.help();
    return 2;
}

} // namespace litfacet
