#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "litfacet/cluster.hpp"
#include "litfacet/ingest.hpp"
#include "litfacet/llm_extract.hpp"
#include "litfacet/search.hpp"

namespace httplib {
class Server;
}

namespace litfacet {

/// Everything one request needs. Built once, never mutated.
struct AppState {
    CorpusSnapshot snapshot;
    IndexBundle indexes;
    std::vector<FigureAsset> figures;
    std::optional<ChallengeClusterSet> challenges;
    std::chrono::system_clock::time_point built_at;
};

std::shared_ptr<const AppState> make_state(CorpusSnapshot snapshot, std::vector<FigureAsset> figures = {},
                                           std::optional<ChallengeClusterSet> challenges = std::nullopt);

struct StatePaths {
    std::filesystem::path corpus;
    std::optional<std::filesystem::path> figures;
    std::optional<std::filesystem::path> challenges;
};

/// Loads corpus (fail-fast), figures and challenges from disk.
std::shared_ptr<const AppState> load_state(const StatePaths& paths);

/// Holds the current state. Readers take a reference for the whole request;
/// replace() swaps the pointer so a reader sees the old or the new state.
class StateHolder {
public:
    explicit StateHolder(std::shared_ptr<const AppState> initial);

    std::shared_ptr<const AppState> current() const;
    void replace(std::shared_ptr<const AppState> next);
    std::uint64_t generation() const;

private:
    mutable std::mutex mutex_;
    std::shared_ptr<const AppState> state_;
    std::uint64_t generation_ = 0;
};

struct ApiResponse {
    int status = 200;
    nlohmann::json body;
};

/// {"error": {"code": ..., "message": ...}}
nlohmann::json error_body(std::string_view code, std::string_view message);

/// Request handlers over an AppState, independent of the transport.
namespace api {
ApiResponse facets(const AppState& state);
ApiResponse paper(const AppState& state, const std::string& id);
ApiResponse paper_summary(const AppState& state, const std::string& id);
ApiResponse search(const AppState& state, std::string_view body);
ApiResponse stats_report(const AppState& state);
ApiResponse stats_dimension(const AppState& state, std::string_view dimension);
ApiResponse figures(const AppState& state, const std::optional<std::string>& paper_id,
                    const std::optional<std::string>& q);
ApiResponse challenges(const AppState& state);
} // namespace api

/// HTTP front end for the api:: handlers.
class ApiServer {
public:
    explicit ApiServer(StateHolder& holder);
    ~ApiServer();
    ApiServer(const ApiServer&) = delete;
    ApiServer& operator=(const ApiServer&) = delete;

    /// Port 0 picks a free port. Throws Error(bind_error).
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    void listen();
    /// listen() on a background thread.
    void start();
    void stop();
    int port() const noexcept { return port_; }

private:
    StateHolder& holder_;
    std::unique_ptr<httplib::Server> server_;
    std::jthread thread_;
    int port_ = -1;
};

// ---------------------------------------------------------------------------
// Enrichment

/// Copies an extraction result into a record. Context factors fill the
/// purpose/audience/application fields, problems replace the summary's
/// problem list, terms replace all entries of the same kind.
PaperRecord apply_extraction(PaperRecord record, const ParsedExtraction& extraction);

struct EnrichmentResult {
    CorpusSnapshot snapshot;
    std::size_t applied = 0;
    std::size_t skipped = 0;
    /// "<record id> <kind>: <message>"
    std::vector<std::string> errors;
};

EnrichmentResult enrich_corpus(const CorpusSnapshot& snapshot, std::span<const PromptKind> kinds,
                               const CompletionClientConfig& config, CompletionTransport& transport);

/// Adds each paper's clustered problem labels to its challenges. Noise
/// statements contribute nothing.
CorpusSnapshot attach_challenges(const CorpusSnapshot& snapshot, const ChallengeClusterSet& clusters);

// ---------------------------------------------------------------------------
// Command line

/// Runs the command line tool. Returns 0 on success, 1 on failure, 2 on
/// usage errors.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace litfacet
