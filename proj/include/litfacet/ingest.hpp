#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "litfacet/corpus_model.hpp"
#include "litfacet/error.hpp"

namespace litfacet {

/// An immutable, id-keyed set of validated records.
struct CorpusSnapshot {
    std::map<std::string, PaperRecord> records;
    std::chrono::system_clock::time_point loaded_at{};
    std::string source_path;

    std::size_t size() const noexcept { return records.size(); }
    const PaperRecord* find(const std::string& id) const;

    /// Content equality; loaded_at is deliberately not compared.
    bool operator==(const CorpusSnapshot& other) const {
        return records == other.records && source_path == other.source_path;
    }
};

/// Builds a snapshot from in-memory records. Throws duplicate_id or
/// validation_error like load_corpus does in fail-fast mode.
CorpusSnapshot make_snapshot(std::vector<PaperRecord> records, std::string source = "<memory>");

struct LoadOptions {
    /// Skip bad lines and report them instead of throwing on the first one.
    bool lenient = false;
};

struct RejectedLine {
    std::size_t line = 0;
    ErrorCode code = ErrorCode::parse_error;
    std::string detail;
    std::vector<Violation> violations;
};

struct LoadResult {
    CorpusSnapshot snapshot;
    std::vector<RejectedLine> rejected;
    std::vector<std::string> warnings;
};

/// Reads a line-delimited JSON corpus. Blank lines are ignored.
///
/// Fail-fast mode throws Error with the offending 1-based line number:
/// parse_error, duplicate_id or validation_error (the message lists the
/// violations). Lenient mode collects those into LoadResult::rejected.
LoadResult load_corpus(const std::filesystem::path& path, const LoadOptions& options = {});
LoadResult parse_corpus(std::string_view text, std::string source, const LoadOptions& options = {});

void write_corpus(const std::filesystem::path& path, const CorpusSnapshot& snapshot);
std::string format_corpus(const CorpusSnapshot& snapshot);

struct ScreenCandidate {
    std::string id;
    std::string title;
    std::string abstract;
};

/// Ids whose title or abstract contains keyword, case-insensitively, in
/// input order. Throws empty_keyword.
std::vector<std::string> keyword_screen(std::span<const ScreenCandidate> candidates,
                                        std::string_view keyword);

/// Candidate file: one {"id","title","abstract"} object per line.
std::vector<ScreenCandidate> load_candidates(const std::filesystem::path& path);

enum class AssetKind { figure, table };
std::string_view to_string(AssetKind kind);

struct FigureAsset {
    std::string paper_id;
    AssetKind kind = AssetKind::figure;
    std::string caption;
    std::string image_ref;
    int ordinal = 1;

    bool operator==(const FigureAsset&) const = default;
};

nlohmann::json to_json(const FigureAsset& asset);

/// Manifest: a JSON array of assets. image_ref must be a relative path that
/// stays below the manifest directory.
std::vector<FigureAsset> load_figures(const std::filesystem::path& path);
std::vector<FigureAsset> parse_figures(std::string_view text);

/// Problems found when checking assets against a snapshot (unknown paper ids).
std::vector<std::string> cross_validate_figures(std::span<const FigureAsset> figures,
                                                const CorpusSnapshot& snapshot);

struct EmbeddedStatement {
    std::string statement_id;
    std::string paper_id;
    std::string problem;
    std::vector<double> vector;

    bool operator==(const EmbeddedStatement&) const = default;
};

/// Statements keep file order; that order is the point index used by the
/// clustering pipeline.
struct EmbeddingSet {
    std::size_t dim = 0;
    std::vector<EmbeddedStatement> statements;

    std::size_t size() const noexcept { return statements.size(); }
    const EmbeddedStatement* find(const std::string& statement_id) const;
};

/// Embedding file: one {"statement_id","paper_id","problem","vector"} per line.
/// Throws dim_mismatch naming the first statement whose length differs.
EmbeddingSet load_embeddings(const std::filesystem::path& path);
EmbeddingSet parse_embeddings(std::string_view text);
std::string format_embeddings(const EmbeddingSet& set);

std::string read_text_file(const std::filesystem::path& path);

} // namespace litfacet
