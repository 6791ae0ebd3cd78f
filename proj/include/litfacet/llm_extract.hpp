#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "litfacet/corpus_model.hpp"

namespace litfacet {

enum class PromptKind { context_factors, problems_solutions, glossary, acronyms };

const std::vector<PromptKind>& all_prompt_kinds();
std::string_view to_string(PromptKind kind);
/// Throws Error(invalid_config) for names outside the closed set.
PromptKind parse_prompt_kind(std::string_view name);

inline constexpr std::string_view kIntroductionPlaceholder = "{Introduction}";

/// Prompt template with the {Introduction} placeholder left in place.
std::string_view prompt_template(PromptKind kind);

/// Substitutes the introduction into the template. Throws empty_introduction.
std::string build_prompt(PromptKind kind, std::string_view introduction);

struct QaPair {
    std::string question;
    std::string answer;
    bool operator==(const QaPair&) const = default;
};

/// Parser output. Warnings list lines that were tolerated or dropped.
template <typename T>
struct Parsed {
    std::vector<T> items;
    std::vector<std::string> warnings;
};

inline constexpr std::size_t kContextQuestionCount = 3;

// Parsers throw Error with format_error, wrong_pair_count or empty_list.

/// QUESTION:/ANSWER: blocks; exactly three pairs. Leading list numbering is
/// tolerated, lines without a token continue the current field.
Parsed<QaPair> parse_context_factors(std::string_view raw);
/// Alternating PROBLEM/SOLUTION tokens, at least one complete pair.
Parsed<ProblemSolution> parse_problems_solutions(std::string_view raw);
/// "[Concept: Definition]", numbered or bare "Concept: Definition" lines.
Parsed<TermEntry> parse_glossary(std::string_view raw);
/// Same line grammar as the glossary; terms need two uppercase letters.
Parsed<TermEntry> parse_acronyms(std::string_view raw);

/// Canonical completion text for each grammar; parsing it back is the identity.
std::string render_context_factors(std::span<const QaPair> pairs);
std::string render_problems_solutions(std::span<const ProblemSolution> pairs);
std::string render_terms(std::span<const TermEntry> terms);

/// Answers map positionally to purpose, audience and application.
IndicativeSummary assemble_summary(std::span<const QaPair> qas, std::span<const ProblemSolution> ps);

struct CompletionClientConfig {
    std::string base_url;
    std::string model_name;
    std::string api_key_env = "LLM_API_KEY";
    double temperature = 0.0;
    int max_retries = 2;
    std::chrono::milliseconds timeout{60'000};
    int max_in_flight = 4;

    /// Throws Error(invalid_config).
    void validate() const;
    /// Reads LLM_API_BASE and LLM_MODEL; other fields keep their defaults.
    static CompletionClientConfig from_env();
};

struct CompletionRequest {
    std::string prompt;
    PromptKind kind;
    std::string record_id;
};

/// Produces raw completion text for a prompt. Implementations must be safe
/// to call from several threads at once.
class CompletionTransport {
public:
    virtual ~CompletionTransport() = default;
    /// Throws Error(transport_error).
    virtual std::string complete(const CompletionRequest& request) = 0;
};

/// POST {base_url}/chat/completions with a single user message.
class HttpCompletionTransport final : public CompletionTransport {
public:
    explicit HttpCompletionTransport(CompletionClientConfig config);
    std::string complete(const CompletionRequest& request) override;

    /// Request body sent for a prompt.
    static nlohmann::json request_body(const CompletionClientConfig& config, std::string_view prompt);
    /// Extracts choices[0].message.content. Throws transport_error.
    static std::string response_content(std::string_view body);

private:
    CompletionClientConfig config_;
};

/// Replays canned completions from {root}/{kind}/{record_id}.txt.
class FixtureTransport final : public CompletionTransport {
public:
    explicit FixtureTransport(std::filesystem::path root);
    std::string complete(const CompletionRequest& request) override;
    std::filesystem::path fixture_path(PromptKind kind, std::string_view record_id) const;

private:
    std::filesystem::path root_;
};

struct ParsedExtraction {
    PromptKind kind = PromptKind::context_factors;
    std::optional<std::vector<QaPair>> qa_pairs;
    std::optional<std::vector<ProblemSolution>> problems_solutions;
    std::optional<std::vector<TermEntry>> terms;
    std::string raw;
    std::vector<std::string> warnings;
    int attempts = 1;
};

/// Runs the parser matching the kind.
ParsedExtraction parse_completion(PromptKind kind, std::string_view raw);

/// Prompt, call, parse. Parse failures are retried with the same prompt up to
/// config.max_retries times. Throws missing_introduction, transport_error or
/// parse_failed_after_retries. Never modifies the record.
ParsedExtraction extract(PromptKind kind, const PaperRecord& record, const CompletionClientConfig& config,
                         CompletionTransport& transport);

struct ExtractionOutcome {
    std::string record_id;
    PromptKind kind = PromptKind::context_factors;
    std::optional<ParsedExtraction> result;
    std::optional<std::string> error;
    bool skipped = false;
};

/// Runs extract over records x kinds with at most config.max_in_flight calls
/// in flight. Records without an introduction are reported as skipped.
/// Output order is records-major, kinds-minor, independent of scheduling.
std::vector<ExtractionOutcome> extract_batch(std::span<const PaperRecord> records,
                                             std::span<const PromptKind> kinds,
                                             const CompletionClientConfig& config,
                                             CompletionTransport& transport);

nlohmann::json to_json(const ParsedExtraction& extraction);

} // namespace litfacet
