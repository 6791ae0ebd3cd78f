#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace litfacet {

enum class FacetGroup {
    document_representation,
    model_training,
    summary_generation,
    evaluation,
    metadata,
};

enum class FacetKind { boolean_tag, valued };

std::string_view to_string(FacetGroup group);
std::string_view to_string(FacetKind kind);

struct FacetDescriptor {
    std::string key;
    FacetGroup group;
    FacetKind kind;
    std::string label;
    std::string description;

    bool operator==(const FacetDescriptor&) const = default;
};

/// The annotation scheme: 17 facets in display order, grouped 4/3/3/4/3.
const std::vector<FacetDescriptor>& taxonomy();

/// Looks up a descriptor by key; nullptr if the key is not part of the scheme.
const FacetDescriptor* find_facet(std::string_view key);

/// Keys of the 10 boolean tag facets, in taxonomy order.
const std::vector<std::string>& boolean_tag_keys();
bool is_boolean_tag(std::string_view key);

const std::vector<std::string>& paper_type_values();
const std::vector<std::string>& learning_paradigm_values();

/// Venues crawled for the original corpus. Absence only produces a warning.
const std::vector<std::string>& known_venues();

/// ASCII lower-casing used wherever open vocabularies are compared.
std::string fold_case(std::string_view text);

struct ProblemSolution {
    std::string problem;
    std::string solution;

    bool operator==(const ProblemSolution&) const = default;
};

struct IndicativeSummary {
    std::string purpose;
    std::string audience;
    std::string application;
    std::vector<ProblemSolution> problems_solutions;
    std::optional<std::string> intro_summary;

    bool operator==(const IndicativeSummary&) const = default;
};

enum class TermKind { glossary, acronym };
std::string_view to_string(TermKind kind);

struct TermEntry {
    TermKind kind = TermKind::glossary;
    std::string term;
    std::string definition;

    bool operator==(const TermEntry&) const = default;
};

/// True when the text has at least two ASCII uppercase letters.
bool looks_like_acronym(std::string_view term);

struct PaperRecord {
    std::string id;
    std::string title;
    std::string abstract;
    std::optional<std::string> introduction;
    std::string venue;
    int year = 0;
    std::set<std::string> paper_types;
    std::set<std::string> facet_tags;
    std::set<std::string> learning_paradigms;
    std::set<std::string> domains;
    std::set<std::string> datasets;
    std::set<std::string> auto_metrics;
    std::set<std::string> human_criteria;
    bool has_code = false;
    std::optional<std::string> code_url;
    std::set<std::string> challenges;
    std::optional<IndicativeSummary> indicative_summary;
    std::vector<TermEntry> terminology;

    bool operator==(const PaperRecord&) const = default;
};

struct Violation {
    std::string field;
    std::string rule;
    std::string detail;

    bool operator==(const Violation&) const = default;
};

inline constexpr int kMinYear = 1950;
inline constexpr int kMaxYear = 2100;

/// Checks every record invariant. Returns an empty list for a valid record.
std::vector<Violation> validate_record(const PaperRecord& record);

/// Non-fatal remarks, e.g. a venue outside the known venue list.
std::vector<std::string> record_warnings(const PaperRecord& record);

class ChallengeVocabulary {
public:
    ChallengeVocabulary() = default;
    explicit ChallengeVocabulary(std::vector<std::string> labels);

    const std::vector<std::string>& labels() const noexcept { return labels_; }
    std::size_t size() const noexcept { return labels_.size(); }
    bool contains(std::string_view label) const;

    /// Returns a copy with the label appended; duplicates are ignored.
    ChallengeVocabulary extended(std::string label) const;

    bool operator==(const ChallengeVocabulary&) const = default;

private:
    std::vector<std::string> labels_;
};

/// The nine problem-statement challenge labels, in their printed order.
ChallengeVocabulary default_challenges();

// JSON (one object per corpus line). Parsing is strict: unknown keys and
// wrong types raise Error(parse_error).
nlohmann::json to_json(const PaperRecord& record);
PaperRecord record_from_json(const nlohmann::json& j);

nlohmann::json to_json(const IndicativeSummary& summary);
IndicativeSummary summary_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TermEntry& term);
TermEntry term_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FacetDescriptor& facet);
nlohmann::json to_json(const Violation& violation);

} // namespace litfacet
