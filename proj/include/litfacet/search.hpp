#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "litfacet/ingest.hpp"

namespace litfacet {

/// Filterable dimensions of a query.
enum class Dimension {
    facet_tags,
    paper_types,
    learning_paradigms,
    venue,
    year_range,
    domains,
    datasets,
    auto_metrics,
    human_criteria,
    challenges,
    has_code,
};

const std::vector<Dimension>& all_dimensions();
std::string_view to_string(Dimension dim);
/// Key used for the dimension in aggregation output ("year" for year_range).
std::string_view aggregation_key(Dimension dim);
/// Throws Error(unknown_dimension).
Dimension parse_dimension(std::string_view name);

/// Document ordinals; ordinal i is the i-th id in ascending id order.
using DocId = std::uint32_t;
using DocSet = std::vector<DocId>;

struct YearRange {
    int from = 0;
    int to = 0;
    bool operator==(const YearRange&) const = default;
};

/// Accepted values per dimension. Values are compared case-insensitively.
/// Within a dimension values are OR-ed, across dimensions AND-ed. A present
/// dimension with no accepted values matches nothing.
struct FacetFilters {
    std::map<Dimension, std::set<std::string>> values;
    std::optional<YearRange> years;

    bool empty() const { return values.empty() && !years; }
    bool operator==(const FacetFilters&) const = default;
};

/// The label values a record carries in a dimension (year_range yields the
/// year, has_code yields "true"/"false"). Not case-folded.
std::vector<std::string> record_values(const PaperRecord& record, Dimension dim);

class FacetIndex {
public:
    FacetIndex() = default;
    static FacetIndex build(const CorpusSnapshot& snapshot);

    const std::vector<std::string>& ids() const noexcept { return ids_; }
    DocSet universe() const;
    int year(DocId doc) const { return years_.at(doc); }

    /// Posting list for a value; empty when the value never occurs.
    const DocSet& postings(Dimension dim, std::string_view value) const;
    /// Display spelling of a folded value (first occurrence in id order).
    const std::string& display_value(Dimension dim, const std::string& folded) const;
    /// All (folded value, postings) pairs of a dimension.
    std::vector<std::pair<std::string, const DocSet*>> values(Dimension dim) const;

    bool operator==(const FacetIndex&) const = default;

private:
    using Key = std::pair<Dimension, std::string>;
    std::vector<std::string> ids_;
    std::vector<int> years_;
    std::map<Key, DocSet> postings_;
    std::map<Key, std::string> display_;
};

/// Evaluates OR-within / AND-across filter semantics. Result is sorted.
DocSet eval_filters(const FacetIndex& index, const FacetFilters& filters);

/// Lowercases ASCII and splits on anything that is not [0-9A-Za-z]. Bytes
/// >= 0x80 are kept inside tokens so UTF-8 words stay whole.
std::vector<std::string> tokenize(std::string_view text);
/// Tokenized query as a term set, in order of first appearance.
std::vector<std::string> query_terms(std::string_view text);

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

/// ln(1 + (N - df + 0.5) / (df + 0.5))
double bm25_idf(std::size_t doc_count, std::size_t df);

class TextIndex {
public:
    struct Posting {
        DocId doc;
        std::uint32_t tf;
        bool operator==(const Posting&) const = default;
    };

    TextIndex() = default;
    /// Indexes title, abstract and indicative-summary text of each record.
    static TextIndex build(const CorpusSnapshot& snapshot);
    /// Indexes raw documents; ordinal i is documents[i].
    static TextIndex from_documents(std::span<const std::string> documents);

    std::size_t doc_count() const noexcept { return lengths_.size(); }
    double avg_length() const noexcept { return avg_length_; }
    std::uint32_t doc_length(DocId doc) const { return lengths_.at(doc); }
    std::size_t df(std::string_view term) const;
    std::uint32_t tf(std::string_view term, DocId doc) const;
    const std::vector<Posting>* postings(std::string_view term) const;
    std::size_t term_count() const noexcept { return terms_.size(); }

    /// BM25 score of a document for a term set. Duplicate terms count once;
    /// terms absent from the corpus contribute nothing.
    double score(DocId doc, std::span<const std::string> terms, const Bm25Params& params = {}) const;

    bool operator==(const TextIndex&) const = default;

private:
    std::map<std::string, std::vector<Posting>, std::less<>> terms_;
    std::vector<std::uint32_t> lengths_;
    double avg_length_ = 0.0;
};

/// Text fed to the text index for a record.
std::string searchable_text(const PaperRecord& record);

struct IndexBundle {
    FacetIndex facets;
    TextIndex text;

    bool operator==(const IndexBundle&) const = default;
};

IndexBundle build_indexes(const CorpusSnapshot& snapshot);

/// BM25 score for a document id; 0 for unknown ids.
double score_keyword(const IndexBundle& indexes, std::string_view doc_id,
                     std::span<const std::string> terms, const Bm25Params& params = {});

enum class SortOrder { relevance, year_desc, year_asc };
std::string_view to_string(SortOrder order);

inline constexpr int kMaxPageSize = 100;

struct Query {
    FacetFilters filters;
    std::optional<std::string> keywords;
    int page = 1;
    int page_size = 20;
    SortOrder sort = SortOrder::relevance;

    bool operator==(const Query&) const = default;
};

struct Hit {
    std::string id;
    double score = 0.0;
    bool operator==(const Hit&) const = default;
};

using Aggregations = std::map<std::string, std::map<std::string, std::size_t>>;

struct ResultPage {
    std::vector<Hit> hits;
    std::size_t total = 0;
    int page = 1;
    int page_size = 20;
    Aggregations aggregations;
};

/// Filters, restricts to documents containing a query term when keywords
/// are given, orders, and paginates. Aggregations cover the whole
/// filtered set. Throws bad_page.
ResultPage search(const IndexBundle& indexes, const Query& query);

/// Value counts per dimension over a document set.
Aggregations aggregate(const FacetIndex& index, const DocSet& docs);

/// Canonical JSON. Parsing throws unknown_dimension, bad_page or bad_query.
Query query_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Query& query);
nlohmann::json to_json(const ResultPage& page);

} // namespace litfacet
