#include "litfacet/search.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "litfacet/error.hpp"

namespace litfacet {

using nlohmann::json;

const std::vector<Dimension>& all_dimensions() {
    static const std::vector<Dimension> dims = {
        Dimension::facet_tags,   Dimension::paper_types, Dimension::learning_paradigms,
        Dimension::venue,        Dimension::year_range,  Dimension::domains,
        Dimension::datasets,     Dimension::auto_metrics, Dimension::human_criteria,
        Dimension::challenges,   Dimension::has_code,
    };
    return dims;
}

std::string_view to_string(Dimension dim) {
    switch (dim) {
    case Dimension::facet_tags: return "facet_tags";
    case Dimension::paper_types: return "paper_types";
    case Dimension::learning_paradigms: return "learning_paradigms";
    case Dimension::venue: return "venue";
    case Dimension::year_range: return "year_range";
    case Dimension::domains: return "domains";
    case Dimension::datasets: return "datasets";
    case Dimension::auto_metrics: return "auto_metrics";
    case Dimension::human_criteria: return "human_criteria";
    case Dimension::challenges: return "challenges";
    case Dimension::has_code: return "has_code";
    }
    return "unknown";
}

std::string_view aggregation_key(Dimension dim) {
    return dim == Dimension::year_range ? "year" : to_string(dim);
}

Dimension parse_dimension(std::string_view name) {
    for (auto d : all_dimensions()) {
        if (to_string(d) == name) {
            return d;
        }
    }
    throw Error(ErrorCode::unknown_dimension, std::string(name));
}

std::vector<std::string> record_values(const PaperRecord& r, Dimension dim) {
    auto list = [](const std::set<std::string>& s) { return std::vector<std::string>(s.begin(), s.end()); };
    switch (dim) {
    case Dimension::facet_tags: return list(r.facet_tags);
    case Dimension::paper_types: return list(r.paper_types);
    case Dimension::learning_paradigms: return list(r.learning_paradigms);
    case Dimension::venue: return {r.venue};
    case Dimension::year_range: return {std::to_string(r.year)};
    case Dimension::domains: return list(r.domains);
    case Dimension::datasets: return list(r.datasets);
    case Dimension::auto_metrics: return list(r.auto_metrics);
    case Dimension::human_criteria: return list(r.human_criteria);
    case Dimension::challenges: return list(r.challenges);
    case Dimension::has_code: return {r.has_code ? "true" : "false"};
    }
    return {};
}

// ---------------------------------------------------------------------------
// FacetIndex

FacetIndex FacetIndex::build(const CorpusSnapshot& snapshot) {
    FacetIndex index;
    index.ids_.reserve(snapshot.size());
    DocId doc = 0;
    for (const auto& [id, record] : snapshot.records) {
        index.ids_.push_back(id);
        index.years_.push_back(record.year);
        for (auto dim : all_dimensions()) {
            for (const auto& value : record_values(record, dim)) {
                Key key{dim, fold_case(value)};
                auto& list = index.postings_[key];
                // A record can carry two spellings that fold together.
                if (list.empty() || list.back() != doc) {
                    list.push_back(doc);
                }
                index.display_.try_emplace(key, value);
            }
        }
        ++doc;
    }
    return index;
}

DocSet FacetIndex::universe() const {
    DocSet all(ids_.size());
    for (DocId i = 0; i < all.size(); ++i) {
        all[i] = i;
    }
    return all;
}

const DocSet& FacetIndex::postings(Dimension dim, std::string_view value) const {
    static const DocSet empty;
    auto it = postings_.find(Key{dim, fold_case(value)});
    return it == postings_.end() ? empty : it->second;
}

const std::string& FacetIndex::display_value(Dimension dim, const std::string& folded) const {
    auto it = display_.find(Key{dim, folded});
    return it == display_.end() ? folded : it->second;
}

std::vector<std::pair<std::string, const DocSet*>> FacetIndex::values(Dimension dim) const {
    std::vector<std::pair<std::string, const DocSet*>> out;
    auto lo = postings_.lower_bound(Key{dim, std::string()});
    for (auto it = lo; it != postings_.end() && it->first.first == dim; ++it) {
        out.emplace_back(it->first.second, &it->second);
    }
    return out;
}

namespace {

DocSet unite(const DocSet& a, const DocSet& b) {
    DocSet out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

DocSet intersect(const DocSet& a, const DocSet& b) {
    DocSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::size_t intersection_size(const DocSet& a, const DocSet& b) {
    std::size_t n = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++n;
            ++i;
            ++j;
        }
    }
    return n;
}

} // namespace

DocSet eval_filters(const FacetIndex& index, const FacetFilters& filters) {
    DocSet result = index.universe();
    for (const auto& [dim, accepted] : filters.values) {
        DocSet matched;
        for (const auto& value : accepted) {
            matched = unite(matched, index.postings(dim, value));
        }
        result = intersect(result, matched);
    }
    if (filters.years) {
        DocSet matched;
        for (const auto& [value, docs] : index.values(Dimension::year_range)) {
            int year = std::stoi(value);
            if (year >= filters.years->from && year <= filters.years->to) {
                matched = unite(matched, *docs);
            }
        }
        result = intersect(result, matched);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Text

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string current;
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        bool word = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
        if (word) {
            current.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch);
        } else if (!current.empty()) {
            out.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        out.push_back(std::move(current));
    }
    return out;
}

std::vector<std::string> query_terms(std::string_view text) {
    std::vector<std::string> out;
    for (auto& t : tokenize(text)) {
        if (std::find(out.begin(), out.end(), t) == out.end()) {
            out.push_back(std::move(t));
        }
    }
    return out;
}

double bm25_idf(std::size_t doc_count, std::size_t df) {
    auto n = static_cast<double>(doc_count);
    auto d = static_cast<double>(df);
    return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

std::string searchable_text(const PaperRecord& r) {
    std::string text = r.title + "\n" + r.abstract;
    if (r.indicative_summary) {
        const auto& s = *r.indicative_summary;
        text += "\n" + s.purpose + "\n" + s.audience + "\n" + s.application;
        for (const auto& ps : s.problems_solutions) {
            text += "\n" + ps.problem + "\n" + ps.solution;
        }
        if (s.intro_summary) {
            text += "\n" + *s.intro_summary;
        }
    }
    return text;
}

TextIndex TextIndex::from_documents(std::span<const std::string> documents) {
    TextIndex index;
    index.lengths_.reserve(documents.size());
    std::uint64_t total = 0;
    for (DocId doc = 0; doc < documents.size(); ++doc) {
        auto tokens = tokenize(documents[doc]);
        index.lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
        total += tokens.size();
        std::map<std::string, std::uint32_t> counts;
        for (auto& t : tokens) {
            ++counts[std::move(t)];
        }
        for (auto& [term, tf] : counts) {
            index.terms_[term].push_back({doc, tf});
        }
    }
    if (!documents.empty()) {
        index.avg_length_ = static_cast<double>(total) / static_cast<double>(documents.size());
    }
    return index;
}

TextIndex TextIndex::build(const CorpusSnapshot& snapshot) {
    std::vector<std::string> docs;
    docs.reserve(snapshot.size());
    for (const auto& [id, record] : snapshot.records) {
        docs.push_back(searchable_text(record));
    }
    return from_documents(docs);
}

const std::vector<TextIndex::Posting>* TextIndex::postings(std::string_view term) const {
    auto it = terms_.find(term);
    return it == terms_.end() ? nullptr : &it->second;
}

std::size_t TextIndex::df(std::string_view term) const {
    const auto* list = postings(term);
    return list ? list->size() : 0;
}

std::uint32_t TextIndex::tf(std::string_view term, DocId doc) const {
    const auto* list = postings(term);
    if (!list) {
        return 0;
    }
    auto it = std::lower_bound(list->begin(), list->end(), doc,
                               [](const Posting& p, DocId d) { return p.doc < d; });
    return (it != list->end() && it->doc == doc) ? it->tf : 0;
}

double TextIndex::score(DocId doc, std::span<const std::string> terms, const Bm25Params& params) const {
    if (doc >= lengths_.size() || avg_length_ <= 0.0) {
        return 0.0;
    }
    const double norm = 1.0 - params.b + params.b * static_cast<double>(lengths_[doc]) / avg_length_;
    double total = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (std::find(terms.begin(), terms.begin() + static_cast<std::ptrdiff_t>(i), terms[i]) !=
            terms.begin() + static_cast<std::ptrdiff_t>(i)) {
            continue;
        }
        auto f = static_cast<double>(tf(terms[i], doc));
        if (f == 0.0) {
            continue;
        }
        total += bm25_idf(doc_count(), df(terms[i])) * f * (params.k1 + 1.0) / (f + params.k1 * norm);
    }
    return total;
}

// ---------------------------------------------------------------------------
// Search

IndexBundle build_indexes(const CorpusSnapshot& snapshot) {
    return {FacetIndex::build(snapshot), TextIndex::build(snapshot)};
}

double score_keyword(const IndexBundle& indexes, std::string_view doc_id,
                     std::span<const std::string> terms, const Bm25Params& params) {
    const auto& ids = indexes.facets.ids();
    auto it = std::lower_bound(ids.begin(), ids.end(), doc_id);
    if (it == ids.end() || *it != doc_id) {
        return 0.0;
    }
    return indexes.text.score(static_cast<DocId>(it - ids.begin()), terms, params);
}

std::string_view to_string(SortOrder order) {
    switch (order) {
    case SortOrder::relevance: return "relevance";
    case SortOrder::year_desc: return "year_desc";
    case SortOrder::year_asc: return "year_asc";
    }
    return "relevance";
}

Aggregations aggregate(const FacetIndex& index, const DocSet& docs) {
    Aggregations out;
    for (auto dim : all_dimensions()) {
        auto& counts = out[std::string(aggregation_key(dim))];
        for (const auto& [folded, postings] : index.values(dim)) {
            auto n = intersection_size(docs, *postings);
            if (n > 0) {
                counts[index.display_value(dim, folded)] += n;
            }
        }
    }
    return out;
}

ResultPage search(const IndexBundle& indexes, const Query& query) {
    if (query.page < 1 || query.page_size < 1 || query.page_size > kMaxPageSize) {
        throw Error(ErrorCode::bad_page, "page must be >= 1 and page_size in [1, " +
                                             std::to_string(kMaxPageSize) + "]");
    }
    DocSet docs = eval_filters(indexes.facets, query.filters);

    std::vector<std::string> terms;
    if (query.keywords) {
        terms = query_terms(*query.keywords);
    }
    if (!terms.empty()) {
        DocSet matching;
        for (const auto& t : terms) {
            if (const auto* list = indexes.text.postings(t)) {
                DocSet ds;
                ds.reserve(list->size());
                for (const auto& p : *list) {
                    ds.push_back(p.doc);
                }
                matching = unite(matching, ds);
            }
        }
        docs = intersect(docs, matching);
    }

    struct Ranked {
        DocId doc;
        double score;
    };
    std::vector<Ranked> ranked;
    ranked.reserve(docs.size());
    for (auto d : docs) {
        ranked.push_back({d, terms.empty() ? 0.0 : indexes.text.score(d, terms)});
    }
    const auto& fi = indexes.facets;
    auto by_year_desc = [&](const Ranked& a, const Ranked& b) {
        if (fi.year(a.doc) != fi.year(b.doc)) {
            return fi.year(a.doc) > fi.year(b.doc);
        }
        return a.doc < b.doc;
    };
    switch (query.sort) {
    case SortOrder::relevance:
        std::sort(ranked.begin(), ranked.end(), [&](const Ranked& a, const Ranked& b) {
            if (a.score != b.score) {
                return a.score > b.score;
            }
            return by_year_desc(a, b);
        });
        break;
    case SortOrder::year_desc:
        std::sort(ranked.begin(), ranked.end(), by_year_desc);
        break;
    case SortOrder::year_asc:
        std::sort(ranked.begin(), ranked.end(), [&](const Ranked& a, const Ranked& b) {
            if (fi.year(a.doc) != fi.year(b.doc)) {
                return fi.year(a.doc) < fi.year(b.doc);
            }
            return a.doc < b.doc;
        });
        break;
    }

    ResultPage page;
    page.total = ranked.size();
    page.page = query.page;
    page.page_size = query.page_size;
    auto begin = static_cast<std::size_t>(query.page - 1) * static_cast<std::size_t>(query.page_size);
    for (auto i = begin; i < ranked.size() && i < begin + static_cast<std::size_t>(query.page_size); ++i) {
        page.hits.push_back({fi.ids()[ranked[i].doc], ranked[i].score});
    }
    page.aggregations = aggregate(fi, docs);
    return page;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

[[noreturn]] void bad_query(const std::string& what) { throw Error(ErrorCode::bad_query, what); }

int page_number(const json& j, const char* key, int fallback) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return fallback;
    }
    if (!it->is_number_integer()) {
        throw Error(ErrorCode::bad_page, std::string(key) + " must be an integer");
    }
    auto v = it->get<long long>();
    if (v < 1 || v > 1'000'000'000) {
        throw Error(ErrorCode::bad_page, std::string(key) + " out of range");
    }
    return static_cast<int>(v);
}

} // namespace

Query query_from_json(const json& j) {
    if (j.is_null()) {
        return {};
    }
    if (!j.is_object()) {
        bad_query("query must be a JSON object");
    }
    for (const auto& [key, _] : j.items()) {
        if (key != "filters" && key != "keywords" && key != "page" && key != "page_size" && key != "sort") {
            bad_query("unknown query field '" + key + "'");
        }
    }
    Query q;
    if (auto it = j.find("filters"); it != j.end() && !it->is_null()) {
        if (!it->is_object()) {
            bad_query("filters must be an object");
        }
        for (const auto& [name, accepted] : it->items()) {
            auto dim = parse_dimension(name);
            if (dim == Dimension::year_range) {
                if (!accepted.is_array() || accepted.size() != 2 || !accepted[0].is_number_integer() ||
                    !accepted[1].is_number_integer()) {
                    bad_query("year_range must be [from, to]");
                }
                YearRange range{accepted[0].get<int>(), accepted[1].get<int>()};
                if (range.from > range.to) {
                    bad_query("year_range must be ordered");
                }
                q.filters.years = range;
                continue;
            }
            if (!accepted.is_array()) {
                bad_query("filter '" + name + "' must be an array");
            }
            auto& set = q.filters.values[dim];
            for (const auto& v : accepted) {
                if (v.is_string()) {
                    set.insert(v.get<std::string>());
                } else if (dim == Dimension::has_code && v.is_boolean()) {
                    set.insert(v.get<bool>() ? "true" : "false");
                } else {
                    bad_query("filter '" + name + "' values must be strings");
                }
            }
        }
    }
    if (auto it = j.find("keywords"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) {
            bad_query("keywords must be a string");
        }
        q.keywords = it->get<std::string>();
    }
    q.page = page_number(j, "page", 1);
    q.page_size = page_number(j, "page_size", 20);
    if (q.page_size > kMaxPageSize) {
        throw Error(ErrorCode::bad_page, "page_size must be <= " + std::to_string(kMaxPageSize));
    }
    if (auto it = j.find("sort"); it != j.end() && !it->is_null()) {
        auto s = it->is_string() ? it->get<std::string>() : std::string();
        if (s == "relevance") {
            q.sort = SortOrder::relevance;
        } else if (s == "year_desc") {
            q.sort = SortOrder::year_desc;
        } else if (s == "year_asc") {
            q.sort = SortOrder::year_asc;
        } else {
            bad_query("sort must be relevance, year_desc or year_asc");
        }
    }
    return q;
}

json to_json(const Query& q) {
    json filters = json::object();
    for (const auto& [dim, values] : q.filters.values) {
        filters[std::string(to_string(dim))] = values;
    }
    if (q.filters.years) {
        filters["year_range"] = {q.filters.years->from, q.filters.years->to};
    }
    json out = {{"filters", filters}, {"page", q.page}, {"page_size", q.page_size}, {"sort", to_string(q.sort)}};
    if (q.keywords) {
        out["keywords"] = *q.keywords;
    }
    return out;
}

json to_json(const ResultPage& p) {
    json hits = json::array();
    for (const auto& h : p.hits) {
        hits.push_back({{"id", h.id}, {"score", h.score}});
    }
    return {{"hits", hits},
            {"total", p.total},
            {"page", p.page},
            {"page_size", p.page_size},
            {"aggregations", p.aggregations}};
}

} // namespace litfacet
