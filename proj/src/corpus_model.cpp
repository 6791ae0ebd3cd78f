#include "litfacet/corpus_model.hpp"

#include <algorithm>
#include <cctype>

#include "litfacet/error.hpp"

namespace litfacet {

using nlohmann::json;

std::string_view to_string(FacetGroup group) {
    switch (group) {
    case FacetGroup::document_representation: return "document_representation";
    case FacetGroup::model_training: return "model_training";
    case FacetGroup::summary_generation: return "summary_generation";
    case FacetGroup::evaluation: return "evaluation";
    case FacetGroup::metadata: return "metadata";
    }
    return "unknown";
}

std::string_view to_string(FacetKind kind) {
    return kind == FacetKind::boolean_tag ? "boolean_tag" : "valued";
}

std::string_view to_string(TermKind kind) {
    return kind == TermKind::glossary ? "glossary" : "acronym";
}

const std::vector<FacetDescriptor>& taxonomy() {
    using G = FacetGroup;
    using K = FacetKind;
    static const std::vector<FacetDescriptor> facets = {
        {"input_encoding", G::document_representation, K::boolean_tag, "Input encoding",
         "The paper presents methods to improve the encoding of source documents (e.g., "
         "hierarchical/graphical attention, inclusion of discourse structure, etc.)"},
        {"unit_relationship", G::document_representation, K::boolean_tag, "Unit relationship",
         "The paper investigates methods that explicitly model the relationship between units in "
         "the source document, such as words, sentences, or passages."},
        {"data_augmentation", G::document_representation, K::boolean_tag, "Data augmentation",
         "The paper introduces methods that use data augmentation techniques, e.g., to extract "
         "aspects, to create contrasting examples of robustness, or to overcome data scarcity in "
         "low-resource domains."},
        {"external_knowledge", G::document_representation, K::boolean_tag, "External knowledge",
         "The paper investigates methods for integrating external knowledge using resources such "
         "as knowledge graphs, domain-specific vocabularies, or information from pre-trained "
         "language models."},
        {"learning_paradigm", G::model_training, K::boolean_tag, "Learning Paradigm",
         "Supervised, unsupervised, or reinforcement learning."},
        {"objective_function", G::model_training, K::boolean_tag, "Objective Function",
         "The paper introduces methods that incorporate new objective functions that emphasize "
         "diversity, faithfulness, or custom objectives appropriate to the task of summarization."},
        {"auxiliary_tasks", G::model_training, K::boolean_tag, "Auxiliary Tasks",
         "The paper explores methods such as multi-task learning or pre-training on related tasks "
         "(e.g., textual entailment, paraphrasing, gap sentence prediction) to improve the "
         "summarization task."},
        {"unit_selection", G::summary_generation, K::boolean_tag, "Unit Selection",
         "The paper presents methods that explicitly select relevant units, such as words, "
         "sentences, or passages, for summarization, addressing the information loss associated "
         "with generating fixed-length summaries through techniques such as copying or pointing."},
        {"controlled_generation", G::summary_generation, K::boolean_tag, "Controlled Generation",
         "The paper presents methods that encourage the model to generate summaries with certain "
         "attributes (e.g., style, length, tone), for example, by providing additional textual "
         "guidance or limiting the model's vocabulary to a specific domain."},
        {"post_processing", G::summary_generation, K::boolean_tag, "Post Processing",
         "The paper explores methods for post-processing generated summaries to improve their "
         "quality. This includes re-ranking, re-writing or swapping certain text spans to achieve "
         "the desired goals."},
        {"domain", G::evaluation, K::valued, "Domain",
         "The domain of the source documents (e.g., opinions, screenplays, papers, etc.)"},
        {"dataset", G::evaluation, K::valued, "Dataset",
         "The datasets used for training/evaluation (e.g., CNN/DailyMail, XSum, etc.)"},
        {"evaluation_metric", G::evaluation, K::valued, "Evaluation metric",
         "The metrics used for automatic evaluation (e.g., ROUGE, BLEU, etc.)"},
        {"human_evaluation", G::evaluation, K::valued, "Human evaluation",
         "The summary quality criteria that were evaluated manually (e.g., informativeness, "
         "fluency, etc.)"},
        {"paper_type", G::metadata, K::valued, "Paper type",
         "A new method, analysis (evaluation), metric, dataset, or theory."},
        {"venue_year", G::metadata, K::valued, "Venue / Year",
         "Venue and year in which the work was published."},
        {"code_resources", G::metadata, K::valued, "Code / Resources",
         "Artifacts relevant to reproduce the paper's contribution."},
    };
    return facets;
}

const FacetDescriptor* find_facet(std::string_view key) {
    const auto& facets = taxonomy();
    auto it = std::find_if(facets.begin(), facets.end(),
                           [&](const FacetDescriptor& f) { return f.key == key; });
    return it == facets.end() ? nullptr : &*it;
}

const std::vector<std::string>& boolean_tag_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& f : taxonomy()) {
            if (f.kind == FacetKind::boolean_tag) {
                out.push_back(f.key);
            }
        }
        return out;
    }();
    return keys;
}

bool is_boolean_tag(std::string_view key) {
    const auto& keys = boolean_tag_keys();
    return std::find(keys.begin(), keys.end(), key) != keys.end();
}

const std::vector<std::string>& paper_type_values() {
    static const std::vector<std::string> v = {"method", "analysis", "metric", "dataset", "theory"};
    return v;
}

const std::vector<std::string>& learning_paradigm_values() {
    static const std::vector<std::string> v = {"supervised", "unsupervised", "reinforcement"};
    return v;
}

const std::vector<std::string>& known_venues() {
    static const std::vector<std::string> v = {
        "AAAI", "AACL",  "ACL",  "CHIIR",  "CIKM",    "COLING", "CONLL", "EACL", "ECIR",
        "EMNLP", "ICLR", "IJCAI", "IJCNLP", "NAACL", "NEURIPS", "SIGIR", "TACL",
    };
    return v;
}

std::string fold_case(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool looks_like_acronym(std::string_view term) {
    return std::count_if(term.begin(), term.end(),
                         [](unsigned char c) { return std::isupper(c) != 0; }) >= 2;
}

namespace {

bool blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

bool listed(const std::vector<std::string>& values, const std::string& v) {
    return std::find(values.begin(), values.end(), v) != values.end();
}

void check_closed_set(std::vector<Violation>& out, const std::string& field,
                      const std::set<std::string>& values, const std::vector<std::string>& allowed,
                      const std::string& rule) {
    for (const auto& v : values) {
        if (!listed(allowed, v)) {
            out.push_back({field, rule, v});
        }
    }
}

void check_open_set(std::vector<Violation>& out, const std::string& field,
                    const std::set<std::string>& values) {
    for (const auto& v : values) {
        if (blank(v)) {
            out.push_back({field, "blank-value", ""});
        }
    }
}

} // namespace

std::vector<Violation> validate_record(const PaperRecord& r) {
    std::vector<Violation> out;
    if (blank(r.id)) {
        out.push_back({"id", "nonempty", ""});
    }
    if (r.year < kMinYear || r.year > kMaxYear) {
        out.push_back({"year", "range", std::to_string(r.year)});
    }
    if (r.paper_types.empty()) {
        out.push_back({"paper_types", "nonempty", ""});
    }
    check_closed_set(out, "paper_types", r.paper_types, paper_type_values(), "unknown-paper-type");
    check_closed_set(out, "facet_tags", r.facet_tags, boolean_tag_keys(), "not-a-boolean-tag");
    check_closed_set(out, "learning_paradigms", r.learning_paradigms, learning_paradigm_values(),
                     "unknown-paradigm");
    check_open_set(out, "domains", r.domains);
    check_open_set(out, "datasets", r.datasets);
    check_open_set(out, "auto_metrics", r.auto_metrics);
    check_open_set(out, "human_criteria", r.human_criteria);
    check_open_set(out, "challenges", r.challenges);

    if (r.indicative_summary) {
        const auto& ps = r.indicative_summary->problems_solutions;
        for (std::size_t i = 0; i < ps.size(); ++i) {
            if (blank(ps[i].problem) || blank(ps[i].solution)) {
                out.push_back({"indicative_summary.problems_solutions", "nonempty-pair",
                               std::to_string(i)});
            }
        }
    }
    for (std::size_t i = 0; i < r.terminology.size(); ++i) {
        const auto& t = r.terminology[i];
        if (blank(t.term) || blank(t.definition)) {
            out.push_back({"terminology", "nonempty-term", std::to_string(i)});
        } else if (t.kind == TermKind::acronym && !looks_like_acronym(t.term)) {
            out.push_back({"terminology", "acronym-uppercase", t.term});
        }
    }
    return out;
}

std::vector<std::string> record_warnings(const PaperRecord& r) {
    std::vector<std::string> out;
    const auto& venues = known_venues();
    const auto folded = fold_case(r.venue);
    bool known = std::any_of(venues.begin(), venues.end(),
                             [&](const std::string& v) { return fold_case(v) == folded; });
    if (!known) {
        out.push_back("record " + r.id + ": venue '" + r.venue + "' is not a known venue");
    }
    if (r.has_code && !r.code_url) {
        out.push_back("record " + r.id + ": has_code set without code_url");
    }
    return out;
}

ChallengeVocabulary::ChallengeVocabulary(std::vector<std::string> labels) {
    for (auto& l : labels) {
        if (!listed(labels_, l)) {
            labels_.push_back(std::move(l));
        }
    }
}

bool ChallengeVocabulary::contains(std::string_view label) const {
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

ChallengeVocabulary ChallengeVocabulary::extended(std::string label) const {
    auto labels = labels_;
    labels.push_back(std::move(label));
    return ChallengeVocabulary(std::move(labels));
}

ChallengeVocabulary default_challenges() {
    return ChallengeVocabulary({
        "Controlled and Tailored Summarization",
        "Efficient Encoding of Long Documents",
        "Exploiting the Structure of Long Documents",
        "Hallucinations in the Generated Summaries",
        "Identifying Important Contents from the Document",
        "Information Loss / Incoherence in Extractive Summarization",
        "Lack of Suitable Training Data",
        "Pretraining and Sample Efficiency",
        "Robust Evaluation Methods",
    });
}

// ---------------------------------------------------------------------------
// JSON

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::parse_error, what); }

const json& require(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) {
        bad(std::string("missing field '") + key + "'");
    }
    return *it;
}

std::string as_string(const json& v, const char* key) {
    if (!v.is_string()) {
        bad(std::string("field '") + key + "' must be a string");
    }
    return v.get<std::string>();
}

std::optional<std::string> opt_string(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return std::nullopt;
    }
    return as_string(*it, key);
}

std::string string_or_empty(const json& j, const char* key) {
    return opt_string(j, key).value_or("");
}

std::set<std::string> string_set(const json& j, const char* key) {
    std::set<std::string> out;
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return out;
    }
    if (!it->is_array()) {
        bad(std::string("field '") + key + "' must be an array of strings");
    }
    for (const auto& v : *it) {
        out.insert(as_string(v, key));
    }
    return out;
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed, const char* what) {
    if (!j.is_object()) {
        bad(std::string(what) + " must be a JSON object");
    }
    for (const auto& [key, _] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            bad(std::string("unknown field '") + key + "' in " + what);
        }
    }
}

} // namespace

json to_json(const TermEntry& t) {
    return {{"kind", to_string(t.kind)}, {"term", t.term}, {"definition", t.definition}};
}

TermEntry term_from_json(const json& j) {
    reject_unknown(j, {"kind", "term", "definition"}, "term entry");
    TermEntry t;
    auto kind = as_string(require(j, "kind"), "kind");
    if (kind == "glossary") {
        t.kind = TermKind::glossary;
    } else if (kind == "acronym") {
        t.kind = TermKind::acronym;
    } else {
        bad("term kind must be 'glossary' or 'acronym', got '" + kind + "'");
    }
    t.term = as_string(require(j, "term"), "term");
    t.definition = as_string(require(j, "definition"), "definition");
    return t;
}

json to_json(const IndicativeSummary& s) {
    json ps = json::array();
    for (const auto& p : s.problems_solutions) {
        ps.push_back({{"problem", p.problem}, {"solution", p.solution}});
    }
    json out = {{"purpose", s.purpose},
                {"audience", s.audience},
                {"application", s.application},
                {"problems_solutions", ps}};
    if (s.intro_summary) {
        out["intro_summary"] = *s.intro_summary;
    }
    return out;
}

IndicativeSummary summary_from_json(const json& j) {
    reject_unknown(j, {"purpose", "audience", "application", "problems_solutions", "intro_summary"},
                   "indicative_summary");
    IndicativeSummary s;
    s.purpose = string_or_empty(j, "purpose");
    s.audience = string_or_empty(j, "audience");
    s.application = string_or_empty(j, "application");
    s.intro_summary = opt_string(j, "intro_summary");
    if (auto it = j.find("problems_solutions"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) {
            bad("problems_solutions must be an array");
        }
        for (const auto& p : *it) {
            reject_unknown(p, {"problem", "solution"}, "problem/solution pair");
            s.problems_solutions.push_back({as_string(require(p, "problem"), "problem"),
                                            as_string(require(p, "solution"), "solution")});
        }
    }
    return s;
}

json to_json(const PaperRecord& r) {
    json out = {
        {"id", r.id},
        {"title", r.title},
        {"abstract", r.abstract},
        {"venue", r.venue},
        {"year", r.year},
        {"paper_types", r.paper_types},
        {"facet_tags", r.facet_tags},
        {"learning_paradigms", r.learning_paradigms},
        {"domains", r.domains},
        {"datasets", r.datasets},
        {"auto_metrics", r.auto_metrics},
        {"human_criteria", r.human_criteria},
        {"has_code", r.has_code},
        {"challenges", r.challenges},
    };
    if (r.introduction) {
        out["introduction"] = *r.introduction;
    }
    if (r.code_url) {
        out["code_url"] = *r.code_url;
    }
    if (r.indicative_summary) {
        out["indicative_summary"] = to_json(*r.indicative_summary);
    }
    json terms = json::array();
    for (const auto& t : r.terminology) {
        terms.push_back(to_json(t));
    }
    out["terminology"] = terms;
    return out;
}

PaperRecord record_from_json(const json& j) {
    reject_unknown(j,
                   {"id", "title", "abstract", "introduction", "venue", "year", "paper_types",
                    "facet_tags", "learning_paradigms", "domains", "datasets", "auto_metrics",
                    "human_criteria", "has_code", "code_url", "challenges", "indicative_summary",
                    "terminology"},
                   "paper record");
    PaperRecord r;
    r.id = as_string(require(j, "id"), "id");
    r.title = as_string(require(j, "title"), "title");
    r.abstract = string_or_empty(j, "abstract");
    r.introduction = opt_string(j, "introduction");
    r.venue = as_string(require(j, "venue"), "venue");
    const auto& year = require(j, "year");
    if (!year.is_number_integer()) {
        bad("field 'year' must be an integer");
    }
    r.year = year.get<int>();
    r.paper_types = string_set(j, "paper_types");
    r.facet_tags = string_set(j, "facet_tags");
    r.learning_paradigms = string_set(j, "learning_paradigms");
    r.domains = string_set(j, "domains");
    r.datasets = string_set(j, "datasets");
    r.auto_metrics = string_set(j, "auto_metrics");
    r.human_criteria = string_set(j, "human_criteria");
    if (auto it = j.find("has_code"); it != j.end() && !it->is_null()) {
        if (!it->is_boolean()) {
            bad("field 'has_code' must be a boolean");
        }
        r.has_code = it->get<bool>();
    }
    r.code_url = opt_string(j, "code_url");
    r.challenges = string_set(j, "challenges");
    if (auto it = j.find("indicative_summary"); it != j.end() && !it->is_null()) {
        r.indicative_summary = summary_from_json(*it);
    }
    if (auto it = j.find("terminology"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) {
            bad("terminology must be an array");
        }
        for (const auto& t : *it) {
            r.terminology.push_back(term_from_json(t));
        }
    }
    return r;
}

json to_json(const FacetDescriptor& f) {
    return {{"key", f.key},
            {"group", to_string(f.group)},
            {"kind", to_string(f.kind)},
            {"label", f.label},
            {"description", f.description}};
}

json to_json(const Violation& v) {
    return {{"field", v.field}, {"rule", v.rule}, {"detail", v.detail}};
}

} // namespace litfacet
