#include <doctest.h>

#include <fstream>
#include <map>

#include "litfacet/corpus_model.hpp"
#include "litfacet/error.hpp"
#include "test_support.hpp"

using namespace litfacet;

namespace {

struct ReferenceFacet {
    std::string group, label, description;
};

std::vector<ReferenceFacet> reference_taxonomy() {
    std::ifstream in(testsupport::fixture("reference/taxonomy.tsv"));
    std::vector<ReferenceFacet> out;
    std::string line;
    while (std::getline(in, line)) {
        auto a = line.find('\t');
        auto b = line.find('\t', a + 1);
        out.push_back({line.substr(0, a), line.substr(a + 1, b - a - 1), line.substr(b + 1)});
    }
    return out;
}

std::string group_title(FacetGroup g) {
    switch (g) {
    case FacetGroup::document_representation: return "Document representation";
    case FacetGroup::model_training: return "Model training";
    case FacetGroup::summary_generation: return "Summary generation";
    case FacetGroup::evaluation: return "Evaluation";
    case FacetGroup::metadata: return "Metadata";
    }
    return "";
}

PaperRecord valid_record() {
    PaperRecord r;
    r.id = "p1";
    r.title = "A title";
    r.venue = "ACL";
    r.year = 2020;
    r.paper_types = {"method"};
    r.facet_tags = {"input_encoding"};
    r.learning_paradigms = {"supervised"};
    r.domains = {"news"};
    return r;
}

bool has_rule(const std::vector<Violation>& v, const std::string& field, const std::string& rule) {
    return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.field == field && x.rule == rule; });
}

} // namespace

TEST_CASE("taxonomy has 17 facets grouped 4/3/3/4/3") {
    const auto& t = taxonomy();
    REQUIRE(t.size() == 17);
    std::map<FacetGroup, int> sizes;
    for (const auto& f : t) {
        ++sizes[f.group];
    }
    CHECK(sizes[FacetGroup::document_representation] == 4);
    CHECK(sizes[FacetGroup::model_training] == 3);
    CHECK(sizes[FacetGroup::summary_generation] == 3);
    CHECK(sizes[FacetGroup::evaluation] == 4);
    CHECK(sizes[FacetGroup::metadata] == 3);
}

TEST_CASE("taxonomy labels and descriptions match the reference transcription") {
    auto ref = reference_taxonomy();
    const auto& t = taxonomy();
    REQUIRE(ref.size() == t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        CAPTURE(t[i].key);
        CHECK(group_title(t[i].group) == ref[i].group);
        CHECK(t[i].label == ref[i].label);
        CHECK(t[i].description == ref[i].description);
    }
}

TEST_CASE("boolean tags are the ten method facets") {
    CHECK(boolean_tag_keys().size() == 10);
    CHECK(is_boolean_tag("input_encoding"));
    CHECK(is_boolean_tag("learning_paradigm"));
    CHECK_FALSE(is_boolean_tag("domain"));
    CHECK_FALSE(is_boolean_tag("venue_year"));
    for (const auto& f : taxonomy()) {
        bool method_group = f.group == FacetGroup::document_representation || f.group == FacetGroup::model_training ||
                            f.group == FacetGroup::summary_generation;
        CHECK((f.kind == FacetKind::boolean_tag) == method_group);
    }
}

TEST_CASE("find_facet") {
    REQUIRE(find_facet("post_processing") != nullptr);
    CHECK(find_facet("post_processing")->label == "Post Processing");
    CHECK(find_facet("nope") == nullptr);
}

TEST_CASE("fold_case only touches ASCII letters") {
    CHECK(fold_case("CNN/DailyMail") == "cnn/dailymail");
    CHECK(fold_case("\xC3\x89T\xC3\x89") == "\xC3\x89t\xC3\x89");
}

TEST_CASE("acronym heuristic needs two uppercase letters") {
    CHECK(looks_like_acronym("EDU"));
    CHECK(looks_like_acronym("mBART"));
    CHECK_FALSE(looks_like_acronym("mbart"));
    CHECK(looks_like_acronym("BERTScore"));
    CHECK_FALSE(looks_like_acronym("Rouge"));
}

TEST_CASE("valid record has no violations") {
    CHECK(validate_record(valid_record()).empty());
}

TEST_CASE("validation rules") {
    SUBCASE("empty id") {
        auto r = valid_record();
        r.id.clear();
        CHECK_FALSE(validate_record(r).empty());
    }
    SUBCASE("year out of range") {
        auto r = valid_record();
        r.year = 1900;
        CHECK_FALSE(validate_record(r).empty());
        r.year = 2101;
        CHECK_FALSE(validate_record(r).empty());
        r.year = kMinYear;
        CHECK(validate_record(r).empty());
    }
    SUBCASE("paper type required and closed") {
        auto r = valid_record();
        r.paper_types.clear();
        CHECK_FALSE(validate_record(r).empty());
        r.paper_types = {"survey"};
        CHECK(has_rule(validate_record(r), "paper_types", "unknown-paper-type"));
    }
    SUBCASE("a valued facet used as a tag is rejected") {
        auto r = valid_record();
        r.facet_tags.insert("domain");
        CHECK(has_rule(validate_record(r), "facet_tags", "not-a-boolean-tag"));
    }
    SUBCASE("unknown paradigm") {
        auto r = valid_record();
        r.learning_paradigms = {"semi-supervised"};
        CHECK(has_rule(validate_record(r), "learning_paradigms", "unknown-paradigm"));
    }
    SUBCASE("blank set value") {
        auto r = valid_record();
        r.datasets = {"  "};
        CHECK_FALSE(validate_record(r).empty());
    }
    SUBCASE("summary pair with empty solution") {
        auto r = valid_record();
        r.indicative_summary = IndicativeSummary{"p", "a", "u", {{"problem", ""}}, std::nullopt};
        CHECK_FALSE(validate_record(r).empty());
    }
    SUBCASE("acronym without uppercase letters") {
        auto r = valid_record();
        r.terminology = {{TermKind::acronym, "abc", "a b c"}};
        CHECK_FALSE(validate_record(r).empty());
        r.terminology = {{TermKind::acronym, "ABC", "a b c"}};
        CHECK(validate_record(r).empty());
    }
}

TEST_CASE("warnings: unknown venue and code flag without url") {
    auto r = valid_record();
    CHECK(record_warnings(r).empty());
    r.venue = "Workshop on Foo";
    r.has_code = true;
    CHECK(record_warnings(r).size() == 2);
    r.venue = "emnlp";
    r.code_url = "https://example.org";
    CHECK(record_warnings(r).empty());
}

TEST_CASE("challenge vocabulary") {
    auto v = default_challenges();
    CHECK(v.size() == 9);
    CHECK(v.contains("Lack of Suitable Training Data"));
    auto w = v.extended("New Challenge").extended("New Challenge");
    CHECK(w.size() == 10);
    CHECK(v.size() == 9);
    CHECK(v.extended("Lack of Suitable Training Data") == v);
}

TEST_CASE("record JSON round trip") {
    testsupport::CorpusGen g(3);
    for (int i = 0; i < 50; ++i) {
        auto r = g.record(i);
        if (i % 3 == 0) {
            r.indicative_summary = IndicativeSummary{"why", "who", "how", {{"p1", "s1"}, {"p2", "s2"}}, "intro"};
            r.terminology = {{TermKind::glossary, "Term", "Def"}, {TermKind::acronym, "EDU", "Elementary Discourse Unit"}};
            r.introduction = "Intro text";
        }
        CHECK(record_from_json(to_json(r)) == r);
    }
}

TEST_CASE("record JSON parsing is strict") {
    auto j = to_json(valid_record());
    SUBCASE("unknown key") {
        j["extra"] = 1;
        CHECK_THROWS_AS(record_from_json(j), Error);
    }
    SUBCASE("missing required key") {
        j.erase("venue");
        CHECK_THROWS_AS(record_from_json(j), Error);
    }
    SUBCASE("year must be an integer") {
        j["year"] = "2020";
        CHECK_THROWS_AS(record_from_json(j), Error);
    }
    SUBCASE("bad term kind") {
        j["terminology"] = nlohmann::json::array({{{"kind", "other"}, {"term", "x"}, {"definition", "y"}}});
        CHECK_THROWS_AS(record_from_json(j), Error);
    }
}

TEST_CASE("error messages carry code and line") {
    Error e(ErrorCode::validation_error, "bad", 7);
    CHECK(e.code() == ErrorCode::validation_error);
    CHECK(e.line() == 7);
    CHECK(std::string(e.what()).find("line 7") != std::string::npos);
    CHECK(to_string(ErrorCode::parse_failed_after_retries) == "parse_failed_after_retries");
}
