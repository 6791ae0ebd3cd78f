#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <functional>

#include <unistd.h>

#include "litfacet/error.hpp"
#include "litfacet/ingest.hpp"
#include "test_support.hpp"

using namespace litfacet;
namespace fs = std::filesystem;

namespace {

std::string line_for(const std::string& id, int year = 2020) {
    return R"({"id":")" + id + R"(","title":"T","venue":"ACL","year":)" + std::to_string(year) +
           R"(,"paper_types":["method"]})";
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::io_error;
}

std::size_t count_nonblank_lines(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        n += line.find_first_not_of(" \t\r") != std::string::npos;
    }
    return n;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("litfacet-test-" + std::to_string(::getpid()) + "-" +
                                            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("sample manifest loads with one record per line") {
    auto path = testsupport::sample("corpus.jsonl");
    auto result = load_corpus(path);
    CHECK(result.snapshot.size() == count_nonblank_lines(path));
    CHECK(result.snapshot.size() == 30);
    CHECK(result.rejected.empty());
}

TEST_CASE("loading is idempotent") {
    auto a = load_corpus(testsupport::sample("corpus.jsonl"));
    auto b = load_corpus(testsupport::sample("corpus.jsonl"));
    CHECK(a.snapshot == b.snapshot);
}

TEST_CASE("empty input gives an empty snapshot") {
    CHECK(parse_corpus("", "mem").snapshot.size() == 0);
    CHECK(parse_corpus("\n  \n", "mem").snapshot.size() == 0);
}

TEST_CASE("duplicate ids") {
    auto text = line_for("p1") + "\n" + line_for("p1") + "\n";
    try {
        parse_corpus(text, "mem");
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::duplicate_id);
        CHECK(e.line() == 2);
        CHECK(e.detail().find("p1") != std::string::npos);
    }
    auto lenient = parse_corpus(text, "mem", {.lenient = true});
    CHECK(lenient.snapshot.size() == 1);
    REQUIRE(lenient.rejected.size() == 1);
    CHECK(lenient.rejected[0].code == ErrorCode::duplicate_id);
}

TEST_CASE("bad lines carry line numbers") {
    auto text = line_for("p1") + "\n\n{not json\n" + line_for("p3", 1800) + "\n";
    try {
        parse_corpus(text, "mem");
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::parse_error);
        CHECK(e.line() == 3);
    }
    auto r = parse_corpus(text, "mem", {.lenient = true});
    CHECK(r.snapshot.size() == 1);
    REQUIRE(r.rejected.size() == 2);
    CHECK(r.rejected[0].line == 3);
    CHECK(r.rejected[1].line == 4);
    CHECK(r.rejected[1].code == ErrorCode::validation_error);
    CHECK_FALSE(r.rejected[1].violations.empty());
}

TEST_CASE("missing file is an io error") {
    CHECK(code_of([] { load_corpus("/nonexistent/corpus.jsonl"); }) == ErrorCode::io_error);
}

TEST_CASE("write then load round-trips") {
    TempDir dir;
    testsupport::CorpusGen g(11);
    auto snap = g.corpus(40);
    write_corpus(dir.path / "c.jsonl", snap);
    auto back = load_corpus(dir.path / "c.jsonl").snapshot;
    CHECK(back.records == snap.records);
}

TEST_CASE("keyword screen") {
    std::vector<ScreenCandidate> c = {{"a", "A Summarization Study", ""}, {"b", "Parsing Trees", ""}};
    CHECK(keyword_screen(c, "summ") == std::vector<std::string>{"a"});
    CHECK(keyword_screen(c, "SUMM") == keyword_screen(c, "summ"));
    CHECK(code_of([&] { keyword_screen(c, ""); }) == ErrorCode::empty_keyword);
}

TEST_CASE("keyword screen on the candidate fixture") {
    auto cands = load_candidates(testsupport::sample("candidates.jsonl"));
    CHECK(cands.size() == 40);
    // independent count: lowercase substring over title + abstract
    std::size_t expected = 0;
    for (const auto& c : cands) {
        auto t = testsupport::ascii_lower(c.title + "\n" + c.abstract);
        expected += t.find("summ") != std::string::npos;
    }
    CHECK(expected == 12);
    CHECK(keyword_screen(cands, "summ").size() == expected);
}

TEST_CASE("keyword screen properties: subset, order, monotone") {
    testsupport::CorpusGen g(5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<ScreenCandidate> cands;
        int n = g.uniform(0, 30);
        for (int i = 0; i < n; ++i) {
            cands.push_back({"c" + std::to_string(i), g.text(2, 6), g.text(0, 10)});
        }
        std::string kw = testsupport::CorpusGen::words()[g.uniform(0, 5)].substr(0, 4);
        auto hits = keyword_screen(cands, kw);
        std::size_t pos = 0;
        for (const auto& id : hits) {
            while (pos < cands.size() && cands[pos].id != id) {
                ++pos;
            }
            CHECK(pos < cands.size());
        }
        auto more = cands;
        more.push_back({"extra", g.text(2, 6), g.text(0, 10)});
        auto hits2 = keyword_screen(more, kw);
        // the extra candidate is last, so earlier matches stay a prefix
        REQUIRE(hits2.size() >= hits.size());
        CHECK(std::equal(hits.begin(), hits.end(), hits2.begin()));
    }
}

TEST_CASE("figure manifest validation") {
    std::string good = R"([{"paper_id":"p01","kind":"figure","caption":"c","image_ref":"img/a.png","ordinal":1}])";
    CHECK(parse_figures(good).size() == 1);
    SUBCASE("ordinal 0 among five assets") {
        std::string text = "[";
        for (int i = 1; i <= 5; ++i) {
            text += (i > 1 ? "," : "");
            text += R"({"paper_id":"p01","kind":"table","caption":"c","image_ref":"t.png","ordinal":)" +
                    std::to_string(i == 3 ? 0 : i) + "}";
        }
        text += "]";
        CHECK(code_of([&] { parse_figures(text); }) == ErrorCode::parse_error);
    }
    SUBCASE("duplicate ordinal for the same paper and kind") {
        std::string text = R"([{"paper_id":"p","kind":"figure","caption":"","image_ref":"a","ordinal":1},
                                {"paper_id":"p","kind":"figure","caption":"","image_ref":"b","ordinal":1}])";
        CHECK(code_of([&] { parse_figures(text); }) == ErrorCode::parse_error);
    }
    SUBCASE("image_ref escaping the manifest directory") {
        std::string text = R"([{"paper_id":"p","kind":"figure","caption":"","image_ref":"../x.png","ordinal":1}])";
        CHECK(code_of([&] { parse_figures(text); }) == ErrorCode::parse_error);
        text = R"([{"paper_id":"p","kind":"figure","caption":"","image_ref":"/etc/x.png","ordinal":1}])";
        CHECK(code_of([&] { parse_figures(text); }) == ErrorCode::parse_error);
    }
}

TEST_CASE("sample figures reference sample papers") {
    auto figs = load_figures(testsupport::sample("figures.json"));
    auto snap = load_corpus(testsupport::sample("corpus.jsonl")).snapshot;
    CHECK(figs.size() == 20);
    CHECK(cross_validate_figures(figs, snap).empty());
    std::vector<FigureAsset> bad = {{"zzz", AssetKind::figure, "", "a.png", 1}};
    CHECK(cross_validate_figures(bad, snap).size() == 1);
}

TEST_CASE("embeddings") {
    auto set = load_embeddings(testsupport::sample("problem_embeddings.jsonl"));
    CHECK(set.dim == 8);
    CHECK(set.size() == 60);

    auto vec = [](int n) {
        std::string s = "[";
        for (int i = 0; i < n; ++i) {
            s += (i ? ",0.5" : "0.5");
        }
        return s + "]";
    };
    std::string text = R"({"statement_id":"s1","paper_id":"p","problem":"x","vector":)" + vec(384) + "}\n" +
                       R"({"statement_id":"s2","paper_id":"p","problem":"y","vector":)" + vec(383) + "}\n";
    try {
        parse_embeddings(text);
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::dim_mismatch);
        CHECK(e.detail().find("s2") != std::string::npos);
    }
    auto round = parse_embeddings(format_embeddings(set));
    CHECK(round.statements == set.statements);
}
