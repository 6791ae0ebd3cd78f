#include <doctest.h>

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "litfacet/error.hpp"
#include "litfacet/service.hpp"
#include "litfacet/stats.hpp"
#include "test_support.hpp"

#include <httplib.h>

using namespace litfacet;
using nlohmann::json;

namespace {

std::shared_ptr<const AppState> sample_state() {
    static auto state = load_state({testsupport::sample("corpus.jsonl"), testsupport::sample("figures.json"), {}});
    return state;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct CliRun {
    int code;
    std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

} // namespace

TEST_CASE("facets endpoint lists the taxonomy") {
    auto r = api::facets(*sample_state());
    CHECK(r.status == 200);
    REQUIRE(r.body["facets"].size() == 17);
    for (std::size_t i = 0; i < 17; ++i) {
        CHECK(r.body["facets"][i] == to_json(taxonomy()[i]));
    }
}

TEST_CASE("paper and summary endpoints") {
    auto s = sample_state();
    auto r = api::paper(*s, "p01");
    CHECK(r.status == 200);
    CHECK(r.body == to_json(*s->snapshot.find("p01")));

    auto missing = api::paper(*s, "unknown");
    CHECK(missing.status == 404);
    CHECK(missing.body["error"]["code"] == "not_found");
    CHECK(missing.body["error"]["message"].is_string());

    auto summary = api::paper_summary(*s, "p01");
    CHECK(summary.status == 200);
    CHECK(summary.body["id"] == "p01");
    CHECK(summary.body["indicative_summary"] == to_json(*s->snapshot.find("p01")->indicative_summary));
    CHECK(api::paper_summary(*s, "p02").status == 404);
}

TEST_CASE("search endpoint") {
    auto s = sample_state();
    auto all = api::search(*s, "{}");
    CHECK(all.status == 200);
    CHECK(all.body["total"] == 30);
    CHECK(all.body["page"] == 1);
    CHECK(all.body["hits"].size() == 20);
    CHECK(api::search(*s, "").body == all.body);
    CHECK(all.body == to_json(search(s->indexes, Query{})));

    auto q = json{{"filters", {{"venue", {"acl"}}}}, {"page_size", 5}};
    auto filtered = api::search(*s, q.dump());
    CHECK(filtered.body == to_json(search(s->indexes, query_from_json(q))));

    auto bad = api::search(*s, "{not json");
    CHECK(bad.status == 400);
    CHECK(bad.body["error"]["code"] == "bad_query");
    CHECK(api::search(*s, R"({"page":0})").status == 400);
    auto dim = api::search(*s, R"({"filters":{"colour":["red"]}})");
    CHECK(dim.status == 400);
    CHECK(dim.body["error"]["code"] == "unknown_dimension");
}

TEST_CASE("stats endpoints") {
    auto s = sample_state();
    CHECK(api::stats_report(*s).body == to_json(report(s->snapshot)));
    CHECK(api::stats_report(*s).body == json::parse(slurp(testsupport::sample("expected_report.json"))));
    CHECK(api::stats_dimension(*s, "venue").body == to_json(distribution(s->snapshot, "venue")));
    auto bogus = api::stats_dimension(*s, "bogus");
    CHECK(bogus.status == 400);
    CHECK(bogus.body["error"]["code"] == "unknown_dimension");
}

TEST_CASE("figures endpoint filters") {
    auto s = sample_state();
    auto all = api::figures(*s, std::nullopt, std::nullopt);
    CHECK(all.body["total"] == 20);
    auto p1 = api::figures(*s, std::string("p01"), std::nullopt);
    CHECK(p1.body["total"] == 2);
    for (const auto& f : p1.body["figures"]) {
        CHECK(f["paper_id"] == "p01");
    }
    // independent caption filter
    std::size_t tables = 0;
    for (const auto& f : s->figures) {
        tables += testsupport::ascii_lower(f.caption).find("table") != std::string::npos;
    }
    CHECK(api::figures(*s, std::nullopt, std::string("TABLE")).body["total"] == tables);
}

TEST_CASE("challenges endpoint without clusters") {
    auto r = api::challenges(*sample_state());
    CHECK(r.status == 200);
    CHECK(r.body["assignments"].empty());
    CHECK(r.body["num_clusters"] == 0);
}

TEST_CASE("readers see the old state or the new one, never a mix") {
    testsupport::CorpusGen g(42);
    auto small = make_state(g.corpus(10));
    auto large = make_state(g.corpus(25));
    StateHolder holder(small);
    std::atomic<bool> done{false};
    std::atomic<int> mismatches{0};
    std::atomic<int> reads{0};
    std::vector<std::jthread> readers;
    for (int t = 0; t < 4; ++t) {
        readers.emplace_back([&] {
            while (!done) {
                auto st = holder.current();
                auto n = st->snapshot.size();
                auto total = api::search(*st, "{}").body["total"].get<std::size_t>();
                auto stats_total = api::stats_report(*st).body["total_papers"].get<std::size_t>();
                if ((n != 10 && n != 25) || total != n || stats_total != n) {
                    ++mismatches;
                }
                ++reads;
            }
        });
    }
    for (int i = 0; i < 200; ++i) {
        holder.replace(i % 2 ? small : large);
    }
    while (reads < 200) {
        std::this_thread::yield();
    }
    done = true;
    readers.clear();
    CHECK(mismatches == 0);
    CHECK(holder.generation() == 200);
}

TEST_CASE("HTTP server answers like the handlers") {
    StateHolder holder(sample_state());
    ApiServer server(holder);
    int port = server.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    server.start();
    httplib::Client client("127.0.0.1", port);

    auto facets = client.Get("/api/facets");
    REQUIRE(facets);
    CHECK(facets->status == 200);
    CHECK(json::parse(facets->body) == api::facets(*holder.current()).body);

    auto search = client.Post("/api/search", R"({"keywords":"summarization"})", "application/json");
    REQUIRE(search);
    CHECK(json::parse(search->body) == api::search(*holder.current(), R"({"keywords":"summarization"})").body);

    auto paper = client.Get("/api/papers/p03");
    REQUIRE(paper);
    CHECK(json::parse(paper->body)["id"] == "p03");
    auto missing = client.Get("/api/papers/unknown");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    CHECK(json::parse(missing->body)["error"]["code"] == "not_found");

    auto stats = client.Get("/api/stats/venue");
    REQUIRE(stats);
    CHECK(json::parse(stats->body) == api::stats_dimension(*holder.current(), "venue").body);
    CHECK(client.Get("/api/stats/report")->status == 200);
    CHECK(client.Get("/api/stats/bogus")->status == 400);

    auto figs = client.Get("/api/figures?paper_id=p02&q=figure");
    REQUIRE(figs);
    CHECK(json::parse(figs->body) == api::figures(*holder.current(), std::string("p02"), std::string("figure")).body);
    CHECK(client.Get("/api/papers/p01/summary")->status == 200);
    CHECK(client.Get("/api/challenges")->status == 200);
    auto nowhere = client.Get("/api/nowhere");
    REQUIRE(nowhere);
    CHECK(nowhere->status == 404);
    CHECK(json::parse(nowhere->body)["error"]["code"] == "not_found");

    testsupport::CorpusGen g(1);
    holder.replace(make_state(g.corpus(7)));
    CHECK(json::parse(client.Post("/api/search", "{}", "application/json")->body)["total"] == 7);
    server.stop();
}

TEST_CASE("binding a taken port fails") {
    StateHolder holder(sample_state());
    ApiServer a(holder);
    int port = a.bind("127.0.0.1", 0);
    ApiServer b(holder);
    try {
        b.bind("127.0.0.1", port);
        FAIL("second bind succeeded");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::bind_error);
    }
}

TEST_CASE("command line exit codes") {
    auto corpus = testsupport::sample("corpus.jsonl").string();
    auto ok = cli({"validate", corpus});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("30 valid") != std::string::npos);
    CHECK(cli({"validate", corpus, "--figures", testsupport::sample("figures.json").string()}).code == 0);
    CHECK(cli({"validate", "/nonexistent.jsonl"}).code == 1);
    auto unknown = cli({"frobnicate"});
    CHECK(unknown.code == 2);
    CHECK_FALSE(unknown.err.empty());
    CHECK(cli({}).code == 2);
    CHECK(cli({"stats", corpus, "--dimension", "bogus"}).code == 2);

    auto csv = cli({"stats", corpus, "--dimension", "venue", "--format", "csv"});
    CHECK(csv.code == 0);
    CHECK(csv.out == slurp(testsupport::sample("expected_venue.csv")));
    auto report_json = cli({"stats", corpus, "--format", "json"});
    CHECK(json::parse(report_json.out) == json::parse(slurp(testsupport::sample("expected_report.json"))));

    auto screen = cli({"screen", "--keyword", "summ", testsupport::sample("candidates.jsonl").string()});
    CHECK(screen.code == 0);
    std::istringstream lines(screen.out);
    std::string line;
    int n = 0;
    while (std::getline(lines, line)) {
        n += !line.empty();
    }
    CHECK(n == 12);

    auto idx = cli({"index", corpus, "--query", R"({"filters":{"year_range":[2020,2021]}})"});
    CHECK(idx.code == 0);
    auto page = json::parse(idx.out);
    std::size_t expected = 0;
    for (const auto& [id, r] : sample_state()->snapshot.records) {
        expected += r.year >= 2020 && r.year <= 2021;
    }
    CHECK(page["total"] == expected);
}

TEST_CASE("offline extraction through the command line") {
    auto corpus = testsupport::sample("corpus.jsonl").string();
    auto out = std::filesystem::temp_directory_path() / ("litfacet-enriched-" + std::to_string(::getpid()) + ".jsonl");
    auto r = cli({"extract", corpus, "--kind", "glossary", "--offline", "--fixtures", testsupport::fixture("llm").string(),
                  "--out", out.string()});
    CHECK(r.code == 0);
    auto enriched = load_corpus(out).snapshot;
    std::filesystem::remove(out);
    const auto* p7 = enriched.find("p07");
    REQUIRE(p7 != nullptr);
    std::size_t glossary = 0;
    for (const auto& t : p7->terminology) {
        glossary += t.kind == TermKind::glossary;
    }
    CHECK(glossary == 3);
    CHECK(cli({"extract", corpus, "--kind", "summary", "--offline", "--fixtures", "x"}).code == 2);
}

TEST_CASE("apply_extraction") {
    PaperRecord base;
    base.id = "a";
    base.terminology = {{TermKind::glossary, "Old", "old"}, {TermKind::acronym, "KEPT", "kept"}};

    ParsedExtraction cf;
    cf.kind = PromptKind::context_factors;
    cf.qa_pairs = std::vector<QaPair>{{"q1", "why"}, {"q2", "who"}, {"q3", "how"}};
    auto r = apply_extraction(base, cf);
    REQUIRE(r.indicative_summary);
    CHECK(r.indicative_summary->purpose == "why");
    CHECK(r.indicative_summary->audience == "who");
    CHECK(r.indicative_summary->application == "how");

    ParsedExtraction ps;
    ps.kind = PromptKind::problems_solutions;
    ps.problems_solutions = std::vector<ProblemSolution>{{"p", "s"}};
    r = apply_extraction(r, ps);
    CHECK(r.indicative_summary->purpose == "why");
    CHECK(r.indicative_summary->problems_solutions.size() == 1);

    ParsedExtraction gl;
    gl.kind = PromptKind::glossary;
    gl.terms = std::vector<TermEntry>{{TermKind::glossary, "New", "new"}};
    r = apply_extraction(r, gl);
    CHECK(r.terminology.size() == 2);
    CHECK(std::count(r.terminology.begin(), r.terminology.end(), TermEntry{TermKind::acronym, "KEPT", "kept"}) == 1);
    CHECK(std::count(r.terminology.begin(), r.terminology.end(), TermEntry{TermKind::glossary, "New", "new"}) == 1);
}

TEST_CASE("attach_challenges adds cluster labels to papers") {
    auto snap = sample_state()->snapshot;
    ChallengeClusterSet set;
    set.labels = {{0, "Lack of Suitable Training Data"}, {1, "Hallucination"}};
    set.assignments = {{"s1", "p01", 0, 0.9}, {"s2", "p01", 1, 0.5}, {"s3", "p02", -1, 0.0}, {"s4", "missing", 0, 1.0}};
    set.num_clusters = 2;
    auto out = attach_challenges(snap, set);
    CHECK(out.find("p01")->challenges.contains("Lack of Suitable Training Data"));
    CHECK(out.find("p01")->challenges.contains("Hallucination"));
    CHECK(out.find("p02")->challenges == snap.find("p02")->challenges);
    CHECK(out.size() == snap.size());
}
