#include "litfacet/service.hpp"

#include <algorithm>

#include <httplib.h>

#include "litfacet/error.hpp"
#include "litfacet/stats.hpp"

namespace litfacet {

using nlohmann::json;

std::shared_ptr<const AppState> make_state(CorpusSnapshot snapshot, std::vector<FigureAsset> figures,
                                           std::optional<ChallengeClusterSet> challenges) {
    auto state = std::make_shared<AppState>();
    state->indexes = build_indexes(snapshot);
    state->snapshot = std::move(snapshot);
    state->figures = std::move(figures);
    state->challenges = std::move(challenges);
    state->built_at = std::chrono::system_clock::now();
    return state;
}

std::shared_ptr<const AppState> load_state(const StatePaths& paths) {
    auto loaded = load_corpus(paths.corpus);
    std::vector<FigureAsset> figures;
    if (paths.figures) {
        figures = load_figures(*paths.figures);
    }
    std::optional<ChallengeClusterSet> challenges;
    if (paths.challenges) {
        auto text = read_text_file(*paths.challenges);
        try {
            challenges = challenge_set_from_json(json::parse(text));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::parse_error, paths.challenges->string() + ": " + e.what());
        }
    }
    return make_state(std::move(loaded.snapshot), std::move(figures), std::move(challenges));
}

StateHolder::StateHolder(std::shared_ptr<const AppState> initial) : state_(std::move(initial)) {}

std::shared_ptr<const AppState> StateHolder::current() const {
    std::lock_guard lock(mutex_);
    return state_;
}

void StateHolder::replace(std::shared_ptr<const AppState> next) {
    std::shared_ptr<const AppState> old;
    {
        std::lock_guard lock(mutex_);
        old = std::exchange(state_, std::move(next));
        ++generation_;
    }
    // old is released outside the lock; readers may still hold it.
}

std::uint64_t StateHolder::generation() const {
    std::lock_guard lock(mutex_);
    return generation_;
}

json error_body(std::string_view code, std::string_view message) {
    return {{"error", {{"code", code}, {"message", message}}}};
}

namespace {

int status_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::not_found:
        return 404;
    case ErrorCode::bad_query:
    case ErrorCode::bad_page:
    case ErrorCode::unknown_dimension:
    case ErrorCode::parse_error:
        return 400;
    default:
        return 500;
    }
}

ApiResponse failure(const Error& e) {
    return {status_for(e.code()), error_body(to_string(e.code()), e.detail())};
}

ApiResponse not_found(const std::string& what) { return {404, error_body("not_found", what)}; }

bool contains_folded(const std::string& haystack, const std::string& needle) {
    return fold_case(haystack).find(fold_case(needle)) != std::string::npos;
}

} // namespace

namespace api {

ApiResponse facets(const AppState&) {
    json out = json::array();
    for (const auto& f : taxonomy()) {
        out.push_back(to_json(f));
    }
    return {200, {{"facets", out}}};
}

ApiResponse paper(const AppState& state, const std::string& id) {
    const auto* record = state.snapshot.find(id);
    if (!record) {
        return not_found("no paper with id " + id);
    }
    return {200, to_json(*record)};
}

ApiResponse paper_summary(const AppState& state, const std::string& id) {
    const auto* record = state.snapshot.find(id);
    if (!record) {
        return not_found("no paper with id " + id);
    }
    if (!record->indicative_summary) {
        return not_found("paper " + id + " has no indicative summary");
    }
    json terms = json::array();
    for (const auto& t : record->terminology) {
        terms.push_back(to_json(t));
    }
    return {200, {{"id", id}, {"indicative_summary", to_json(*record->indicative_summary)}, {"terminology", terms}}};
}

ApiResponse search(const AppState& state, std::string_view body) {
    try {
        json j = body.find_first_not_of(" \t\r\n") == std::string_view::npos ? json::object() : json::parse(body);
        auto query = query_from_json(j);
        return {200, to_json(litfacet::search(state.indexes, query))};
    } catch (const json::exception& e) {
        return {400, error_body("bad_query", e.what())};
    } catch (const Error& e) {
        return failure(e);
    }
}

ApiResponse stats_report(const AppState& state) { return {200, to_json(report(state.snapshot))}; }

ApiResponse stats_dimension(const AppState& state, std::string_view dimension) {
    try {
        return {200, to_json(distribution(state.snapshot, dimension))};
    } catch (const Error& e) {
        return failure(e);
    }
}

ApiResponse figures(const AppState& state, const std::optional<std::string>& paper_id,
                    const std::optional<std::string>& q) {
    json out = json::array();
    for (const auto& f : state.figures) {
        if (paper_id && !paper_id->empty() && f.paper_id != *paper_id) {
            continue;
        }
        if (q && !q->empty() && !contains_folded(f.caption, *q)) {
            continue;
        }
        out.push_back(to_json(f));
    }
    auto total = out.size();
    return {200, {{"total", total}, {"figures", std::move(out)}}};
}

ApiResponse challenges(const AppState& state) {
    if (!state.challenges) {
        return {200, to_json(ChallengeClusterSet{})};
    }
    return {200, to_json(*state.challenges)};
}

} // namespace api

// ---------------------------------------------------------------------------
// HTTP

namespace {

void send(httplib::Response& res, const ApiResponse& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
}

std::optional<std::string> param(const httplib::Request& req, const char* name) {
    if (!req.has_param(name)) {
        return std::nullopt;
    }
    return req.get_param_value(name);
}

} // namespace

ApiServer::ApiServer(StateHolder& holder) : holder_(holder), server_(std::make_unique<httplib::Server>()) {
    auto& s = *server_;
    auto& h = holder_;

    // no SO_REUSEPORT: a second server on the same port must fail to bind
    s.set_socket_options([](socket_t sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    });

    s.Get("/api/facets", [&h](const httplib::Request&, httplib::Response& res) { send(res, api::facets(*h.current())); });
    s.Get(R"(/api/papers/([^/]+)/summary)", [&h](const httplib::Request& req, httplib::Response& res) {
        send(res, api::paper_summary(*h.current(), req.matches[1]));
    });
    s.Get(R"(/api/papers/([^/]+))", [&h](const httplib::Request& req, httplib::Response& res) {
        send(res, api::paper(*h.current(), req.matches[1]));
    });
    s.Post("/api/search", [&h](const httplib::Request& req, httplib::Response& res) {
        send(res, api::search(*h.current(), req.body));
    });
    s.Get("/api/stats/report",
          [&h](const httplib::Request&, httplib::Response& res) { send(res, api::stats_report(*h.current())); });
    s.Get(R"(/api/stats/([^/]+))", [&h](const httplib::Request& req, httplib::Response& res) {
        send(res, api::stats_dimension(*h.current(), req.matches[1].str()));
    });
    s.Get("/api/figures", [&h](const httplib::Request& req, httplib::Response& res) {
        send(res, api::figures(*h.current(), param(req, "paper_id"), param(req, "q")));
    });
    s.Get("/api/challenges",
          [&h](const httplib::Request&, httplib::Response& res) { send(res, api::challenges(*h.current())); });

    s.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (res.body.empty()) {
            auto code = res.status == 404 ? "not_found" : "http_error";
            res.set_content(error_body(code, req.method + " " + req.path).dump(), "application/json");
        }
    });
    s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            message = e.what();
        } catch (...) {
        }
        res.status = 500;
        res.set_content(error_body("internal_error", message).dump(), "application/json");
    });
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
    if (port < 0 || port > 65535) {
        throw Error(ErrorCode::bind_error, "port out of range: " + std::to_string(port));
    }
    if (port == 0) {
        port_ = server_->bind_to_any_port(host);
        if (port_ < 0) {
            throw Error(ErrorCode::bind_error, "cannot bind " + host);
        }
    } else {
        if (!server_->bind_to_port(host, port)) {
            throw Error(ErrorCode::bind_error, "cannot bind " + host + ":" + std::to_string(port));
        }
        port_ = port;
    }
    return port_;
}

void ApiServer::listen() { server_->listen_after_bind(); }

void ApiServer::start() {
    thread_ = std::jthread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

void ApiServer::stop() {
    if (server_) {
        server_->stop();
    }
    if (thread_.joinable()) {
        thread_.join();
    }
}

} // namespace litfacet
