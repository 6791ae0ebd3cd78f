#include <cstdlib>
#include <fstream>
#include <sstream>

#include <httplib.h>

#include "litfacet/error.hpp"
#include "litfacet/llm_extract.hpp"

namespace litfacet {

using nlohmann::json;

void CompletionClientConfig::validate() const {
    if (max_retries < 0) {
        throw Error(ErrorCode::invalid_config, "max_retries must be >= 0");
    }
    if (!(temperature >= 0.0 && temperature <= 2.0)) {
        throw Error(ErrorCode::invalid_config, "temperature must be in [0, 2]");
    }
    if (max_in_flight < 1) {
        throw Error(ErrorCode::invalid_config, "max_in_flight must be >= 1");
    }
    if (timeout.count() <= 0) {
        throw Error(ErrorCode::invalid_config, "timeout must be positive");
    }
}

CompletionClientConfig CompletionClientConfig::from_env() {
    CompletionClientConfig config;
    if (const char* base = std::getenv("LLM_API_BASE")) {
        config.base_url = base;
    }
    if (const char* model = std::getenv("LLM_MODEL")) {
        config.model_name = model;
    }
    return config;
}

namespace {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;    // path prefix without trailing slash
};

Endpoint split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(ErrorCode::invalid_config, "base_url needs a scheme: " + url);
    }
    auto path_start = url.find('/', scheme_end + 3);
    Endpoint ep;
    ep.origin = url.substr(0, path_start);
    ep.path = path_start == std::string::npos ? std::string() : url.substr(path_start);
    while (!ep.path.empty() && ep.path.back() == '/') {
        ep.path.pop_back();
    }
    return ep;
}

} // namespace

HttpCompletionTransport::HttpCompletionTransport(CompletionClientConfig config) : config_(std::move(config)) {
    config_.validate();
    if (config_.base_url.empty()) {
        throw Error(ErrorCode::invalid_config, "base_url is not set (LLM_API_BASE)");
    }
    if (config_.model_name.empty()) {
        throw Error(ErrorCode::invalid_config, "model_name is not set (LLM_MODEL)");
    }
    split_url(config_.base_url);
}

json HttpCompletionTransport::request_body(const CompletionClientConfig& config, std::string_view prompt) {
    return {{"model", config.model_name},
            {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
            {"temperature", config.temperature}};
}

std::string HttpCompletionTransport::response_content(std::string_view body) {
    try {
        auto j = json::parse(body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::transport_error, std::string("malformed completion response: ") + e.what());
    }
}

std::string HttpCompletionTransport::complete(const CompletionRequest& request) {
    auto ep = split_url(config_.base_url);
    httplib::Client client(ep.origin);
    auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    auto micros = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());

    httplib::Headers headers;
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    auto body = request_body(config_, request.prompt).dump();
    auto res = client.Post(ep.path + "/chat/completions", headers, body, "application/json");
    if (!res) {
        throw Error(ErrorCode::transport_error, "request failed: " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        throw Error(ErrorCode::transport_error,
                    "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
    }
    return response_content(res->body);
}

FixtureTransport::FixtureTransport(std::filesystem::path root) : root_(std::move(root)) {}

std::filesystem::path FixtureTransport::fixture_path(PromptKind kind, std::string_view record_id) const {
    return root_ / std::string(to_string(kind)) / (std::string(record_id) + ".txt");
}

std::string FixtureTransport::complete(const CompletionRequest& request) {
    if (request.record_id.empty() || request.record_id.find_first_of("/\\") != std::string::npos ||
        request.record_id == "." || request.record_id == "..") {
        throw Error(ErrorCode::transport_error, "record id not usable as a fixture name: " + request.record_id);
    }
    auto path = fixture_path(request.kind, request.record_id);
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::transport_error, "no fixture " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace litfacet
