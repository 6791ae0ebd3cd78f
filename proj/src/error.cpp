#include "litfacet/error.hpp"

namespace litfacet {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::duplicate_id: return "duplicate_id";
    case ErrorCode::validation_error: return "validation_error";
    case ErrorCode::empty_keyword: return "empty_keyword";
    case ErrorCode::dim_mismatch: return "dim_mismatch";
    case ErrorCode::unknown_dimension: return "unknown_dimension";
    case ErrorCode::bad_page: return "bad_page";
    case ErrorCode::bad_query: return "bad_query";
    case ErrorCode::format_error: return "format_error";
    case ErrorCode::wrong_pair_count: return "wrong_pair_count";
    case ErrorCode::empty_list: return "empty_list";
    case ErrorCode::empty_introduction: return "empty_introduction";
    case ErrorCode::missing_introduction: return "missing_introduction";
    case ErrorCode::transport_error: return "transport_error";
    case ErrorCode::parse_failed_after_retries: return "parse_failed_after_retries";
    case ErrorCode::degenerate_input: return "degenerate_input";
    case ErrorCode::dim_error: return "dim_error";
    case ErrorCode::k_too_large: return "k_too_large";
    case ErrorCode::bind_error: return "bind_error";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::invalid_config: return "invalid_config";
    }
    return "unknown";
}

namespace {
std::string compose(ErrorCode code, const std::string& detail, std::optional<std::size_t> line) {
    std::string out(to_string(code));
    if (line) {
        out += " (line " + std::to_string(*line) + ")";
    }
    if (!detail.empty()) {
        out += ": " + detail;
    }
    return out;
}
} // namespace

Error::Error(ErrorCode code, const std::string& detail, std::optional<std::size_t> line)
    : std::runtime_error(compose(code, detail, line)), code_(code), detail_(detail), line_(line) {}

} // namespace litfacet
