#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace litfacet {

enum class ErrorCode {
    io_error,
    parse_error,
    duplicate_id,
    validation_error,
    empty_keyword,
    dim_mismatch,
    unknown_dimension,
    bad_page,
    bad_query,
    format_error,
    wrong_pair_count,
    empty_list,
    empty_introduction,
    missing_introduction,
    transport_error,
    parse_failed_after_retries,
    degenerate_input,
    dim_error,
    k_too_large,
    bind_error,
    not_found,
    invalid_config,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library. The code is the stable, machine
/// readable part; the message carries the human detail.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail, std::optional<std::size_t> line = std::nullopt);

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }
    /// 1-based line number for errors raised while reading line-oriented files.
    std::optional<std::size_t> line() const noexcept { return line_; }

private:
    ErrorCode code_;
    std::string detail_;
    std::optional<std::size_t> line_;
};

} // namespace litfacet
