#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace chainstamp {

enum class ErrorCode {
    invalid_hex,
    invalid_length,
    invalid_payload,
    invalid_character,
    checksum_mismatch,
    empty_input,
    window_still_open,
    window_already_closed,
    invalid_address,
    inconsistent_address,
    not_found,
    not_yet_mined,
    unknown_transaction,
    corrupt_record,
    io_error,
    signing_failure,
    config_error,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace chainstamp
