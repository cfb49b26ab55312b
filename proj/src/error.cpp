#include "chainstamp/error.hpp"

namespace chainstamp {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::invalid_hex: return "invalid_hex";
    case ErrorCode::invalid_length: return "invalid_length";
    case ErrorCode::invalid_payload: return "invalid_payload";
    case ErrorCode::invalid_character: return "invalid_character";
    case ErrorCode::checksum_mismatch: return "checksum_mismatch";
    case ErrorCode::empty_input: return "empty_input";
    case ErrorCode::window_still_open: return "window_still_open";
    case ErrorCode::window_already_closed: return "window_already_closed";
    case ErrorCode::invalid_address: return "invalid_address";
    case ErrorCode::inconsistent_address: return "inconsistent_address";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::not_yet_mined: return "not_yet_mined";
    case ErrorCode::unknown_transaction: return "unknown_transaction";
    case ErrorCode::corrupt_record: return "corrupt_record";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::signing_failure: return "signing_failure";
    case ErrorCode::config_error: return "config_error";
    }
    return "unknown";
}

} // namespace chainstamp
