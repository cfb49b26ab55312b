#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace chainstamp {

using UtcSeconds = std::chrono::sys_seconds;
using Clock = std::function<UtcSeconds()>;

inline UtcSeconds utc_from_unix(std::int64_t s) { return UtcSeconds{std::chrono::seconds{s}}; }
inline std::int64_t unix_seconds(UtcSeconds t) { return t.time_since_epoch().count(); }

UtcSeconds system_now();

/// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_rfc3339(UtcSeconds t);

/// Accepts exactly the form produced by format_rfc3339. Throws
/// Error{invalid_payload} otherwise.
UtcSeconds parse_rfc3339(std::string_view text);

} // namespace chainstamp
