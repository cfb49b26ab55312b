#pragma once

// Service configuration: an optional JSON file, then CHAINSTAMP_* environment
// overrides. Invalid values raise Error{config_error}.

#include "chainstamp/aggregator.hpp"
#include "chainstamp/chain.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

namespace chainstamp {

inline constexpr int kDefaultPort = 8841;

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = kDefaultPort;
    std::int64_t window_seconds = 86'400;
    unsigned difficulty_bits = kDefaultDifficultyBits;
    int finality_depth = 5;
    Satoshi fee_satoshi = 10'000;
    Satoshi dust_satoshi = 1;
    Rational btc_price_usd = 250;
    std::optional<std::string> webhook_url;
    /// Empty keeps chain, ledger and announcements in memory.
    std::filesystem::path data_dir;
    /// Mine each commitment to finality_depth right away (simulator demo
    /// mode); otherwise blocks come from explicit mine requests.
    bool mine_to_finality = true;
    std::uint8_t address_version = 0x00;
    int tick_milliseconds = 200;

    CostModel cost_model() const { return {dust_satoshi, fee_satoshi, btc_price_usd}; }
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

std::optional<std::string> process_env(const std::string& name);

/// Keys: bind ("host:port"), window_seconds, difficulty_bits, finality_depth,
/// fee_satoshi, dust_satoshi, btc_price_usd, webhook_url, data_dir,
/// mine_to_finality, address_version ("mainnet"|"testnet"),
/// tick_milliseconds. Unknown keys are rejected.
ServiceConfig parse_config(std::string_view json_text, const ServiceConfig& base = {});

/// Reads `file` when given, then applies CHAINSTAMP_<KEY> overrides.
ServiceConfig load_config(const std::optional<std::filesystem::path>& file, const EnvLookup& env = process_env);

/// Throws config_error for out-of-range values.
void validate_config(const ServiceConfig& config);

} // namespace chainstamp
