#include "chainstamp/config.hpp"

#include "chainstamp/address.hpp"
#include "chainstamp/error.hpp"

#include <json.hpp>

#include <array>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace chainstamp {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& detail)
{
    throw Error(ErrorCode::config_error, detail);
}

std::int64_t parse_integer(std::string_view key, std::string_view text)
{
    std::int64_t v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size())
        fail(std::string(key) + ": not an integer: '" + std::string(text) + "'");
    return v;
}

std::int64_t as_integer(std::string_view key, const json& v)
{
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_string()) return parse_integer(key, v.get<std::string>());
    fail(std::string(key) + ": expected an integer");
}

bool as_bool(std::string_view key, const json& v)
{
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "true" || s == "1") return true;
        if (s == "false" || s == "0") return false;
    }
    fail(std::string(key) + ": expected true or false");
}

std::string as_string(std::string_view key, const json& v)
{
    if (!v.is_string()) fail(std::string(key) + ": expected a string");
    return v.get<std::string>();
}

void set_bind(ServiceConfig& c, const std::string& bind)
{
    const auto colon = bind.rfind(':');
    if (colon == std::string::npos || colon == 0) fail("bind: expected host:port, got '" + bind + "'");
    c.host = bind.substr(0, colon);
    const auto port = parse_integer("bind", std::string_view(bind).substr(colon + 1));
    if (port < 0 || port > 65535) fail("bind: port out of range");
    c.port = static_cast<int>(port);
}

void apply(ServiceConfig& c, const std::string& key, const json& v)
{
    if (key == "bind") {
        set_bind(c, as_string(key, v));
    } else if (key == "window_seconds") {
        c.window_seconds = as_integer(key, v);
    } else if (key == "difficulty_bits") {
        const auto bits = as_integer(key, v);
        if (bits < 0 || bits > static_cast<std::int64_t>(kMaxDifficultyBits))
            fail("difficulty_bits must be in [0, " + std::to_string(kMaxDifficultyBits) + "]");
        c.difficulty_bits = static_cast<unsigned>(bits);
    } else if (key == "finality_depth") {
        c.finality_depth = static_cast<int>(as_integer(key, v));
    } else if (key == "fee_satoshi") {
        c.fee_satoshi = as_integer(key, v);
    } else if (key == "dust_satoshi") {
        c.dust_satoshi = as_integer(key, v);
    } else if (key == "btc_price_usd") {
        if (v.is_number()) c.btc_price_usd = parse_decimal(v.dump());
        else c.btc_price_usd = parse_decimal(as_string(key, v));
    } else if (key == "webhook_url") {
        if (v.is_null()) c.webhook_url.reset();
        else {
            auto url = as_string(key, v);
            if (url.empty()) c.webhook_url.reset();
            else c.webhook_url = std::move(url);
        }
    } else if (key == "data_dir") {
        c.data_dir = as_string(key, v);
    } else if (key == "mine_to_finality") {
        c.mine_to_finality = as_bool(key, v);
    } else if (key == "address_version") {
        const auto s = as_string(key, v);
        if (s == "mainnet") c.address_version = kMainnetP2pkh;
        else if (s == "testnet") c.address_version = kTestnetP2pkh;
        else fail("address_version must be mainnet or testnet");
    } else if (key == "tick_milliseconds") {
        c.tick_milliseconds = static_cast<int>(as_integer(key, v));
    } else {
        fail("unknown configuration key '" + key + "'");
    }
}

constexpr std::array kKeys{"bind",         "window_seconds",  "difficulty_bits", "finality_depth",
                           "fee_satoshi",  "dust_satoshi",    "btc_price_usd",   "webhook_url",
                           "data_dir",     "mine_to_finality", "address_version", "tick_milliseconds"};

} // namespace

std::optional<std::string> process_env(const std::string& name)
{
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
}

ServiceConfig parse_config(std::string_view json_text, const ServiceConfig& base)
{
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        fail(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) fail("config must be a JSON object");
    ServiceConfig c = base;
    for (const auto& [key, value] : j.items()) apply(c, key, value);
    return c;
}

ServiceConfig load_config(const std::optional<std::filesystem::path>& file, const EnvLookup& env)
{
    ServiceConfig c;
    if (file) {
        std::ifstream in(*file, std::ios::binary);
        if (!in) fail("cannot read config file " + file->string());
        std::ostringstream text;
        text << in.rdbuf();
        c = parse_config(text.str(), c);
    }
    for (const std::string key : kKeys) {
        std::string name = "CHAINSTAMP_";
        for (char ch : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        if (auto v = env(name)) apply(c, key, json(*v));
    }
    validate_config(c);
    return c;
}

void validate_config(const ServiceConfig& c)
{
    if (c.host.empty()) fail("bind host is empty");
    if (c.window_seconds <= 0) fail("window_seconds must be positive");
    if (c.difficulty_bits > kMaxDifficultyBits) fail("difficulty_bits out of range");
    if (c.finality_depth < 1) fail("finality_depth must be at least 1");
    if (c.dust_satoshi < 1) fail("dust_satoshi must be at least 1");
    if (c.fee_satoshi < 0) fail("fee_satoshi must not be negative");
    if (c.btc_price_usd < 0) fail("btc_price_usd must not be negative");
    if (c.tick_milliseconds < 1) fail("tick_milliseconds must be positive");
    if (c.webhook_url && !c.webhook_url->starts_with("http://")) fail("webhook_url must be an http:// URL");
}

} // namespace chainstamp
