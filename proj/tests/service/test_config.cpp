#include "chainstamp/config.hpp"
#include "chainstamp/error.hpp"

#include "../support/test_util.hpp"

#include <doctest.h>

#include <fstream>
#include <map>

using namespace chainstamp;

namespace {

EnvLookup env_of(std::map<std::string, std::string> vars)
{
    return [vars = std::move(vars)](const std::string& name) -> std::optional<std::string> {
        if (auto it = vars.find(name); it != vars.end()) return it->second;
        return std::nullopt;
    };
}

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::io_error;
}

} // namespace

TEST_CASE("defaults")
{
    const auto c = load_config(std::nullopt, env_of({}));
    CHECK(c.port == kDefaultPort);
    CHECK(c.window_seconds == 86'400);
    CHECK(c.finality_depth == 5);
    CHECK(c.fee_satoshi == 10'000);
    CHECK(c.dust_satoshi == 1);
    CHECK(c.btc_price_usd == 250);
    CHECK_FALSE(c.webhook_url.has_value());
}

TEST_CASE("file then environment")
{
    testutil::TempDir dir("config");
    const auto path = dir / "config.json";
    std::ofstream(path) << R"({"bind":"0.0.0.0:9000","window_seconds":2,"difficulty_bits":12,
                              "btc_price_usd":"612.35","webhook_url":"http://127.0.0.1:1/hook",
                              "address_version":"testnet","mine_to_finality":false})";
    auto c = load_config(path, env_of({}));
    CHECK(c.host == "0.0.0.0");
    CHECK(c.port == 9000);
    CHECK(c.window_seconds == 2);
    CHECK(c.difficulty_bits == 12);
    CHECK(c.btc_price_usd == Rational(12247, 20));
    CHECK(c.webhook_url == "http://127.0.0.1:1/hook");
    CHECK(c.address_version == 0x6f);
    CHECK_FALSE(c.mine_to_finality);

    c = load_config(path, env_of({{"CHAINSTAMP_WINDOW_SECONDS", "60"},
                                  {"CHAINSTAMP_FINALITY_DEPTH", "6"},
                                  {"CHAINSTAMP_MINE_TO_FINALITY", "true"},
                                  {"CHAINSTAMP_WEBHOOK_URL", ""}}));
    CHECK(c.window_seconds == 60);
    CHECK(c.finality_depth == 6);
    CHECK(c.mine_to_finality);
    CHECK_FALSE(c.webhook_url.has_value());
}

TEST_CASE("invalid configuration")
{
    testutil::TempDir dir("config-bad");
    const auto path = dir / "config.json";
    const auto with = [&](const std::string& text) {
        std::ofstream(path, std::ios::trunc) << text;
        return code_of([&] { load_config(path, env_of({})); });
    };
    CHECK(with("{") == ErrorCode::config_error);
    CHECK(with("[]") == ErrorCode::config_error);
    CHECK(with(R"({"window_seconds":0})") == ErrorCode::config_error);
    CHECK(with(R"({"difficulty_bits":29})") == ErrorCode::config_error);
    CHECK(with(R"({"bind":"nohost"})") == ErrorCode::config_error);
    CHECK(with(R"({"surprise":1})") == ErrorCode::config_error);
    CHECK(with(R"({"btc_price_usd":"-3"})") == ErrorCode::config_error);
    CHECK(with(R"({"webhook_url":"ftp://x"})") == ErrorCode::config_error);
    CHECK(code_of([&] { load_config(dir / "missing.json", env_of({})); }) == ErrorCode::config_error);
    CHECK(code_of([&] { load_config(std::nullopt, env_of({{"CHAINSTAMP_DUST_SATOSHI", "one"}})); }) ==
          ErrorCode::config_error);
}
