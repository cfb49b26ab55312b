#include "chainstamp/announce.hpp"
#include "chainstamp/error.hpp"

#include "../support/test_util.hpp"

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <thread>

using namespace chainstamp;

TEST_CASE("announcement lines")
{
    const auto h = sha256("abc");
    const auto line = format_announcement_line(h, utc_from_unix(1'400'000'000));
    CHECK(line == "2014-05-13T16:53:20Z " + h.hex() + "\n");
    const auto e = parse_announcement_line(line);
    CHECK(e.document_hash == h);
    CHECK(e.announced_at == utc_from_unix(1'400'000'000));
    CHECK_THROWS_AS(parse_announcement_line("garbage"), Error);
}

TEST_CASE("public log is durable and tolerates a torn line")
{
    testutil::TempDir dir("announce");
    const auto path = dir / "announcements.log";
    {
        Announcer a(path);
        a.announce(sha256("1"), utc_from_unix(10));
        a.announce(sha256("2"), utc_from_unix(11));
    }
    std::ofstream(path, std::ios::app) << "2014-05-13T16:5";
    {
        Announcer a(path);
        CHECK(a.entries().size() == 2);
        a.announce(sha256("3"), utc_from_unix(12));
    }
    Announcer a(path);
    const auto entries = a.entries();
    REQUIRE(entries.size() == 3);
    CHECK(entries[2].document_hash == sha256("3"));
    CHECK(a.entries(utc_from_unix(11)).size() == 2);
    CHECK(a.entries(std::nullopt, 1).size() == 1);
}

TEST_CASE("webhook delivery")
{
    httplib::Server hook;
    std::mutex m;
    std::vector<nlohmann::json> received;
    hook.Post("/hook", [&](const httplib::Request& req, httplib::Response& res) {
        std::lock_guard lock(m);
        received.push_back(nlohmann::json::parse(req.body));
        res.status = 204;
    });
    const int port = hook.bind_to_any_port("127.0.0.1");
    std::thread t([&] { hook.listen_after_bind(); });
    hook.wait_until_ready();

    {
        Announcer a({}, "http://127.0.0.1:" + std::to_string(port) + "/hook");
        a.announce(sha256("x"), utc_from_unix(100));
        a.announce(sha256("y"), utc_from_unix(101));
        a.flush();
        const auto entries = a.entries();
        REQUIRE(entries.size() == 4);
        CHECK(std::count_if(entries.begin(), entries.end(),
                            [](const auto& e) { return e.sink == AnnouncementSink::webhook; }) == 2);
        CHECK(entries[0].document_hash == sha256("x"));
        CHECK(entries[0].sink == AnnouncementSink::public_log);
    }
    hook.stop();
    t.join();
    REQUIRE(received.size() == 2);
    CHECK(received[0]["document_hash"] == sha256("x").hex());
    CHECK(received[0]["announced_at"] == "1970-01-01T00:01:40Z");
}

TEST_CASE("unreachable webhook does not block the public log")
{
    Announcer a({}, "http://127.0.0.1:1/hook");
    a.announce(sha256("x"), utc_from_unix(100));
    a.flush();
    const auto entries = a.entries();
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].sink == AnnouncementSink::public_log);
    CHECK_THROWS_AS(parse_webhook_url("https://example.com"), Error);
    CHECK(parse_webhook_url("http://h:8/a/b").path == "/a/b");
    CHECK(parse_webhook_url("http://h:8").path == "/");
}
