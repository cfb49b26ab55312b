#pragma once

// Public evidence right after submission: every new digest is appended to a
// public log ("<RFC3339> <64hex>\n") and optionally POSTed to a webhook.
// Announcements are not proof; the verifier never consults them.

#include "chainstamp/digest.hpp"
#include "chainstamp/timeutil.hpp"

#include <condition_variable>
#include <deque>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace chainstamp {

enum class AnnouncementSink { public_log, webhook };

std::string_view to_string(AnnouncementSink sink) noexcept;

struct AnnouncementEntry {
    Digest32 document_hash;
    UtcSeconds announced_at;
    AnnouncementSink sink = AnnouncementSink::public_log;

    friend bool operator==(const AnnouncementEntry&, const AnnouncementEntry&) = default;
};

std::string format_announcement_line(const Digest32& hash, UtcSeconds at);
/// Throws Error{corrupt_record}.
AnnouncementEntry parse_announcement_line(std::string_view line);

struct WebhookTarget {
    std::string scheme_host_port;
    std::string path;
};

/// "http://host[:port][/path]". Throws Error{config_error}.
WebhookTarget parse_webhook_url(const std::string& url);

class Announcer {
public:
    /// An empty log path keeps the public log in memory only.
    explicit Announcer(std::filesystem::path log_path = {}, std::optional<std::string> webhook_url = {});
    ~Announcer();
    Announcer(const Announcer&) = delete;
    Announcer& operator=(const Announcer&) = delete;

    /// Appends to the public log synchronously; the webhook POST is queued.
    void announce(const Digest32& hash, UtcSeconds now);

    /// Entries in announcement order, at or after `since`, at most `limit`.
    std::vector<AnnouncementEntry> entries(std::optional<UtcSeconds> since = {}, std::size_t limit = SIZE_MAX) const;

    /// Blocks until the webhook queue is drained (tests and shutdown).
    void flush();

private:
    void run_webhook();

    std::filesystem::path path_;
    std::optional<WebhookTarget> webhook_;
    std::ofstream log_;
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::condition_variable drained_;
    std::vector<AnnouncementEntry> entries_;
    std::deque<AnnouncementEntry> outbox_;
    bool in_flight_ = false;
    bool stopping_ = false;
    std::thread worker_;
};

} // namespace chainstamp
