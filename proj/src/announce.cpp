#include "chainstamp/announce.hpp"

#include "chainstamp/error.hpp"

#include <httplib.h>
#include <json.hpp>

#include <iostream>

namespace chainstamp {

std::string_view to_string(AnnouncementSink sink) noexcept
{
    return sink == AnnouncementSink::webhook ? "webhook" : "public_log";
}

std::string format_announcement_line(const Digest32& hash, UtcSeconds at)
{
    return format_rfc3339(at) + " " + hash.hex() + "\n";
}

AnnouncementEntry parse_announcement_line(std::string_view line)
{
    if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
    const auto space = line.find(' ');
    if (space == std::string_view::npos) throw Error(ErrorCode::corrupt_record, "announcement line without separator");
    try {
        return {Digest32::from_hex(line.substr(space + 1)), parse_rfc3339(line.substr(0, space)),
                AnnouncementSink::public_log};
    } catch (const Error& e) {
        throw Error(ErrorCode::corrupt_record, std::string("bad announcement line: ") + e.what());
    }
}

WebhookTarget parse_webhook_url(const std::string& url)
{
    constexpr std::string_view scheme = "http://";
    if (!url.starts_with(scheme)) throw Error(ErrorCode::config_error, "webhook_url must start with http://");
    const auto slash = url.find('/', scheme.size());
    WebhookTarget t;
    t.scheme_host_port = url.substr(0, slash);
    t.path = slash == std::string::npos ? "/" : url.substr(slash);
    if (t.scheme_host_port.size() == scheme.size()) throw Error(ErrorCode::config_error, "webhook_url has no host");
    return t;
}

Announcer::Announcer(std::filesystem::path log_path, std::optional<std::string> webhook_url)
    : path_(std::move(log_path))
{
    if (webhook_url) webhook_ = parse_webhook_url(*webhook_url);
    if (!path_.empty()) {
        if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
        std::ifstream in(path_, std::ios::binary);
        std::string line;
        bool torn = false;
        while (std::getline(in, line)) {
            torn = in.eof();
            if (line.empty()) continue;
            try {
                entries_.push_back(parse_announcement_line(line));
            } catch (const Error&) {
                // a torn final line from a crash
            }
        }
        log_.open(path_, std::ios::app | std::ios::binary);
        if (!log_) throw Error(ErrorCode::io_error, "cannot open announcement log " + path_.string());
        if (torn) log_ << '\n' << std::flush;
    }
    if (webhook_) worker_ = std::thread([this] { run_webhook(); });
}

Announcer::~Announcer()
{
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
    }
    cv_.notify_all();
    if (worker_.joinable()) worker_.join();
}

void Announcer::announce(const Digest32& hash, UtcSeconds now)
{
    AnnouncementEntry entry{hash, now, AnnouncementSink::public_log};
    {
        std::lock_guard lock(mutex_);
        if (log_.is_open()) {
            log_ << format_announcement_line(hash, now) << std::flush;
            if (!log_) throw Error(ErrorCode::io_error, "announcement log write failed");
        }
        entries_.push_back(entry);
        if (webhook_) outbox_.push_back(entry);
    }
    cv_.notify_one();
}

std::vector<AnnouncementEntry> Announcer::entries(std::optional<UtcSeconds> since, std::size_t limit) const
{
    std::lock_guard lock(mutex_);
    std::vector<AnnouncementEntry> out;
    for (const auto& e : entries_) {
        if (out.size() >= limit) break;
        if (!since || e.announced_at >= *since) out.push_back(e);
    }
    return out;
}

void Announcer::flush()
{
    std::unique_lock lock(mutex_);
    drained_.wait(lock, [&] { return (outbox_.empty() && !in_flight_) || !worker_.joinable(); });
}

void Announcer::run_webhook()
{
    httplib::Client client(webhook_->scheme_host_port);
    client.set_connection_timeout(2);
    client.set_read_timeout(2);
    std::unique_lock lock(mutex_);
    for (;;) {
        cv_.wait(lock, [&] { return stopping_ || !outbox_.empty(); });
        if (outbox_.empty()) break;
        const AnnouncementEntry entry = outbox_.front();
        outbox_.pop_front();
        in_flight_ = true;
        lock.unlock();

        const nlohmann::json body{{"document_hash", entry.document_hash.hex()},
                                  {"announced_at", format_rfc3339(entry.announced_at)}};
        const auto res = client.Post(webhook_->path, body.dump(), "application/json");
        const bool delivered = res && res->status >= 200 && res->status < 300;
        if (!delivered)
            std::cerr << "webhook delivery failed for " << entry.document_hash.hex() << "\n";

        lock.lock();
        in_flight_ = false;
        if (delivered) entries_.push_back({entry.document_hash, entry.announced_at, AnnouncementSink::webhook});
        if (outbox_.empty()) drained_.notify_all();
    }
    drained_.notify_all();
}

} // namespace chainstamp
