#pragma once

// HTTP/1.1 front door for StampService.
//
//   POST /v1/stamps                 {"hash","priority"?}
//   POST /v1/stamps/bulk            {"hashes":[...],"priority"?}
//   GET  /v1/stamps/{hash}
//   GET  /v1/stamps/{hash}/proof
//   GET  /v1/announcements          ?since=<RFC3339>&limit=<n>
//   GET  /v1/chain                  tip and parameters
//   GET  /v1/chain/headers          ?from=<h>&to=<h>
//   GET  /v1/chain/tx/{txid}
//   GET  /v1/chain/export           chain file records
//   POST /v1/chain/mine             {"blocks":n}

#include "chainstamp/service.hpp"

#include <memory>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace chainstamp {

class HttpServer {
public:
    explicit HttpServer(StampService& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds without serving yet. Port 0 picks a free port. Returns the
    /// bound port; throws Error{io_error} when binding fails.
    int bind(const std::string& host, int port);

    /// Serves on a background thread.
    void start();
    /// Serves on the calling thread until stop().
    void run();
    void stop();

    int port() const noexcept { return port_; }

private:
    StampService& service_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = -1;
};

} // namespace chainstamp
