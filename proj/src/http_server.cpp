#include "chainstamp/http_server.hpp"

#include "chainstamp/error.hpp"

#include <httplib.h>

#include <atomic>

namespace chainstamp {

namespace {

constexpr std::size_t kMaxRequestBytes = 8 * 1024 * 1024;

void send(httplib::Response& res, const ApiResponse& api)
{
    res.status = api.status;
    res.set_content(api.body, api.content_type);
}

std::optional<std::string> param(const httplib::Request& req, const char* name)
{
    if (!req.has_param(name)) return std::nullopt;
    return req.get_param_value(name);
}

} // namespace

HttpServer::HttpServer(StampService& service) : service_(service), server_(std::make_unique<httplib::Server>())
{
    auto& s = *server_;
    s.set_payload_max_length(kMaxRequestBytes);

    s.Post("/v1/stamps", [this](const httplib::Request& req, httplib::Response& res) {
        send(res, service_.handle_submit(req.body));
    });
    s.Post("/v1/stamps/bulk", [this](const httplib::Request& req, httplib::Response& res) {
        send(res, service_.handle_bulk(req.body));
    });
    s.Get(R"(/v1/stamps/([^/]+)/proof)", [this](const httplib::Request& req, httplib::Response& res) {
        send(res, service_.handle_proof(req.matches[1].str()));
    });
    s.Get(R"(/v1/stamps/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        send(res, service_.handle_status(req.matches[1].str()));
    });
    s.Get("/v1/announcements", [this](const httplib::Request& req, httplib::Response& res) {
        send(res, service_.handle_announcements(param(req, "since"), param(req, "limit")));
    });
    s.Get("/v1/chain", [this](const httplib::Request&, httplib::Response& res) {
        send(res, service_.handle_chain_info());
    });
    s.Get("/v1/chain/headers", [this](const httplib::Request& req, httplib::Response& res) {
        send(res, service_.handle_chain_headers(param(req, "from"), param(req, "to")));
    });
    s.Get(R"(/v1/chain/tx/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        send(res, service_.handle_chain_transaction(req.matches[1].str()));
    });
    s.Get("/v1/chain/export", [this](const httplib::Request&, httplib::Response& res) {
        send(res, service_.handle_chain_export());
    });
    s.Post("/v1/chain/mine", [this](const httplib::Request& req, httplib::Response& res) {
        send(res, service_.handle_mine(req.body));
    });

    s.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (!res.body.empty()) return;
        const auto api = res.status == 404   ? error_response(404, "not_found", "no route for " + req.path)
                         : res.status == 413 ? error_response(413, "too_large", "request body too large")
                                             : error_response(res.status, "http_error", "request failed");
        res.set_content(api.body, api.content_type);
    });
    s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string detail = "unexpected failure";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            detail = e.what();
        } catch (...) {
        }
        send(res, error_response(500, "internal", detail));
    });
}

HttpServer::~HttpServer()
{
    stop();
}

int HttpServer::bind(const std::string& host, int port)
{
    const bool bound = port == 0 ? (port_ = server_->bind_to_any_port(host)) > 0 : server_->bind_to_port(host, port);
    if (!bound) throw Error(ErrorCode::io_error, "cannot bind " + host + ":" + std::to_string(port));
    if (port != 0) port_ = port;
    return port_;
}

void HttpServer::start()
{
    auto done = std::make_shared<std::atomic<bool>>(false);
    thread_ = std::thread([this, done] {
        server_->listen_after_bind();
        *done = true;
    });
    while (!server_->is_running() && !*done) std::this_thread::sleep_for(std::chrono::milliseconds(1));
    if (*done && !server_->is_running()) throw Error(ErrorCode::io_error, "HTTP server failed to start");
}

void HttpServer::run()
{
    server_->listen_after_bind();
}

void HttpServer::stop()
{
    server_->stop();
    if (thread_.joinable()) thread_.join();
}

} // namespace chainstamp
