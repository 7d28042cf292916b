#pragma once

#include <algorithm>
#include <cctype>
#include <string>

#include <httplib.h>

#include "lexboot/service.hpp"

namespace lexboot {

/// Serves a Service over HTTP/1.1 with cpp-httplib's worker pool.
class HttpServer {
public:
    explicit HttpServer(Service& service) : service_(service) {
        auto handler = [this](const httplib::Request& req, httplib::Response& res) { serve(req, res); };
        server_.Get(".*", handler);
        server_.Post(".*", handler);
        server_.Options(".*", handler);
        server_.set_payload_max_length(8 * 1024 * 1024);
    }

    /// Binds host:port; port 0 picks a free port. Returns the bound port.
    int bind(const std::string& host, int port) {
        if (port == 0) {
            port_ = server_.bind_to_any_port(host);
        } else {
            port_ = server_.bind_to_port(host, port) ? port : -1;
        }
        if (port_ < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
        return port_;
    }

    /// Blocks until stop() is called.
    void run() { server_.listen_after_bind(); }
    void stop() { server_.stop(); }
    void wait_until_ready() const { server_.wait_until_ready(); }
    int port() const noexcept { return port_; }

private:
    void serve(const httplib::Request& req, httplib::Response& res) {
        ApiRequest api;
        api.method = req.method;
        api.path = req.path;
        api.body = req.body;
        for (const auto& [k, v] : req.params) api.query.emplace(k, v);
        for (const auto& [k, v] : req.headers) {
            std::string key = k;
            std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
            api.headers.emplace(std::move(key), v);
        }
        const ApiResponse out = service_.handle(api);
        res.status = out.status;
        for (const auto& [k, v] : out.headers) res.set_header(k, v);
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type, If-Match, X-Annotator-Id");
        res.set_header("Access-Control-Expose-Headers", "ETag, Location");
        if (!out.body.empty()) res.set_content(out.body, out.content_type + "; charset=utf-8");
    }

    Service& service_;
    httplib::Server server_;
    int port_ = -1;
};

}  // namespace lexboot
