#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "jasmine/session.hpp"

namespace jasmine {

struct HttpResponse {
  int status = 200;
  std::string body;  ///< JSON
};

/// Route one request to the session service. Paths:
///   POST /sessions
///   GET  /sessions/{id}
///   GET  /sessions/{id}/batch
///   POST /sessions/{id}/labels
///   GET  /sessions/{id}/metrics
/// Errors come back as {"error": {"code", "message", "field"}}.
HttpResponse handle_request(SessionService& service, std::string_view method, std::string_view path,
                            std::string_view body);

/// Threaded HTTP front end over handle_request.
class HttpServer {
 public:
  explicit HttpServer(SessionService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Bind to host:port (port 0 picks a free port). Returns the bound port or
  /// -1 on failure.
  int bind(const std::string& host, int port);
  /// Serve until stop(); call after bind().
  bool listen();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace jasmine
