#pragma once

// Live HTTP(S) transport for the formalizer client. Including this header
// pulls in cpp-httplib; define CPPHTTPLIB_OPENSSL_SUPPORT and link OpenSSL
// to reach https endpoints.

#include <chrono>
#include <string>

#include "httplib.h"
#include "reqeq/formalizer.hpp"

namespace reqeq {

class HttplibTransport final : public HttpTransport {
 public:
  HttpResponse post(const HttpRequest& request) override {
    const auto scheme_end = request.url.find("://");
    if (scheme_end == std::string::npos) throw Error(ErrorCode::Usage, "endpoint '" + request.url + "' has no scheme");
    const auto path_start = request.url.find('/', scheme_end + 3);
    const std::string origin = request.url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : request.url.substr(path_start);

    httplib::Client client(origin);
    const auto seconds = std::chrono::duration<double>(request.timeout_seconds);
    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(seconds);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    httplib::Headers headers;
    for (const auto& [k, v] : request.headers)
      if (k != "Content-Type") headers.emplace(k, v);

    const auto start = std::chrono::steady_clock::now();
    auto result = client.Post(path, headers, request.body.dump(), "application/json");
    if (!result) {
      const auto elapsed = std::chrono::steady_clock::now() - start;
      const bool timed_out = result.error() == httplib::Error::ConnectionTimeout ||
                             (result.error() == httplib::Error::Read && elapsed >= seconds * 0.95);
      if (timed_out) throw Error(ErrorCode::Timeout, "no response from " + origin + " within the timeout");
      throw Error(ErrorCode::ServiceUnreachable, origin + ": " + httplib::to_string(result.error()));
    }
    return HttpResponse{result->status, result->body};
  }
};

}  // namespace reqeq
