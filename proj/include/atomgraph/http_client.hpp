// Copyright 2026 The atomgraph Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace atomgraph {

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Splits "https://host:port/base/path" into the origin httplib wants and the
// request path.
struct ParsedUrl {
  std::string origin;
  std::string path;
};
ParsedUrl parse_url(const std::string& url);

// POSTs a JSON body. Connection-level failures raise RetryableError; HTTP
// status codes are returned to the caller untouched.
HttpResponse post_json(const std::string& url,
                       const std::vector<std::pair<std::string, std::string>>& headers,
                       const std::string& body, std::chrono::seconds timeout);

// Maps a status code onto the error taxonomy: 2xx returns, 401/403 throw
// AuthError, 408/429/5xx throw RetryableError, other codes throw BackendError.
void raise_for_status(const HttpResponse& response, const std::string& context);

// Runs `attempt` up to `max_attempts` times, sleeping initial_backoff * 2^i
// between tries. Only RetryableError triggers another attempt.
template <typename F>
auto with_retries(int max_attempts, std::chrono::milliseconds initial_backoff, F&& attempt)
    -> decltype(attempt());

}  // namespace atomgraph

#include "atomgraph/http_client_inl.hpp"
