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

#include "atomgraph/http_client.hpp"

#include <httplib.h>

#include "atomgraph/errors.hpp"

namespace atomgraph {

ParsedUrl parse_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw InvalidArgument("URL has no scheme: " + url);
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw InvalidArgument("unsupported URL scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

HttpResponse post_json(const std::string& url,
                       const std::vector<std::pair<std::string, std::string>>& headers,
                       const std::string& body, std::chrono::seconds timeout) {
  const auto parsed = parse_url(url);
  httplib::Client client(parsed.origin);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  httplib::Headers hdrs;
  for (const auto& [k, v] : headers) hdrs.emplace(k, v);
  auto result = client.Post(parsed.path, hdrs, body, "application/json");
  if (!result) {
    throw RetryableError("request to " + url + " failed: " + httplib::to_string(result.error()));
  }
  return {result->status, result->body};
}

void raise_for_status(const HttpResponse& response, const std::string& context) {
  const int s = response.status;
  if (s >= 200 && s < 300) return;
  std::string msg = context + ": HTTP " + std::to_string(s);
  if (!response.body.empty()) msg += ": " + response.body.substr(0, 512);
  if (s == 401 || s == 403) throw AuthError(msg);
  if (s == 408 || s == 429 || s >= 500) throw RetryableError(msg);
  throw BackendError(msg);
}

}  // namespace atomgraph
