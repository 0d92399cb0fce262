/*
 * Copyright 2026 The mmqa Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "http_client.hpp"

#include <httplib.h>

namespace mmqa::detail {

HttpResult post_json(const std::string& url, const nlohmann::json& body, std::chrono::milliseconds timeout) {
    const std::string scheme = "http://";
    if (url.rfind(scheme, 0) != 0) return {std::nullopt, "only http:// endpoints are supported: " + url};
    const auto slash = url.find('/', scheme.size());
    const std::string host = url.substr(0, slash);
    const std::string path = slash == std::string::npos ? "/" : url.substr(slash);

    httplib::Client client(host);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    auto res = client.Post(path, body.dump(), "application/json");
    if (!res) return {std::nullopt, httplib::to_string(res.error())};
    if (res->status != 200) return {std::nullopt, "HTTP status " + std::to_string(res->status)};
    try {
        return {nlohmann::json::parse(res->body), {}};
    } catch (const nlohmann::json::parse_error& e) {
        return {std::nullopt, e.what()};
    }
}

} // namespace mmqa::detail
