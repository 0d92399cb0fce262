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


#pragma once

#include <chrono>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace mmqa::detail {

struct HttpResult {
    std::optional<nlohmann::json> body;
    std::string error;
};

// POSTs a JSON body to an http://host:port/path URL.
HttpResult post_json(const std::string& url, const nlohmann::json& body, std::chrono::milliseconds timeout);

} // namespace mmqa::detail
