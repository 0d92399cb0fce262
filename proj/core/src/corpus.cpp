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

#include "mmqa/corpus.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "mmqa/errors.hpp"
#include "mmqa/text.hpp"

namespace mmqa {

using nlohmann::json;

const Context* Corpus::find_context(std::string_view id) const {
    for (const auto& c : contexts) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

std::set<std::string> Corpus::entity_titles() const {
    std::set<std::string> out;
    for (const auto& c : contexts) {
        for (const auto& e : c.entities) out.insert(e.title);
    }
    return out;
}

std::vector<Paragraph> read_paragraph_pool(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open paragraph pool " + path.string());
    std::vector<Paragraph> out;
    std::set<std::string> ids;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (text::trim(line).empty()) continue;
        try {
            const json j = json::parse(line);
            Paragraph p{j.at("id").get<std::string>(), j.at("article_title").get<std::string>(),
                        j.at("text").get<std::string>(), Role::unassigned};
            if (!ids.insert(p.id).second) throw ValidationError("duplicate pool paragraph '" + p.id + "'");
            if (text::trim(p.text).empty()) throw ValidationError("empty pool paragraph '" + p.id + "'");
            out.push_back(std::move(p));
        } catch (const json::exception& e) {
            throw SchemaError(path.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

Corpus load_corpus(const std::filesystem::path& path) {
    const auto manifest_path = std::filesystem::is_directory(path) ? path / "manifest.json" : path;
    std::ifstream in(manifest_path);
    if (!in) throw Error("cannot open corpus manifest " + manifest_path.string());
    json m;
    try {
        m = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(manifest_path.string() + ": " + e.what());
    }
    Corpus c;
    c.root = manifest_path.parent_path();
    try {
        c.name = m.value("name", c.root.filename().string());
        for (const auto& p : m.at("contexts")) c.contexts.push_back(load_context(c.root / p.get<std::string>()));
        auto optional_path = [&](const char* key) -> std::optional<std::filesystem::path> {
            if (!m.contains(key) || m[key].is_null()) return std::nullopt;
            return c.root / m[key].get<std::string>();
        };
        if (auto p = optional_path("rc_triples")) c.triples = read_rc_triples(*p);
        if (auto p = optional_path("image_bank")) c.image_bank = read_image_bank(*p);
        if (auto p = optional_path("vocabulary")) c.vocabulary = read_vocabulary(*p);
        if (auto p = optional_path("blocklist")) c.blocklist = read_blocklist(*p);
        if (auto p = optional_path("pool")) c.pool = read_paragraph_pool(*p);
    } catch (const json::exception& e) {
        throw SchemaError(manifest_path.string() + ": " + e.what());
    }
    std::sort(c.contexts.begin(), c.contexts.end(), [](const Context& a, const Context& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < c.contexts.size(); ++i) {
        if (c.contexts[i].id == c.contexts[i - 1].id) throw ValidationError("duplicate context id '" + c.contexts[i].id + "'");
    }
    return c;
}

} // namespace mmqa
