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

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "mmqa/context_linker.hpp"
#include "mmqa/context_model.hpp"
#include "mmqa/qgen_atomic.hpp"

namespace mmqa {

// Everything generation reads: contexts plus the single-modality question
// banks and the distractor paragraph pool.
struct Corpus {
    std::filesystem::path root;
    std::string name;
    std::vector<Context> contexts;  // sorted by id
    std::vector<RCTriple> triples;
    std::vector<ImageBankRecord> image_bank;
    std::set<std::string> vocabulary;
    std::set<std::string> blocklist;
    std::vector<Paragraph> pool;

    const Context* find_context(std::string_view id) const;
    std::set<std::string> entity_titles() const;
};

// `path` is a corpus directory holding manifest.json, or the manifest
// itself. Manifest keys: name, contexts[], rc_triples, image_bank,
// vocabulary, blocklist, pool; paths are relative to the manifest.
Corpus load_corpus(const std::filesystem::path& path);

// JSON lines of {id, article_title, text}.
std::vector<Paragraph> read_paragraph_pool(const std::filesystem::path& path);

} // namespace mmqa
