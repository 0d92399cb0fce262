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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mmqa/qgen_atomic.hpp"

namespace mmqa {

enum class Operation { atomic, compose, intersect, compare };
enum class Combine { none, intersect, compare };

// Answerer modalities. Single images and image lists share one answerer.
Modality answerer_modality(Modality modality);

struct Hop {
    Modality modality = Modality::table;
    bool final = false;
    bool operator==(const Hop&) const = default;
};

struct HopPlan {
    std::string question_type;
    std::vector<Hop> hops;
    Combine combine = Combine::none;

    Modality final_modality() const { return hops.back().modality; }
    bool two_hop() const { return hops.size() == 2; }
    bool operator==(const HopPlan&) const = default;
};

// One registry entry. `slots` lists the leaf modalities in argument order:
// Compose(outer, inner), Intersect(left, right), Compare(left, right).
struct TemplateSpec {
    std::string label;
    Operation operation = Operation::atomic;
    std::vector<Modality> slots;
    Modality final_modality = Modality::table;
    HopPlan hop_plan;
};

class TemplateRegistry {
public:
    TemplateRegistry() = default;
    explicit TemplateRegistry(std::vector<TemplateSpec> templates);

    static TemplateRegistry from_json(const nlohmann::json& document);
    static TemplateRegistry load(const std::filesystem::path& path);
    // The registry shipped as data/templates.json, compiled in.
    static const TemplateRegistry& builtin();

    const std::vector<TemplateSpec>& templates() const { return templates_; }
    const TemplateSpec* find(std::string_view label) const;
    const TemplateSpec& at(std::string_view label) const;  // throws SchemaError
    std::vector<std::string> labels() const;
    std::size_t size() const { return templates_.size(); }

private:
    std::vector<TemplateSpec> templates_;
};

std::string_view to_string(Operation op);
Operation operation_from_string(std::string_view name);
std::string_view to_string(Combine combine);
Combine combine_from_string(std::string_view name);

} // namespace mmqa
