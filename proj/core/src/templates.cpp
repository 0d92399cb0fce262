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

#include "mmqa/templates.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "mmqa/errors.hpp"

namespace mmqa {

namespace detail {
extern const std::string_view builtin_templates_json;
}

using nlohmann::json;

Modality answerer_modality(Modality modality) {
    return modality == Modality::image_list ? Modality::image : modality;
}

std::string_view to_string(Operation op) {
    switch (op) {
    case Operation::atomic: return "atomic";
    case Operation::compose: return "compose";
    case Operation::intersect: return "intersect";
    case Operation::compare: return "compare";
    }
    return "atomic";
}

Operation operation_from_string(std::string_view name) {
    if (name == "atomic") return Operation::atomic;
    if (name == "compose") return Operation::compose;
    if (name == "intersect") return Operation::intersect;
    if (name == "compare") return Operation::compare;
    throw SchemaError("unknown operation '" + std::string(name) + "'");
}

std::string_view to_string(Combine combine) {
    switch (combine) {
    case Combine::none: return "none";
    case Combine::intersect: return "intersect";
    case Combine::compare: return "compare";
    }
    return "none";
}

Combine combine_from_string(std::string_view name) {
    if (name == "none") return Combine::none;
    if (name == "intersect") return Combine::intersect;
    if (name == "compare") return Combine::compare;
    throw SchemaError("unknown combine '" + std::string(name) + "'");
}

TemplateRegistry::TemplateRegistry(std::vector<TemplateSpec> templates) : templates_(std::move(templates)) {
    for (std::size_t i = 0; i < templates_.size(); ++i) {
        const auto& t = templates_[i];
        for (std::size_t j = 0; j < i; ++j) {
            if (templates_[j].label == t.label) throw SchemaError("duplicate template label '" + t.label + "'");
        }
        const std::size_t want = t.operation == Operation::atomic ? 1 : 2;
        if (t.slots.size() != want) throw SchemaError("template '" + t.label + "' has the wrong number of slots");
        if (t.hop_plan.hops.empty() || t.hop_plan.hops.size() > 2) {
            throw SchemaError("template '" + t.label + "' needs one or two hops");
        }
        if (!t.hop_plan.hops.back().final) throw SchemaError("template '" + t.label + "' must end on a final hop");
        if (answerer_modality(t.final_modality) != t.hop_plan.final_modality()) {
            throw SchemaError("template '" + t.label + "' final modality disagrees with its hop plan");
        }
    }
}

TemplateRegistry TemplateRegistry::from_json(const json& document) {
    if (!document.is_object() || !document.contains("templates") || !document["templates"].is_array()) {
        throw SchemaError("template registry must be an object with a 'templates' array");
    }
    std::vector<TemplateSpec> out;
    for (const auto& t : document["templates"]) {
        TemplateSpec spec;
        try {
            spec.label = t.at("label").get<std::string>();
            spec.operation = operation_from_string(t.at("operation").get<std::string>());
            for (const auto& s : t.at("slots")) spec.slots.push_back(modality_from_string(s.get<std::string>()));
            spec.final_modality = modality_from_string(t.at("final_modality").get<std::string>());
            const auto& plan = t.at("hop_plan");
            spec.hop_plan.question_type = spec.label;
            spec.hop_plan.combine = combine_from_string(plan.value("combine", "none"));
            for (const auto& h : plan.at("hops")) {
                const std::string role = h.at("role").get<std::string>();
                if (role != "final" && role != "intermediate") throw SchemaError("unknown hop role '" + role + "'");
                spec.hop_plan.hops.push_back(
                    Hop{answerer_modality(modality_from_string(h.at("modality").get<std::string>())), role == "final"});
            }
        } catch (const json::exception& e) {
            throw SchemaError(std::string("malformed template entry: ") + e.what());
        }
        out.push_back(std::move(spec));
    }
    return TemplateRegistry(std::move(out));
}

TemplateRegistry TemplateRegistry::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open template registry " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
    return from_json(doc);
}

const TemplateRegistry& TemplateRegistry::builtin() {
    static const TemplateRegistry registry = from_json(json::parse(detail::builtin_templates_json));
    return registry;
}

const TemplateSpec* TemplateRegistry::find(std::string_view label) const {
    for (const auto& t : templates_) {
        if (t.label == label) return &t;
    }
    return nullptr;
}

const TemplateSpec& TemplateRegistry::at(std::string_view label) const {
    if (const auto* t = find(label)) return *t;
    throw SchemaError("unknown question type '" + std::string(label) + "'");
}

std::vector<std::string> TemplateRegistry::labels() const {
    std::vector<std::string> out;
    for (const auto& t : templates_) out.push_back(t.label);
    return out;
}

} // namespace mmqa
