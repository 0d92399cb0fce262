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

#include <nlohmann/json.hpp>

#include "mmqa/composer.hpp"
#include "mmqa/dataset_io.hpp"
#include "mmqa/distractor.hpp"
#include "mmqa/qgen_atomic.hpp"

namespace mmqa {

nlohmann::json to_json(const AnswerList& answers);
AnswerList answer_list_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AtomicQuestion& question);
AtomicQuestion atomic_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Program& program);
Program program_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Paragraph& paragraph);
Paragraph paragraph_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ImageRef& image);
ImageRef image_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Table& table);
Table table_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AssembledContext& context);
AssembledContext assembled_context_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Example& example);
Example example_from_json(const nlohmann::json& j);

} // namespace mmqa
