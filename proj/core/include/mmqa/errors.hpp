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

#include <stdexcept>
#include <string>

namespace mmqa {

// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input document does not match the expected schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

// A cross-reference (entity, image, paragraph, qid) does not resolve.
class ReferenceError : public Error {
public:
    using Error::Error;
};

// A value violates a domain invariant or operation precondition.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Program construction or execution failed (Compose/Intersect/Compare preconditions).
class CompositionError : public Error {
public:
    using Error::Error;
};

// Illegal annotation task state transition.
class StateError : public Error {
public:
    using Error::Error;
};

} // namespace mmqa
