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
#include <memory>
#include <string>

#include "mmqa/annotation_service.hpp"

namespace mmqa {

struct ServerConfig {
    std::filesystem::path dataset;
    std::filesystem::path store;
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 binds any free port
    std::string cors_origin = "*";

    // Relative paths resolve against the config file's directory.
    static ServerConfig load(const std::filesystem::path& path);
};

// HTTP JSON front end over an AnnotationService:
//   GET  /tasks/next?worker=&queue=paraphrase|validation
//   GET  /tasks/{qid}
//   POST /tasks/{qid}/paraphrase  {nl_text, annotator}
//   POST /tasks/{qid}/ned         {nl_text}
//   POST /tasks/{qid}/ai-check    {attempt}
//   POST /tasks/{qid}/validate    {meaning_preserved, naturalness, annotator}
//   GET  /export
class AnnotationServer {
public:
    AnnotationServer(AnnotationService& service, ServerConfig config);
    ~AnnotationServer();
    AnnotationServer(const AnnotationServer&) = delete;
    AnnotationServer& operator=(const AnnotationServer&) = delete;

    // Binds and serves on a background thread; returns the bound port.
    // Throws Error when the port cannot be bound.
    int start();
    // Binds and serves on the calling thread.
    void run();
    void stop();
    int port() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace mmqa
