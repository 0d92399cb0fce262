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

#include "mmqa/annotation_server.hpp"

#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "mmqa/errors.hpp"
#include "mmqa/serialization.hpp"

namespace mmqa {

using nlohmann::json;

ServerConfig ServerConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open server config " + path.string());
    try {
        const json j = json::parse(in);
        const auto base = path.parent_path();
        auto resolve = [&](const std::string& p) {
            std::filesystem::path fp(p);
            return fp.is_absolute() ? fp : base / fp;
        };
        ServerConfig c;
        c.dataset = resolve(j.at("dataset").get<std::string>());
        c.store = resolve(j.at("store").get<std::string>());
        c.host = j.value("host", c.host);
        c.port = j.value("port", c.port);
        c.cors_origin = j.value("cors_origin", c.cors_origin);
        return c;
    } catch (const json::exception& e) {
        throw SchemaError("server config " + path.string() + ": " + e.what());
    }
}

struct AnnotationServer::Impl {
    AnnotationService& service;
    ServerConfig config;
    httplib::Server server;
    std::thread thread;
    int bound_port = 0;

    Impl(AnnotationService& s, ServerConfig c) : service(s), config(std::move(c)) { routes(); }

    static void send(httplib::Response& res, int status, const json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    static json body_of(const httplib::Request& req) {
        if (req.body.empty()) return json::object();
        try {
            return json::parse(req.body);
        } catch (const json::parse_error& e) {
            throw ValidationError(std::string("request body is not JSON: ") + e.what());
        }
    }

    template <typename F>
    static void guarded(httplib::Response& res, F&& f) {
        try {
            f();
        } catch (const ReferenceError& e) {
            send(res, 404, json{{"error", e.what()}});
        } catch (const StateError& e) {
            send(res, 409, json{{"error", e.what()}});
        } catch (const ValidationError& e) {
            send(res, 400, json{{"error", e.what()}});
        } catch (const json::exception& e) {
            send(res, 400, json{{"error", e.what()}});
        } catch (const std::exception& e) {
            send(res, 500, json{{"error", e.what()}});
        }
    }

    json task_view(const std::string& qid) {
        json t = task_to_json(service.task(qid));
        const Example& e = service.example(qid);
        t["context"] = to_json(e.context);
        t["question_type"] = e.question_type;
        return t;
    }

    void routes() {
        server.set_post_routing_handler([this](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Origin", config.cors_origin);
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
        });
        server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

        server.Get("/health", [](const httplib::Request&, httplib::Response& res) { send(res, 200, {{"ok", true}}); });

        server.Get("/tasks/next", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const std::string worker = req.has_param("worker") ? req.get_param_value("worker") : "";
                const std::string q = req.has_param("queue") ? req.get_param_value("queue") : "paraphrase";
                if (q != "paraphrase" && q != "validation") throw ValidationError("unknown queue '" + q + "'");
                auto task = service.lease_next(worker, q == "paraphrase" ? TaskQueue::paraphrase : TaskQueue::validation);
                if (!task) {
                    res.status = 204;
                    return;
                }
                send(res, 200, task_view(task->qid));
            });
        });

        server.Get(R"(/tasks/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { send(res, 200, task_view(req.matches[1])); });
        });

        server.Post(R"(/tasks/([^/]+)/paraphrase)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const json b = body_of(req);
                const auto fb = service.submit_paraphrase(req.matches[1], b.at("nl_text").get<std::string>(),
                                                          b.value("annotator", ""));
                send(res, 200, json{{"attempt", fb.attempt}, {"ned", fb.ned}, {"diversity_bonus", fb.diversity_bonus},
                                    {"ai_answer_available", fb.ai_answer_available}});
            });
        });

        server.Post(R"(/tasks/([^/]+)/ned)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const json b = body_of(req);
                const double ned = service.live_ned(req.matches[1], b.at("nl_text").get<std::string>());
                send(res, 200, json{{"ned", ned}, {"diversity_bonus", earns_diversity_bonus(ned)}});
            });
        });

        server.Post(R"(/tasks/([^/]+)/ai-check)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const json b = body_of(req);
                std::optional<int> attempt;
                if (b.contains("attempt") && !b["attempt"].is_null()) attempt = b["attempt"].get<int>();
                const auto r = service.ai_check(req.matches[1], attempt);
                send(res, 200, json{{"attempt", r.attempt},
                                    {"first_attempt_correct", r.first_attempt_correct},
                                    {"this_attempt_correct", r.this_attempt_correct},
                                    {"adversarial_bonus", r.adversarial_bonus},
                                    {"checker", r.checker}});
            });
        });

        server.Post(R"(/tasks/([^/]+)/validate)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const json b = body_of(req);
                Verdict v{b.at("meaning_preserved").get<bool>(), b.at("naturalness").get<int>(), b.value("annotator", "")};
                const TaskState s = service.validate(req.matches[1], v);
                send(res, 200, json{{"state", to_string(s)}, {"task_state", to_string(service.task(req.matches[1]).state)}});
            });
        });

        server.Get("/export", [this](const httplib::Request&, httplib::Response& res) {
            guarded(res, [&] {
                std::ostringstream out;
                write_examples(out, service.export_dataset());
                res.status = 200;
                res.set_content(out.str(), "application/x-ndjson");
            });
        });
    }
};

AnnotationServer::AnnotationServer(AnnotationService& service, ServerConfig config)
    : impl_(std::make_unique<Impl>(service, std::move(config))) {}

AnnotationServer::~AnnotationServer() {
    stop();
}

int AnnotationServer::start() {
    auto& s = impl_->server;
    const int port = impl_->config.port == 0 ? s.bind_to_any_port(impl_->config.host)
                                             : (s.bind_to_port(impl_->config.host, impl_->config.port) ? impl_->config.port : -1);
    if (port <= 0) {
        throw Error("cannot bind " + impl_->config.host + ":" + std::to_string(impl_->config.port));
    }
    impl_->bound_port = port;
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return port;
}

void AnnotationServer::run() {
    start();
    if (impl_->thread.joinable()) impl_->thread.join();
}

void AnnotationServer::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

int AnnotationServer::port() const {
    return impl_->bound_port;
}

} // namespace mmqa
