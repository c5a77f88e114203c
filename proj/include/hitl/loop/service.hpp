#pragma once

// HTTP JSON API over an Orchestrator.
//
//   POST /loops                         start a loop
//   GET  /loops/{id}                    loop status
//   POST /loops/{id}/generate           {"n_chunks": n}
//   POST /loops/{id}/close
//   GET  /review/next?annotator=a       200 record | 204 nothing to review
//   POST /review/{pair_id}              decision body
//   GET  /versions/{name}/report        ?unit=pair|hs|cn&format=json|table
//   GET  /versions/{name}/export        ?format=plain|labeled|jsonl
//
// Errors are {"error": code, "message": text} with 400, 404 or 409.

#include "hitl/core/error.hpp"
#include "hitl/loop/orchestrator.hpp"

#include <httplib.h>
#include <json.hpp>

#include <functional>
#include <string>

namespace hitl {

inline int http_status(ErrorCode code) {
    switch (code) {
    case ErrorCode::not_found: return 404;
    case ErrorCode::conflict:
    case ErrorCode::precondition_failed: return 409;
    case ErrorCode::io_error: return 500;
    case ErrorCode::invalid_argument:
    case ErrorCode::parse_error:
    case ErrorCode::invariant_violation:
    case ErrorCode::protocol_error: return 400;
    }
    return 500;
}

template <typename Json>
LoopConfig loop_config_from_json(const Json& j) {
    if (!j.is_object()) fail(ErrorCode::invalid_argument, "loop request must be an object");
    LoopConfig c;
    c.name = detail::required_string(j, "name");
    c.base = detail::optional_string(j, "base");
    if (auto it = j.find("strategy"); it != j.end()) {
        if (it->is_string()) c.strategy.kind = strategy_kind_from_string(it->template get<std::string>());
        else c.strategy = strategy_from_json(*it);
    }
    if (auto it = j.find("quota"); it != j.end()) {
        if (!it->is_number_unsigned()) fail(ErrorCode::invalid_argument, "field 'quota' must be a positive integer");
        c.quota = it->template get<std::uint64_t>();
    }
    if (auto it = j.find("chunk_admit_limit"); it != j.end()) {
        if (!it->is_number_unsigned())
            fail(ErrorCode::invalid_argument, "field 'chunk_admit_limit' must be a non-negative integer");
        c.chunk_admit_limit = it->template get<std::uint64_t>();
    }
    return c;
}

class Service {
public:
    explicit Service(Orchestrator& orchestrator) : orch_(orchestrator) { routes(); }

    httplib::Server& server() { return server_; }

    /// Binds and serves until stop(); blocks.
    bool listen(const std::string& host, int port) { return server_.listen(host, port); }

    /// Binds to a free port and returns it; serve with listen_after_bind().
    int bind_any(const std::string& host) { return server_.bind_to_any_port(host); }
    bool listen_after_bind() { return server_.listen_after_bind(); }

    void stop() { server_.stop(); }

private:
    using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

    static void send_json(httplib::Response& res, const nlohmann::ordered_json& j, int status = 200) {
        res.status = status;
        res.set_content(j.dump(), "application/json");
    }

    static void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
        nlohmann::ordered_json j;
        j["error"] = code;
        j["message"] = message;
        send_json(res, j, status);
    }

    static nlohmann::json body_json(const httplib::Request& req) {
        if (req.body.empty()) return nlohmann::json::object();
        try {
            return nlohmann::json::parse(req.body);
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorCode::parse_error, std::string("request body is not JSON: ") + e.what());
        }
    }

    static Handler guarded(Handler h) {
        return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
            try {
                h(req, res);
            } catch (const Error& e) {
                send_error(res, http_status(e.code()), to_string(e.code()), e.what());
            } catch (const nlohmann::json::exception& e) {
                send_error(res, 400, "invalid_argument", e.what());
            } catch (const std::exception& e) {
                send_error(res, 500, "internal", e.what());
            }
        };
    }

    void routes() {
        server_.Post("/loops", guarded([this](const auto& req, auto& res) {
            auto started = orch_.start_loop(loop_config_from_json(body_json(req)));
            nlohmann::ordered_json j;
            j["loop"] = to_json(started.status);
            std::size_t lines = 0;
            for (char ch : started.training_export) lines += ch == '\n' ? 1 : 0;
            j["training_export_lines"] = lines;
            if (started.export_path) j["training_export_path"] = started.export_path->string();
            send_json(res, j, 201);
        }));

        server_.Get(R"(/loops/([^/]+))", guarded([this](const auto& req, auto& res) {
            send_json(res, to_json(orch_.status(req.matches[1])));
        }));

        server_.Post(R"(/loops/([^/]+)/generate)", guarded([this](const auto& req, auto& res) {
            const auto body = body_json(req);
            std::size_t n = 1;
            if (auto it = body.find("n_chunks"); it != body.end()) {
                if (!it->is_number_unsigned() || it->template get<std::size_t>() == 0)
                    fail(ErrorCode::invalid_argument, "field 'n_chunks' must be a positive integer");
                n = it->template get<std::size_t>();
            }
            nlohmann::ordered_json j;
            j["chunks"] = nlohmann::ordered_json::array();
            for (const auto& c : orch_.request_generation(req.matches[1], n)) j["chunks"].push_back(to_json(c));
            send_json(res, j);
        }));

        server_.Post(R"(/loops/([^/]+)/close)", guarded([this](const auto& req, auto& res) {
            auto closed = orch_.close_loop(req.matches[1]);
            nlohmann::ordered_json j;
            j["version"] = to_json(closed.version);
            j["report"] = to_json(closed.report);
            send_json(res, j);
        }));

        server_.Get("/review/next", guarded([this](const auto& req, auto& res) {
            if (!req.has_param("annotator")) fail(ErrorCode::invalid_argument, "query parameter 'annotator' is required");
            auto r = orch_.next_for_review(req.get_param_value("annotator"));
            if (!r) {
                res.status = 204;
                return;
            }
            send_json(res, to_json(*r));
        }));

        server_.Post(R"(/review/([^/]+))", guarded([this](const auto& req, auto& res) {
            auto body = body_json(req);
            if (!body.is_object()) fail(ErrorCode::invalid_argument, "decision must be an object");
            const std::string id = req.matches[1];
            if (auto it = body.find("pair_id"); it != body.end() && *it != id)
                fail(ErrorCode::invalid_argument, "field 'pair_id' does not match the URL");
            body["pair_id"] = id;
            if (!body.contains("annotator") && req.has_param("annotator"))
                body["annotator"] = req.get_param_value("annotator");
            send_json(res, to_json(orch_.submit_review(decision_from_json(body))));
        }));

        server_.Get(R"(/versions/([^/]+)/report)", guarded([this](const auto& req, auto& res) {
            const auto report = orch_.report(req.matches[1]);
            const auto format = req.has_param("format") ? req.get_param_value("format") : "json";
            if (format == "json") {
                send_json(res, to_json(report));
            } else if (format == "table") {
                const auto unit = unit_from_string(req.has_param("unit") ? req.get_param_value("unit") : "pair");
                res.set_content(render_table(report, unit), "text/plain; charset=utf-8");
            } else {
                fail(ErrorCode::invalid_argument, "unknown report format '" + format + "'");
            }
        }));

        server_.Get(R"(/versions/([^/]+)/export)", guarded([this](const auto& req, auto& res) {
            const auto format = req.has_param("format") ? req.get_param_value("format") : "plain";
            if (format == "jsonl") {
                res.set_content(orch_.store().export_jsonl(req.matches[1]), "application/x-ndjson");
            } else {
                res.set_content(orch_.store().export_training(req.matches[1], training_format_from_string(format)),
                                "text/plain; charset=utf-8");
            }
        }));
    }

    Orchestrator& orch_;
    httplib::Server server_;
};

} // namespace hitl
