#pragma once

// Client side of the author wire protocol:
//
//   POST /generate  {"condition": str, "n_chunks": int, "max_tokens": int}
//   200             {"chunks": [str, ...]}     exactly n_chunks entries
//
// A chunk is the author's raw continuation including the condition prefix.

#include "hitl/core/error.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

namespace hitl {

struct GenerationRequest {
    std::string condition;
    std::size_t n_chunks = 1;
    std::size_t max_tokens = 512;
};

inline nlohmann::ordered_json to_json(const GenerationRequest& r) {
    nlohmann::ordered_json j;
    j["condition"] = r.condition;
    j["n_chunks"] = r.n_chunks;
    j["max_tokens"] = r.max_tokens;
    return j;
}

/// Validates a request body; servers use it to reject bad input.
template <typename Json>
GenerationRequest generation_request_from_json(const Json& j) {
    if (!j.is_object()) fail(ErrorCode::protocol_error, "request must be an object");
    auto it = j.find("condition");
    if (it == j.end() || !it->is_string()) fail(ErrorCode::protocol_error, "'condition' must be a string");
    GenerationRequest r;
    r.condition = it->template get<std::string>();
    for (auto [key, dst] : {std::pair{"n_chunks", &r.n_chunks}, std::pair{"max_tokens", &r.max_tokens}}) {
        auto f = j.find(key);
        if (f == j.end() || !f->is_number_integer() || f->template get<std::int64_t>() < 1)
            fail(ErrorCode::protocol_error, std::string("'") + key + "' must be a positive integer");
        *dst = f->template get<std::size_t>();
    }
    return r;
}

/// Validates a response body against the request it answers.
template <typename Json>
std::vector<std::string> generation_response_from_json(const Json& j, std::size_t n_chunks) {
    if (!j.is_object()) fail(ErrorCode::protocol_error, "response must be an object");
    auto it = j.find("chunks");
    if (it == j.end() || !it->is_array()) fail(ErrorCode::protocol_error, "'chunks' must be an array");
    std::vector<std::string> out;
    for (const auto& c : *it) {
        if (!c.is_string()) fail(ErrorCode::protocol_error, "'chunks' entries must be strings");
        out.push_back(c.template get<std::string>());
    }
    if (out.size() != n_chunks)
        fail(ErrorCode::protocol_error,
             "expected " + std::to_string(n_chunks) + " chunks, got " + std::to_string(out.size()));
    return out;
}

class AuthorClient {
public:
    virtual ~AuthorClient() = default;
    /// Throws Error on transport or protocol failure.
    virtual std::vector<std::string> generate(const GenerationRequest& request) = 0;
};

struct AuthorClientConfig {
    std::string url = "http://127.0.0.1:8081";
    double timeout_seconds = 60.0;
    std::size_t retries = 2;
    std::size_t max_tokens = 512;
};

/// Reads the config JSON; HITL_AUTHOR_URL overrides the url.
inline AuthorClientConfig load_author_config(const std::string& path = {}) {
    AuthorClientConfig c;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) fail(ErrorCode::io_error, "cannot read " + path);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorCode::parse_error, path + ": " + e.what());
        }
        c.url = j.value("url", c.url);
        c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
        c.retries = j.value("retries", c.retries);
        c.max_tokens = j.value("max_tokens", c.max_tokens);
    }
    if (const char* url = std::getenv("HITL_AUTHOR_URL")) c.url = url;
    return c;
}

class HttpAuthorClient : public AuthorClient {
public:
    explicit HttpAuthorClient(AuthorClientConfig config) : config_(std::move(config)) {}

    std::vector<std::string> generate(const GenerationRequest& request) override {
        httplib::Client client(config_.url);
        const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
            std::chrono::duration<double>(config_.timeout_seconds));
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        const auto body = to_json(request).dump();
        std::string last_error;
        for (std::size_t attempt = 0; attempt <= config_.retries; ++attempt) {
            auto res = client.Post("/generate", body, "application/json");
            if (!res) {
                last_error = "transport error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status >= 500) {
                last_error = "author returned HTTP " + std::to_string(res->status);
                continue;
            }
            if (res->status != 200) fail(ErrorCode::protocol_error, "author returned HTTP " + std::to_string(res->status));
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(res->body);
            } catch (const nlohmann::json::exception& e) {
                fail(ErrorCode::protocol_error, std::string("author response is not JSON: ") + e.what());
            }
            return generation_response_from_json(j, request.n_chunks);
        }
        fail(ErrorCode::io_error, last_error);
    }

    const AuthorClientConfig& config() const { return config_; }

private:
    AuthorClientConfig config_;
};

} // namespace hitl
