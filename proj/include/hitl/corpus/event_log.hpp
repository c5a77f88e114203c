#pragma once

#include "hitl/core/error.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

namespace hitl {

/// Append-only JSONL file, one event object per line, flushed per write.
class EventLog {
public:
    explicit EventLog(std::filesystem::path path) : path_(std::move(path)) {
        if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
        out_.open(path_, std::ios::app | std::ios::binary);
        if (!out_) fail(ErrorCode::io_error, "cannot open event log " + path_.string());
    }

    void append(const nlohmann::ordered_json& event) {
        out_ << event.dump() << '\n';
        out_.flush();
        if (!out_) fail(ErrorCode::io_error, "write to event log " + path_.string() + " failed");
    }

    const std::filesystem::path& path() const { return path_; }

    /// Calls `apply` for every event in file order.
    static void replay(const std::filesystem::path& path,
                       const std::function<void(const nlohmann::ordered_json&)>& apply) {
        std::ifstream in(path, std::ios::binary);
        if (!in) return;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            nlohmann::ordered_json event;
            try {
                event = nlohmann::ordered_json::parse(line);
            } catch (const nlohmann::json::exception& e) {
                fail(ErrorCode::parse_error, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
            }
            apply(event);
        }
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

} // namespace hitl
