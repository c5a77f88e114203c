#pragma once

#include "hitl/hitl.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace testutil {

using namespace hitl;

inline PairRecord make_record(std::string id, std::string version, ReviewStatus status,
                              std::optional<TargetLabel> target, std::string hs = "some hate speech",
                              std::string cn = "a calm answer") {
    PairRecord r;
    r.id = std::move(id);
    r.version = std::move(version);
    r.hs_original = std::move(hs);
    r.cn_original = std::move(cn);
    r.status = status;
    r.target = target;
    return r;
}

inline ReviewDecision verdict(const std::string& id, ReviewStatus v, std::optional<TargetLabel> t = TargetLabel::JEWS,
                              std::string annotator = "ann") {
    ReviewDecision d;
    d.pair_id = id;
    d.verdict = v;
    d.target = t;
    d.annotator = std::move(annotator);
    if (v == ReviewStatus::MODIFIED) {
        d.hs_edited = "edited hate speech";
        d.cn_edited = "edited answer";
    }
    return d;
}

/// JSONL seed of `n` accepted pairs spread over the main targets.
inline std::string seed_lines(const std::string& version, std::size_t n) {
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        auto r = make_record(version + "-" + std::to_string(i), version, ReviewStatus::UNTOUCHED,
                             kMainTargets[i % kMainTargetCount], "hate speech number " + std::to_string(i),
                             "counter narrative number " + std::to_string(i));
        out += to_json(r).dump() + "\n";
    }
    return out;
}

inline void import_frozen(Store& store, const std::string& version, std::size_t n,
                          std::vector<std::string> predecessors = {}) {
    std::istringstream in(seed_lines(version, n));
    ImportOptions o;
    o.predecessors = std::move(predecessors);
    store.import_pairs(in, version, o);
    store.freeze(version);
}

/// Fresh empty directory under the system temp dir.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("hitl-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Author stub returning fixed chunks and recording requests.
class FixedAuthor : public AuthorClient {
public:
    std::vector<std::string> chunks;
    bool throw_error = false;
    std::vector<GenerationRequest> requests;

    std::vector<std::string> generate(const GenerationRequest& request) override {
        requests.push_back(request);
        if (throw_error) fail(ErrorCode::io_error, "author unavailable");
        std::vector<std::string> out;
        for (std::size_t i = 0; i < request.n_chunks; ++i) out.push_back(chunks[i % chunks.size()]);
        return out;
    }
};

inline std::string pair_text(const std::string& hs, const std::string& cn, std::string open = "<|startofhs|>") {
    return open + " " + hs + " <|endofhs|> <|startofcn|> " + cn + " <|endofcn|>";
}

/// A chunk with `n` distinct well-formed pairs.
inline std::string chunk_of(std::size_t n, const std::string& tag, std::size_t salt = 0) {
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out += "\n";
        out += pair_text("hs " + tag + " " + std::to_string(salt) + " " + std::to_string(i),
                         "cn " + tag + " " + std::to_string(salt) + " " + std::to_string(i));
    }
    return out;
}

} // namespace testutil
