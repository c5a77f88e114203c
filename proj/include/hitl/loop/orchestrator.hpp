#pragma once

// Loop lifecycle: start -> generate -> review -> close.
//
// Loop state lives in the store as opaque events (loop_start, chunk,
// loop_close), so an orchestrator constructed over a persisted store resumes
// where the previous process stopped. Review leases are in memory only.

#include "hitl/core/error.hpp"
#include "hitl/corpus/store.hpp"
#include "hitl/loop/author_client.hpp"
#include "hitl/loop/parser.hpp"
#include "hitl/loop/strategy.hpp"
#include "hitl/metrics/report.hpp"

#include <json.hpp>

#include <chrono>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hitl {

struct LoopConfig {
    std::string name;
    /// Version the loop builds on; defaults to the most recently created
    /// frozen version.
    std::optional<std::string> base;
    Strategy strategy;
    std::uint64_t quota = 500;
    /// Parsed pairs admitted per chunk; 0 admits all.
    std::uint64_t chunk_admit_limit = 0;
};

struct GenerationChunk {
    std::string id;
    std::string loop;
    std::uint64_t index = 0;
    StrategyKind strategy = StrategyKind::PLAIN;
    std::string condition;
    std::string raw_text;
    std::size_t parsed = 0;
    std::size_t admitted = 0;
    std::size_t duplicates = 0;
    bool failed = false;
    std::string error;
    std::vector<std::string> diagnostics;
    std::vector<std::string> record_ids;
};

inline nlohmann::ordered_json to_json(const GenerationChunk& c) {
    nlohmann::ordered_json j;
    j["id"] = c.id;
    j["loop"] = c.loop;
    j["index"] = c.index;
    j["strategy"] = std::string(to_string(c.strategy));
    j["condition"] = c.condition;
    j["raw_text"] = c.raw_text;
    j["parsed"] = c.parsed;
    j["admitted"] = c.admitted;
    j["duplicates"] = c.duplicates;
    j["failed"] = c.failed;
    if (c.failed) j["error"] = c.error;
    j["diagnostics"] = c.diagnostics;
    j["record_ids"] = c.record_ids;
    return j;
}

struct LoopStatus {
    std::string name;
    std::string base;
    std::vector<std::string> predecessors;
    StrategyKind strategy = StrategyKind::PLAIN;
    TrainingFormat training_format = TrainingFormat::PLAIN;
    std::uint64_t quota = 0;
    std::uint64_t chunk_admit_limit = 0;
    std::uint64_t chunks = 0;
    std::size_t records = 0;
    std::size_t pending = 0;
    std::size_t accepted = 0;
    std::size_t discarded = 0;
    bool closed = false;
};

inline nlohmann::ordered_json to_json(const LoopStatus& s) {
    nlohmann::ordered_json j;
    j["name"] = s.name;
    j["base"] = s.base;
    j["predecessors"] = s.predecessors;
    j["strategy"] = std::string(to_string(s.strategy));
    j["training_format"] = std::string(to_string(s.training_format));
    j["quota"] = s.quota;
    j["chunk_admit_limit"] = s.chunk_admit_limit;
    j["chunks"] = s.chunks;
    j["records"] = s.records;
    j["pending"] = s.pending;
    j["accepted"] = s.accepted;
    j["discarded"] = s.discarded;
    j["closed"] = s.closed;
    return j;
}

struct StartedLoop {
    LoopStatus status;
    /// Training text for the author, covering every predecessor.
    std::string training_export;
    std::optional<std::filesystem::path> export_path;
};

struct ClosedLoop {
    DatasetVersion version;
    LoopReport report;
};

struct OrchestratorOptions {
    std::chrono::seconds lease_duration{30 * 60};
    std::size_t max_tokens = 512;
    ReportOptions report;
    std::function<std::chrono::steady_clock::time_point()> clock = [] { return std::chrono::steady_clock::now(); };
};

inline constexpr std::string_view kLoopClosedNote = "loop closed";

class Orchestrator {
public:
    Orchestrator(Store& store, AuthorClient* author, OrchestratorOptions options = {})
        : store_(store), author_(author), options_(std::move(options)) {
        for (const auto& e : store_.custom_events()) replay(e);
        for (auto& [name, loop] : loops_) {
            for (const auto& r : store_.snapshot(name).records) {
                loop.keys.insert(duplicate_key(r.hs_original, r.cn_original));
                if (r.status == ReviewStatus::PENDING) loop.queue.push_back(r.id);
                if (r.accepted()) ++loop.accepted;
            }
        }
    }

    Orchestrator(const Orchestrator&) = delete;
    Orchestrator& operator=(const Orchestrator&) = delete;

    StartedLoop start_loop(const LoopConfig& config) {
        std::unique_lock lock(mutex_);
        if (config.quota == 0) fail(ErrorCode::invalid_argument, "loop quota must be positive");
        const std::string base = config.base ? *config.base : default_base();
        const auto base_version = store_.get_version(base);
        for (const auto& p : base_version.predecessors)
            if (!store_.get_version(p).frozen) fail(ErrorCode::precondition_failed, "prior loop " + p + " is open");
        if (!base_version.frozen) fail(ErrorCode::precondition_failed, "prior loop " + base + " is open");

        // Missing SBF/MIX mappings take the shipped table; a missing ARG pool
        // is the distinct gold HSs of the predecessors.
        Strategy strategy = config.strategy;
        if ((strategy.kind == StrategyKind::SBF || strategy.kind == StrategyKind::MIX) && strategy.label_mapping.empty())
            strategy.label_mapping = default_sbf_mapping();
        if (strategy.kind == StrategyKind::ARG && strategy.condition_pool.empty()) {
            auto hist = store_.history(base);
            hist.push_back(store_.snapshot(base));
            strategy.condition_pool = gold_hs_pool(hist);
        }
        const ConditionSchedule schedule(strategy); // validates the strategy

        auto predecessors = base_version.predecessors;
        predecessors.push_back(base);
        const auto format = strategy.training_format();
        StartedLoop out;
        out.training_export = store_.export_training(base, format);

        store_.create_version(config.name, predecessors, config.quota);
        nlohmann::ordered_json e;
        e["type"] = "loop_start";
        e["loop"] = config.name;
        e["base"] = base;
        e["quota"] = config.quota;
        e["chunk_admit_limit"] = config.chunk_admit_limit;
        e["training_format"] = std::string(to_string(format));
        e["strategy"] = to_json(strategy);
        store_.append_custom(e);
        replay(e);

        if (const auto& dir = store_.directory()) {
            const auto path = *dir / "exports" / (config.name + ".txt");
            std::filesystem::create_directories(path.parent_path());
            std::ofstream f(path, std::ios::binary | std::ios::trunc);
            f << out.training_export;
            out.export_path = path;
        }
        out.status = status_locked(config.name);
        return out;
    }

    /// Requests `n_chunks` chunks from the author. The author is called
    /// without holding the orchestrator lock, so reviews proceed meanwhile.
    std::vector<GenerationChunk> request_generation(const std::string& loop_name, std::size_t n_chunks) {
        std::vector<GenerationChunk> chunks;
        {
            std::unique_lock lock(mutex_);
            auto& loop = open_loop(loop_name);
            if (!author_) fail(ErrorCode::precondition_failed, "no author configured");
            for (std::size_t i = 0; i < n_chunks; ++i) {
                GenerationChunk c;
                c.loop = loop_name;
                c.index = loop.next_chunk++;
                c.id = loop_name + "-c" + std::to_string(c.index);
                c.strategy = loop.schedule->strategy().kind;
                c.condition = loop.schedule->at(c.index).text;
                chunks.push_back(std::move(c));
            }
        }

        // Consecutive chunks with the same condition share one request.
        for (std::size_t i = 0; i < chunks.size();) {
            std::size_t j = i;
            while (j < chunks.size() && chunks[j].condition == chunks[i].condition) ++j;
            GenerationRequest req{chunks[i].condition, j - i, options_.max_tokens};
            try {
                auto texts = author_->generate(req);
                if (texts.size() != req.n_chunks) fail(ErrorCode::protocol_error, "author returned wrong chunk count");
                for (std::size_t k = i; k < j; ++k) chunks[k].raw_text = std::move(texts[k - i]);
            } catch (const std::exception& ex) {
                for (std::size_t k = i; k < j; ++k) {
                    chunks[k].failed = true;
                    chunks[k].error = ex.what();
                }
            }
            i = j;
        }

        std::unique_lock lock(mutex_);
        auto& loop = loops_.at(loop_name);
        for (auto& c : chunks) {
            if (loop.closed && !c.failed) {
                c.failed = true;
                c.error = "loop closed during generation";
            }
            admit(loop, c);
        }
        return chunks;
    }

    /// Leases the oldest unleased pending record to `annotator`; an annotator
    /// holding an active lease gets the same record again. Returns nullopt
    /// when nothing can be leased.
    std::optional<PairRecord> next_for_review(const std::string& annotator) {
        if (annotator.empty()) fail(ErrorCode::invalid_argument, "annotator is required");
        std::unique_lock lock(mutex_);
        const auto now = options_.clock();
        expire(now);
        if (auto it = lease_by_annotator_.find(annotator); it != lease_by_annotator_.end())
            return store_.get_record(it->second);
        for (const auto& name : loop_order_) {
            auto& loop = loops_.at(name);
            if (loop.closed) continue;
            if (loop.accepted + loop.leased >= loop.quota) continue;
            for (const auto& id : loop.queue) {
                if (leases_.count(id)) continue;
                leases_[id] = Lease{annotator, now + options_.lease_duration, name};
                lease_by_annotator_[annotator] = id;
                ++loop.leased;
                return store_.get_record(id);
            }
        }
        return std::nullopt;
    }

    /// Applies a reviewer decision; the reviewer must hold the record's lease.
    PairRecord submit_review(ReviewDecision decision) {
        std::unique_lock lock(mutex_);
        expire(options_.clock());
        decision.note.reset(); // reserved for system decisions
        auto it = leases_.find(decision.pair_id);
        if (it == leases_.end())
            fail(ErrorCode::conflict, "no active lease on " + decision.pair_id + " (stale or never leased)");
        if (!decision.annotator || *decision.annotator != it->second.annotator)
            fail(ErrorCode::conflict, "lease on " + decision.pair_id + " is held by another annotator");
        auto& loop = loops_.at(it->second.loop);
        auto updated = store_.append_decision(decision);
        release(it);
        std::erase(loop.queue, updated.id);
        if (updated.accepted()) ++loop.accepted;
        return updated;
    }

    ClosedLoop close_loop(const std::string& loop_name) {
        std::unique_lock lock(mutex_);
        auto& loop = open_loop(loop_name);
        if (loop.accepted != loop.quota)
            fail(ErrorCode::precondition_failed, "quota unmet for " + loop_name + ": " + std::to_string(loop.accepted) +
                                                     " of " + std::to_string(loop.quota) + " accepted");
        for (const auto& id : loop.queue) {
            ReviewDecision d;
            d.pair_id = id;
            d.verdict = ReviewStatus::DISCARDED;
            d.note = std::string(kLoopClosedNote);
            store_.append_decision(d);
            if (auto l = leases_.find(id); l != leases_.end()) release(l);
        }
        loop.queue.clear();
        ClosedLoop out;
        out.version = store_.freeze(loop_name);
        nlohmann::ordered_json e;
        e["type"] = "loop_close";
        e["loop"] = loop_name;
        store_.append_custom(e);
        loop.closed = true;
        out.report = report_locked(loop_name);
        if (const auto& dir = store_.directory()) {
            const auto path = *dir / "reports" / (loop_name + ".json");
            std::filesystem::create_directories(path.parent_path());
            std::ofstream f(path, std::ios::binary | std::ios::trunc);
            f << to_json(out.report).dump(2) << '\n';
        }
        return out;
    }

    /// Report of any frozen version, loop-created or imported.
    LoopReport report(const std::string& version) const {
        std::unique_lock lock(mutex_);
        return report_locked(version);
    }

    LoopStatus status(const std::string& loop_name) const {
        std::unique_lock lock(mutex_);
        return status_locked(loop_name);
    }

    std::vector<std::string> loops() const {
        std::unique_lock lock(mutex_);
        return loop_order_;
    }

    std::vector<GenerationChunk> chunks(const std::string& loop_name) const {
        std::vector<GenerationChunk> out;
        for (const auto& e : store_.custom_events())
            if (e.value("type", "") == "chunk" && e.value("loop", "") == loop_name) out.push_back(chunk_from_event(e));
        return out;
    }

    std::size_t active_leases() const {
        std::unique_lock lock(mutex_);
        return leases_.size();
    }

    Store& store() { return store_; }

private:
    struct Lease {
        std::string annotator;
        std::chrono::steady_clock::time_point expires;
        std::string loop;
    };

    struct LoopState {
        std::string base;
        std::uint64_t quota = 0;
        std::uint64_t chunk_admit_limit = 0;
        TrainingFormat format = TrainingFormat::PLAIN;
        std::optional<ConditionSchedule> schedule;
        std::uint64_t next_chunk = 0;
        bool closed = false;
        std::deque<std::string> queue; ///< pending record ids, FIFO
        std::set<std::string> keys;    ///< duplicate keys of stored pairs
        std::size_t accepted = 0;
        std::size_t leased = 0;
    };

    static std::string duplicate_key(const std::string& hs, const std::string& cn) {
        std::string key;
        for (const auto& t : tokenize(hs)) key += t + '\x1f';
        key += '\x1e';
        for (const auto& t : tokenize(cn)) key += t + '\x1f';
        return key;
    }

    static GenerationChunk chunk_from_event(const nlohmann::ordered_json& e) {
        GenerationChunk c;
        c.id = e.at("id").get<std::string>();
        c.loop = e.at("loop").get<std::string>();
        c.index = e.at("index").get<std::uint64_t>();
        c.strategy = strategy_kind_from_string(e.at("strategy").get<std::string>());
        c.condition = e.at("condition").get<std::string>();
        c.raw_text = e.at("raw_text").get<std::string>();
        c.parsed = e.at("parsed").get<std::size_t>();
        c.admitted = e.at("admitted").get<std::size_t>();
        c.duplicates = e.at("duplicates").get<std::size_t>();
        c.failed = e.at("failed").get<bool>();
        c.error = e.value("error", "");
        c.diagnostics = e.at("diagnostics").get<std::vector<std::string>>();
        c.record_ids = e.at("record_ids").get<std::vector<std::string>>();
        return c;
    }

    void replay(const nlohmann::ordered_json& e) {
        const auto type = e.value("type", "");
        if (type == "loop_start") {
            LoopState s;
            s.base = e.at("base").get<std::string>();
            s.quota = e.at("quota").get<std::uint64_t>();
            s.chunk_admit_limit = e.at("chunk_admit_limit").get<std::uint64_t>();
            s.format = training_format_from_string(e.at("training_format").get<std::string>());
            s.schedule.emplace(strategy_from_json(e.at("strategy")));
            const auto name = e.at("loop").get<std::string>();
            loops_[name] = std::move(s);
            loop_order_.push_back(name);
        } else if (type == "chunk") {
            auto& s = loops_.at(e.at("loop").get<std::string>());
            s.next_chunk = std::max(s.next_chunk, e.at("index").get<std::uint64_t>() + 1);
        } else if (type == "loop_close") {
            loops_.at(e.at("loop").get<std::string>()).closed = true;
        }
    }

    std::string default_base() const {
        std::optional<std::string> last;
        for (const auto& name : store_.version_names())
            if (store_.get_version(name).frozen) last = name;
        if (!last) fail(ErrorCode::precondition_failed, "no frozen version to build on");
        return *last;
    }

    LoopState& open_loop(const std::string& name) {
        auto it = loops_.find(name);
        if (it == loops_.end()) fail(ErrorCode::not_found, "no loop named '" + name + "'");
        if (it->second.closed) fail(ErrorCode::precondition_failed, "loop " + name + " is closed");
        return it->second;
    }

    void admit(LoopState& loop, GenerationChunk& c) {
        if (!c.failed) {
            const auto parsed = parse_generation(c.raw_text, loop.format);
            c.parsed = parsed.pairs.size();
            for (const auto& d : parsed.diagnostics)
                c.diagnostics.push_back("offset " + std::to_string(d.offset) + ": " + d.message);
            const std::size_t limit =
                loop.chunk_admit_limit == 0 ? parsed.pairs.size()
                                            : std::min<std::size_t>(parsed.pairs.size(), loop.chunk_admit_limit);
            for (std::size_t j = 0; j < limit; ++j) {
                const auto& p = parsed.pairs[j];
                PairRecord r;
                r.id = c.id + "-" + std::to_string(j);
                r.version = c.loop;
                r.hs_original = p.hs;
                r.cn_original = p.cn;
                r.strategy = std::string(to_string(c.strategy));
                r.chunk_id = c.id;
                r.chunk_index = j;
                if (tokenize(p.hs).empty() || tokenize(p.cn).empty()) {
                    c.diagnostics.push_back("pair " + std::to_string(j) + ": text has no tokens");
                    continue;
                }
                const auto key = duplicate_key(p.hs, p.cn);
                const bool duplicate = !loop.keys.insert(key).second;
                if (duplicate) {
                    r.status = ReviewStatus::DISCARDED;
                    r.note = "duplicate";
                    ++c.duplicates;
                }
                store_.add_record(r);
                c.record_ids.push_back(r.id);
                ++c.admitted;
                if (!duplicate) loop.queue.push_back(r.id);
            }
        }
        nlohmann::ordered_json e = to_json(c);
        e["type"] = "chunk";
        store_.append_custom(e);
    }

    void expire(std::chrono::steady_clock::time_point now) {
        for (auto it = leases_.begin(); it != leases_.end();) {
            if (it->second.expires <= now) it = release(it);
            else ++it;
        }
    }

    std::map<std::string, Lease>::iterator release(std::map<std::string, Lease>::iterator it) {
        lease_by_annotator_.erase(it->second.annotator);
        --loops_.at(it->second.loop).leased;
        return leases_.erase(it);
    }

    LoopStatus status_locked(const std::string& name) const {
        auto it = loops_.find(name);
        if (it == loops_.end()) fail(ErrorCode::not_found, "no loop named '" + name + "'");
        const auto& s = it->second;
        const auto v = store_.get_version(name);
        LoopStatus out;
        out.name = name;
        out.base = s.base;
        out.predecessors = v.predecessors;
        out.strategy = s.schedule->strategy().kind;
        out.training_format = s.format;
        out.quota = s.quota;
        out.chunk_admit_limit = s.chunk_admit_limit;
        out.chunks = s.next_chunk;
        out.closed = s.closed;
        for (const auto& r : store_.snapshot(name).records) {
            ++out.records;
            if (r.status == ReviewStatus::PENDING) ++out.pending;
            else if (r.accepted()) ++out.accepted;
            else ++out.discarded;
        }
        return out;
    }

    LoopReport report_locked(const std::string& version) const {
        const auto snap = store_.snapshot(version);
        const auto hist = store_.history(version);
        return loop_report(snap, hist, options_.report);
    }

    Store& store_;
    AuthorClient* author_;
    OrchestratorOptions options_;
    mutable std::mutex mutex_;
    std::map<std::string, LoopState> loops_;
    std::vector<std::string> loop_order_;
    std::map<std::string, Lease> leases_; ///< by pair id
    std::map<std::string, std::string> lease_by_annotator_;
};

} // namespace hitl
