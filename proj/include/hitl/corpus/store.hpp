#pragma once

// Versioned pair store backed by an append-only JSONL event log.
//
// Every mutation is one event: version creation, one record, one decision,
// one freeze, or an opaque event owned by a higher layer (loop bookkeeping).
// State is a pure function of the event sequence, so replaying the log
// rebuilds an identical store. Mutations are validated before they are
// logged; a rejected operation leaves both the log and the state untouched.

#include "hitl/core/error.hpp"
#include "hitl/corpus/decision.hpp"
#include "hitl/corpus/event_log.hpp"
#include "hitl/corpus/record.hpp"
#include "hitl/corpus/training_format.hpp"
#include "hitl/corpus/version.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <istream>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace hitl {

struct ImportOptions {
    std::vector<std::string> predecessors;
    /// Defaults to the number of accepted records in the file.
    std::optional<std::uint64_t> quota;
};

class Store {
public:
    /// In-memory store without persistence.
    Store() = default;

    /// Store rooted at `dir`: replays dir/events.jsonl when present, then
    /// appends new events to it. Frozen versions are also written to
    /// dir/snapshots/<name>.jsonl.
    explicit Store(const std::filesystem::path& dir) : dir_(dir) {
        std::filesystem::create_directories(dir);
        EventLog::replay(dir / "events.jsonl", [this](const nlohmann::ordered_json& e) { apply(e); });
        log_ = std::make_unique<EventLog>(dir / "events.jsonl");
    }

    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    const std::optional<std::filesystem::path>& directory() const { return dir_; }

    // -- writes ------------------------------------------------------------

    DatasetVersion create_version(const std::string& name, const std::vector<std::string>& predecessors,
                                  std::uint64_t quota) {
        std::unique_lock lock(mutex_);
        nlohmann::ordered_json e;
        e["type"] = "version_create";
        e["name"] = name;
        e["predecessors"] = predecessors;
        e["quota"] = quota;
        commit(e);
        return versions_[version_index_.at(name)];
    }

    /// Imports a pair JSONL stream as a new unfrozen version. The import is
    /// all-or-nothing; errors name the offending line and field.
    DatasetVersion import_pairs(std::istream& in, const std::string& version_name, const ImportOptions& options = {}) {
        std::vector<PairRecord> records;
        std::unordered_set<std::string> ids;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            try {
                auto j = nlohmann::json::parse(line);
                auto r = record_from_json(j, version_name, records.size());
                if (r.version != version_name)
                    fail(ErrorCode::invariant_violation,
                         "field 'version' is '" + r.version + "', expected '" + version_name + "'");
                if (!ids.insert(r.id).second) fail(ErrorCode::conflict, "field 'id' duplicates '" + r.id + "'");
                records.push_back(std::move(r));
            } catch (const nlohmann::json::exception& e) {
                fail(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
            } catch (const Error& e) {
                fail(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
            }
        }
        std::uint64_t accepted = 0;
        for (const auto& r : records) accepted += r.accepted() ? 1 : 0;

        std::unique_lock lock(mutex_);
        for (const auto& r : records)
            if (record_index_.count(r.id)) fail(ErrorCode::conflict, "record id '" + r.id + "' already stored");
        nlohmann::ordered_json create;
        create["type"] = "version_create";
        create["name"] = version_name;
        create["predecessors"] = options.predecessors;
        create["quota"] = options.quota.value_or(accepted);
        commit(create);
        for (const auto& r : records) {
            nlohmann::ordered_json e;
            e["type"] = "record";
            e["record"] = to_json(r);
            commit(e);
        }
        return versions_[version_index_.at(version_name)];
    }

    PairRecord add_record(PairRecord record) {
        std::unique_lock lock(mutex_);
        nlohmann::ordered_json e;
        e["type"] = "record";
        e["record"] = to_json(record);
        commit(e);
        return records_[record_index_.at(record.id)];
    }

    PairRecord append_decision(const ReviewDecision& decision) {
        std::unique_lock lock(mutex_);
        nlohmann::ordered_json e;
        e["type"] = "decision";
        e["decision"] = to_json(decision);
        commit(e);
        return records_[record_index_.at(decision.pair_id)];
    }

    DatasetVersion freeze(const std::string& name) {
        std::unique_lock lock(mutex_);
        nlohmann::ordered_json e;
        e["type"] = "freeze";
        e["version"] = name;
        commit(e);
        const auto& v = versions_[version_index_.at(name)];
        if (dir_) write_snapshot_file(v);
        return v;
    }

    /// Logs an event owned by another layer. Its "type" must not collide
    /// with the store's own event types.
    void append_custom(nlohmann::ordered_json event) {
        std::unique_lock lock(mutex_);
        commit(std::move(event));
    }

    // -- reads -------------------------------------------------------------

    std::optional<DatasetVersion> find_version(const std::string& name) const {
        std::shared_lock lock(mutex_);
        auto it = version_index_.find(name);
        if (it == version_index_.end()) return std::nullopt;
        return versions_[it->second];
    }

    DatasetVersion get_version(const std::string& name) const {
        if (auto v = find_version(name)) return *v;
        fail(ErrorCode::not_found, "no version named '" + name + "'");
    }

    std::vector<std::string> version_names() const {
        std::shared_lock lock(mutex_);
        std::vector<std::string> out;
        for (const auto& v : versions_) out.push_back(v.name);
        return out;
    }

    std::optional<PairRecord> find_record(const std::string& id) const {
        std::shared_lock lock(mutex_);
        auto it = record_index_.find(id);
        if (it == record_index_.end()) return std::nullopt;
        return records_[it->second];
    }

    PairRecord get_record(const std::string& id) const {
        if (auto r = find_record(id)) return *r;
        fail(ErrorCode::not_found, "no record with id '" + id + "'");
    }

    VersionSnapshot snapshot(const std::string& name) const {
        std::shared_lock lock(mutex_);
        return snapshot_locked(name);
    }

    /// Snapshots of the predecessors of `name`, oldest first.
    std::vector<VersionSnapshot> history(const std::string& name) const {
        std::shared_lock lock(mutex_);
        std::vector<VersionSnapshot> out;
        for (const auto& p : version_locked(name).predecessors) out.push_back(snapshot_locked(p));
        return out;
    }

    /// Training text for `upto` and all its predecessors: one line per
    /// accepted pair with its final texts. Every version in range must be
    /// frozen.
    std::string export_training(const std::string& upto, TrainingFormat format) const {
        std::shared_lock lock(mutex_);
        const auto& last = version_locked(upto);
        std::vector<std::string> range = last.predecessors;
        range.push_back(upto);
        for (const auto& name : range)
            if (!version_locked(name).frozen)
                fail(ErrorCode::precondition_failed, "version " + name + " is not frozen");
        std::string out;
        for (const auto& name : range)
            for (const auto& id : version_locked(name).pair_ids) {
                const auto& r = records_[record_index_.at(id)];
                if (!r.accepted()) continue;
                out += training_line(r.hs_final(), r.cn_final(), format, r.target);
                out += '\n';
            }
        return out;
    }

    /// Pair JSONL of one version.
    std::string export_jsonl(const std::string& name) const {
        std::shared_lock lock(mutex_);
        std::string out;
        for (const auto& id : version_locked(name).pair_ids) {
            out += to_json(records_[record_index_.at(id)]).dump();
            out += '\n';
        }
        return out;
    }

    std::vector<nlohmann::ordered_json> custom_events() const {
        std::shared_lock lock(mutex_);
        return custom_;
    }

    std::uint64_t event_count() const {
        std::shared_lock lock(mutex_);
        return next_seq_;
    }

    /// Canonical serialization of the whole state; identical stores produce
    /// identical bytes.
    std::string state_dump() const {
        std::shared_lock lock(mutex_);
        nlohmann::ordered_json j;
        j["events"] = next_seq_;
        j["versions"] = nlohmann::ordered_json::array();
        for (const auto& v : versions_) j["versions"].push_back(to_json(v));
        j["records"] = nlohmann::ordered_json::array();
        for (const auto& r : records_) j["records"].push_back(to_json(r));
        j["custom"] = custom_;
        return j.dump();
    }

private:
    const DatasetVersion& version_locked(const std::string& name) const {
        auto it = version_index_.find(name);
        if (it == version_index_.end()) fail(ErrorCode::not_found, "no version named '" + name + "'");
        return versions_[it->second];
    }

    VersionSnapshot snapshot_locked(const std::string& name) const {
        VersionSnapshot s;
        s.version = version_locked(name);
        s.records.reserve(s.version.pair_ids.size());
        for (const auto& id : s.version.pair_ids) s.records.push_back(records_[record_index_.at(id)]);
        return s;
    }

    void commit(nlohmann::ordered_json event) {
        nlohmann::ordered_json stamped;
        stamped["seq"] = next_seq_;
        for (auto& [k, v] : event.items())
            if (k != "seq") stamped[k] = v;
        check(stamped);
        if (log_) log_->append(stamped);
        apply(stamped);
    }

    /// Throws when `event` would be rejected; never mutates.
    void check(const nlohmann::ordered_json& event) const {
        const auto type = event.value("type", std::string{});
        if (type == "version_create") {
            const auto name = event.at("name").get<std::string>();
            if (name.empty()) fail(ErrorCode::invalid_argument, "version name is empty");
            if (version_index_.count(name)) fail(ErrorCode::conflict, "version name '" + name + "' is in use");
            const auto preds = event.at("predecessors").get<std::vector<std::string>>();
            if (!preds.empty()) {
                const auto& parent = version_locked(preds.back());
                std::vector<std::string> expected = parent.predecessors;
                expected.push_back(parent.name);
                if (expected != preds)
                    fail(ErrorCode::invalid_argument, "predecessors of '" + name + "' must be the chain ending at " +
                                                          parent.name);
                for (const auto& p : preds)
                    if (!version_locked(p).frozen)
                        fail(ErrorCode::precondition_failed, "predecessor " + p + " is not frozen");
            }
        } else if (type == "record") {
            auto r = record_from_json(event.at("record"));
            const auto& v = version_locked(r.version);
            if (v.frozen) fail(ErrorCode::precondition_failed, "version " + v.name + " is frozen");
            if (record_index_.count(r.id)) fail(ErrorCode::conflict, "record id '" + r.id + "' already stored");
        } else if (type == "decision") {
            auto d = decision_from_json(event.at("decision"));
            decided(d);
        } else if (type == "freeze") {
            const auto& v = version_locked(event.at("version").get<std::string>());
            if (v.frozen) fail(ErrorCode::conflict, "version " + v.name + " is already frozen");
            std::uint64_t accepted = 0;
            for (const auto& id : v.pair_ids) {
                const auto& r = records_[record_index_.at(id)];
                if (r.status == ReviewStatus::PENDING)
                    fail(ErrorCode::precondition_failed, "version " + v.name + " has pending record " + id);
                accepted += r.accepted() ? 1 : 0;
            }
            if (accepted != v.quota)
                fail(ErrorCode::precondition_failed, "version " + v.name + " has " + std::to_string(accepted) +
                                                         " accepted pairs, quota is " + std::to_string(v.quota));
        } else if (type.empty()) {
            fail(ErrorCode::invalid_argument, "event without type");
        }
    }

    /// The record `d` turns its target into; validates everything.
    PairRecord decided(const ReviewDecision& d) const {
        validate(d);
        auto it = record_index_.find(d.pair_id);
        if (it == record_index_.end()) fail(ErrorCode::not_found, "no record with id '" + d.pair_id + "'");
        PairRecord r = records_[it->second];
        if (r.status != ReviewStatus::PENDING)
            fail(ErrorCode::conflict, "record " + r.id + " already has verdict " + std::string(to_string(r.status)));
        if (version_locked(r.version).frozen) fail(ErrorCode::precondition_failed, "version " + r.version + " is frozen");
        r.status = d.verdict;
        if (d.verdict == ReviewStatus::MODIFIED) {
            r.hs_edited = d.hs_edited;
            r.cn_edited = d.cn_edited;
        }
        if (d.target) r.target = d.target;
        r.annotator = d.annotator;
        r.note = d.note;
        validate(r);
        return r;
    }

    void apply(const nlohmann::ordered_json& event) {
        const auto type = event.value("type", std::string{});
        if (type == "version_create") {
            DatasetVersion v;
            v.name = event.at("name").get<std::string>();
            v.predecessors = event.at("predecessors").get<std::vector<std::string>>();
            v.quota = event.at("quota").get<std::uint64_t>();
            version_index_[v.name] = versions_.size();
            versions_.push_back(std::move(v));
        } else if (type == "record") {
            auto r = record_from_json(event.at("record"));
            auto& v = versions_.at(version_index_.at(r.version));
            v.pair_ids.push_back(r.id);
            record_index_[r.id] = records_.size();
            records_.push_back(std::move(r));
        } else if (type == "decision") {
            auto r = decided(decision_from_json(event.at("decision")));
            records_[record_index_.at(r.id)] = std::move(r);
        } else if (type == "freeze") {
            versions_.at(version_index_.at(event.at("version").get<std::string>())).frozen = true;
        } else {
            custom_.push_back(event);
        }
        next_seq_ = event.value("seq", next_seq_) + 1;
    }

    void write_snapshot_file(const DatasetVersion& v) const {
        const auto dir = *dir_ / "snapshots";
        std::filesystem::create_directories(dir);
        std::ofstream out(dir / (v.name + ".jsonl"), std::ios::binary | std::ios::trunc);
        for (const auto& id : v.pair_ids) out << to_json(records_[record_index_.at(id)]).dump() << '\n';
    }

    mutable std::shared_mutex mutex_;
    std::optional<std::filesystem::path> dir_;
    std::unique_ptr<EventLog> log_;
    std::vector<DatasetVersion> versions_;
    std::unordered_map<std::string, std::size_t> version_index_;
    std::vector<PairRecord> records_;
    std::unordered_map<std::string, std::size_t> record_index_;
    std::vector<nlohmann::ordered_json> custom_;
    std::uint64_t next_seq_ = 0;
};

} // namespace hitl
