#pragma once

#include "hitl/corpus/record.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace hitl {

/// One loop snapshot. `predecessors` lists every earlier version the loop
/// was trained on, oldest first (V1 .. V_{i-1}).
struct DatasetVersion {
    std::string name;
    std::vector<std::string> predecessors;
    std::vector<std::string> pair_ids;
    bool frozen = false;
    std::uint64_t quota = 0;

    bool operator==(const DatasetVersion&) const = default;
};

/// A version together with its records, in insertion order.
struct VersionSnapshot {
    DatasetVersion version;
    std::vector<PairRecord> records;

    std::size_t accepted_count() const {
        std::size_t n = 0;
        for (const auto& r : records) n += r.accepted() ? 1 : 0;
        return n;
    }
};

inline nlohmann::ordered_json to_json(const DatasetVersion& v) {
    nlohmann::ordered_json j;
    j["name"] = v.name;
    j["predecessors"] = v.predecessors;
    j["pair_ids"] = v.pair_ids;
    j["frozen"] = v.frozen;
    j["quota"] = v.quota;
    return j;
}

} // namespace hitl
