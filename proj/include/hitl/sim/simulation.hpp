#pragma once

// End-to-end loop runs with the mock author and the scripted reviewer.

#include "hitl/corpus/store.hpp"
#include "hitl/loop/orchestrator.hpp"
#include "hitl/sim/mock_author.hpp"
#include "hitl/sim/scripted_reviewer.hpp"

#include <json.hpp>

#include <filesystem>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace hitl::sim {

struct SimulationConfig {
    std::size_t loops = 2;
    std::uint64_t quota = 50;
    std::size_t seed_pairs = 50;
    StrategyKind strategy = StrategyKind::PLAIN;
    std::uint64_t chunk_admit_limit = 0;
    std::size_t chunks_per_request = 4;
    /// Chunks a loop may request before the run counts as stalled.
    std::size_t max_chunks_per_loop = 400;
    ReportOptions report;
    /// Persist the store here; in memory when empty.
    std::optional<std::filesystem::path> store_dir;
};

template <typename Json>
SimulationConfig simulation_config_from_json(const Json& j) {
    SimulationConfig c;
    c.loops = j.value("loops", c.loops);
    c.quota = j.value("quota", c.quota);
    c.seed_pairs = j.value("seed_pairs", c.seed_pairs);
    if (j.contains("strategy")) c.strategy = strategy_kind_from_string(j.at("strategy").template get<std::string>());
    c.chunk_admit_limit = j.value("chunk_admit_limit", c.chunk_admit_limit);
    c.chunks_per_request = j.value("chunks_per_request", c.chunks_per_request);
    c.max_chunks_per_loop = j.value("max_chunks_per_loop", c.max_chunks_per_loop);
    return c;
}

struct SimulationResult {
    std::vector<LoopReport> reports; ///< seed version first, then one per closed loop
    bool stalled = false;
    std::string stalled_loop;
    std::string state_dump;
};

/// Seed version V1: the first `n` well-formed mock pairs, labeled by
/// vocabulary and stored UNTOUCHED with strategy SEED.
inline std::string seed_jsonl(MockAuthor& author, std::size_t n) {
    std::string out;
    std::size_t made = 0;
    while (made < n) {
        for (const auto& chunk : author.generate(tags::open_hs, 1)) {
            for (const auto& p : parse_generation(chunk, TrainingFormat::PLAIN).pairs) {
                if (made == n) break;
                auto tokens = tokenize(p.hs);
                for (auto& t : tokenize(p.cn)) tokens.push_back(std::move(t));
                PairRecord r;
                r.id = "V1-" + std::to_string(made);
                r.version = "V1";
                r.hs_original = p.hs;
                r.cn_original = p.cn;
                r.status = ReviewStatus::UNTOUCHED;
                r.target = author.config().vocabulary.classify(tokens).value_or(TargetLabel::OTHER);
                r.chunk_index = made;
                out += to_json(r).dump() + '\n';
                ++made;
            }
        }
    }
    return out;
}

inline std::string loop_name(std::size_t i) { return "V" + std::to_string(i + 2); }

inline SimulationResult run_simulation(const SimulationConfig& config, const MockAuthorConfig& author_config,
                                       const ScriptedReviewerConfig& reviewer_config) {
    std::unique_ptr<Store> store = config.store_dir ? std::make_unique<Store>(*config.store_dir)
                                                    : std::make_unique<Store>();
    if (!store->version_names().empty()) fail(ErrorCode::precondition_failed, "simulation needs a fresh store");
    MockAuthor author(author_config);
    MockAuthorClient client(author);
    ScriptedReviewer reviewer(reviewer_config, author_config.vocabulary);
    OrchestratorOptions options;
    options.report = config.report;
    Orchestrator orch(*store, &client, options);

    SimulationResult result;
    std::istringstream seed(seed_jsonl(author, config.seed_pairs));
    store->import_pairs(seed, "V1");
    store->freeze("V1");
    result.reports.push_back(orch.report("V1"));

    for (std::size_t i = 0; i < config.loops; ++i) {
        LoopConfig lc;
        lc.name = loop_name(i);
        lc.strategy.kind = config.strategy;
        lc.quota = config.quota;
        lc.chunk_admit_limit = config.chunk_admit_limit;
        orch.start_loop(lc);

        std::size_t requested = 0;
        while (orch.status(lc.name).accepted < config.quota) {
            auto record = orch.next_for_review(reviewer_config.annotator);
            if (!record) {
                if (requested >= config.max_chunks_per_loop) {
                    result.stalled = true;
                    result.stalled_loop = lc.name;
                    break;
                }
                const auto n = std::min(config.chunks_per_request, config.max_chunks_per_loop - requested);
                orch.request_generation(lc.name, n);
                requested += n;
                continue;
            }
            orch.submit_review(reviewer.review(*record).decision);
        }
        if (result.stalled) break;
        result.reports.push_back(orch.close_loop(lc.name).report);
    }
    result.state_dump = store->state_dump();
    return result;
}

} // namespace hitl::sim
