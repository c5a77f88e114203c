#pragma once

// Deterministic stand-in for the author model.
//
// Every target owns closed HS and CN word lists, so which words a pair can
// contain is known in advance. Novel words are minted fresh on demand and
// never repeat. Output follows the pair grammar except for chunks picked by
// the malformed rate.

#include "hitl/core/target.hpp"
#include "hitl/corpus/record.hpp"
#include "hitl/loop/author_client.hpp"
#include "hitl/sim/rng.hpp"
#include "hitl/text/tokenizer.hpp"

#include <httplib.h>
#include <json.hpp>

#include <array>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace hitl::sim {

struct TargetVocabulary {
    std::vector<std::string> hs_words;
    std::vector<std::string> cn_words;
};

struct MockVocabulary {
    std::array<TargetVocabulary, kTargetCount> by_target;
    /// Words only the scripted reviewer uses.
    std::vector<std::string> reviewer_words;

    /// Pronounceable letter-only words, disjoint between targets and lists.
    static MockVocabulary synthetic(std::size_t words_per_list = 40) {
        static constexpr std::array<std::string_view, kTargetCount> stems = {"dis", "jew", "lgb", "mig",
                                                                             "mus", "poc", "wom", "oth"};
        MockVocabulary v;
        for (std::size_t t = 0; t < kTargetCount; ++t)
            for (std::size_t i = 0; i < words_per_list; ++i) {
                v.by_target[t].hs_words.push_back(std::string(stems[t]) + "h" + letters(i));
                v.by_target[t].cn_words.push_back(std::string(stems[t]) + "c" + letters(i));
            }
        for (std::size_t i = 0; i < words_per_list; ++i) v.reviewer_words.push_back("rev" + letters(i));
        return v;
    }

    /// Base-26 letter code of n ("a", "b", ..., "ba", ...).
    static std::string letters(std::size_t n) {
        std::string s;
        do {
            s.insert(s.begin(), static_cast<char>('a' + n % 26));
            n /= 26;
        } while (n > 0);
        return s;
    }

    /// Target whose lists contain the most tokens of `tokens`; ties go to the
    /// earlier target. nullopt when no token belongs to any list.
    std::optional<TargetLabel> classify(const TokenSequence& tokens) const {
        ensure_index();
        std::array<std::size_t, kTargetCount> hits{};
        for (const auto& tok : tokens)
            if (auto it = owner_.find(tok); it != owner_.end()) ++hits[index_of(it->second)];
        std::optional<TargetLabel> best;
        std::size_t best_hits = 0;
        for (TargetLabel t : kAllTargets)
            if (hits[index_of(t)] > best_hits) {
                best_hits = hits[index_of(t)];
                best = t;
            }
        return best;
    }

private:
    void ensure_index() const {
        if (!owner_.empty()) return;
        for (TargetLabel t : kAllTargets) {
            for (const auto& w : by_target[index_of(t)].hs_words) owner_.emplace(w, t);
            for (const auto& w : by_target[index_of(t)].cn_words) owner_.emplace(w, t);
        }
    }

    mutable std::map<std::string, TargetLabel> owner_;
};

struct LengthRange {
    std::size_t min = 1;
    std::size_t max = 1;
};

struct MockAuthorConfig {
    std::uint64_t seed = 1;
    MockVocabulary vocabulary = MockVocabulary::synthetic();
    /// Relative frequency of each target for unlabeled conditions.
    std::array<double, kTargetCount> target_weights = {1, 1, 1, 1, 1, 1, 1, 0};
    double novel_rate = 0.05;
    double malformed_rate = 0.0;
    double repetition_bias = 0.0;
    /// Probability that a word comes from another main target's list.
    double cross_target_rate = 0.02;
    LengthRange pairs_per_chunk{9, 9};
    LengthRange hs_length{6, 12};
    LengthRange cn_length{8, 16};
};

template <typename Json>
MockAuthorConfig mock_author_config_from_json(const Json& j) {
    MockAuthorConfig c;
    c.seed = j.value("seed", c.seed);
    c.novel_rate = j.value("novel_rate", c.novel_rate);
    c.malformed_rate = j.value("malformed_rate", c.malformed_rate);
    c.repetition_bias = j.value("repetition_bias", c.repetition_bias);
    c.cross_target_rate = j.value("cross_target_rate", c.cross_target_rate);
    if (j.contains("words_per_list")) c.vocabulary = MockVocabulary::synthetic(j.at("words_per_list").template get<std::size_t>());
    if (auto it = j.find("target_weights"); it != j.end())
        for (const auto& [k, v] : it->items()) c.target_weights[index_of(target_from_string(k))] = v.template get<double>();
    auto range = [&](const char* key, LengthRange& r) {
        if (auto it = j.find(key); it != j.end()) {
            r.min = it->at(0).template get<std::size_t>();
            r.max = it->at(1).template get<std::size_t>();
        }
    };
    range("pairs_per_chunk", c.pairs_per_chunk);
    range("hs_length", c.hs_length);
    range("cn_length", c.cn_length);
    for (double p : {c.novel_rate, c.malformed_rate, c.repetition_bias, c.cross_target_rate})
        if (p < 0.0 || p > 1.0) fail(ErrorCode::invalid_argument, "mock author rates must lie in [0, 1]");
    return c;
}

class MockAuthor {
public:
    explicit MockAuthor(MockAuthorConfig config) : config_(std::move(config)), rng_(config_.seed) {
        for (auto* r : {&config_.pairs_per_chunk, &config_.hs_length, &config_.cn_length})
            if (r->min == 0 || r->min > r->max) fail(ErrorCode::invalid_argument, "mock author length range is invalid");
    }

    const MockAuthorConfig& config() const { return config_; }

    /// Chunks for `condition`. A labeled open tag fixes the target and the
    /// tag form of every pair; text after the tag starts the first HS.
    std::vector<std::string> generate(std::string_view condition, std::size_t n_chunks) {
        std::optional<TargetLabel> label;
        std::string prefix;
        std::string_view rest = condition;
        if (rest.substr(0, tags::open_hs_prefix.size()) == tags::open_hs_prefix) {
            const auto close = rest.find("|>");
            if (close != std::string_view::npos) {
                auto head = rest.substr(tags::open_hs_prefix.size(), close - tags::open_hs_prefix.size());
                if (!head.empty() && head.front() == ':') {
                    head.remove_prefix(1);
                    while (!head.empty() && head.front() == ' ') head.remove_prefix(1);
                    label = parse_target(head);
                }
                rest.remove_prefix(close + 2);
            }
        }
        while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
        prefix = std::string(rest);

        std::vector<std::string> out;
        for (std::size_t c = 0; c < n_chunks; ++c) out.push_back(chunk(label, prefix));
        return out;
    }

private:
    struct Sentence {
        TargetLabel target;
        std::string text;
    };

    TargetLabel draw_target() {
        return kAllTargets[rng_.weighted(config_.target_weights)];
    }

    std::string novel_word(TargetLabel t) {
        return "nov" + std::string(1, static_cast<char>('a' + index_of(t))) + MockVocabulary::letters(novel_counter_++);
    }

    std::string sentence(TargetLabel t, bool hs, LengthRange len, std::vector<Sentence>& history) {
        std::vector<const Sentence*> same;
        if (rng_.chance(config_.repetition_bias)) {
            for (const auto& s : history)
                if (s.target == t) same.push_back(&s);
            if (!same.empty()) return same[rng_.below(same.size())]->text;
        }
        const auto n = rng_.between(len.min, len.max);
        std::string text;
        for (std::uint64_t i = 0; i < n; ++i) {
            if (i) text += ' ';
            TargetLabel source = t;
            if (rng_.chance(config_.cross_target_rate)) {
                source = kMainTargets[rng_.below(kMainTargetCount - 1)];
                if (source == t) source = kMainTargets[kMainTargetCount - 1];
            }
            const auto& vocab = config_.vocabulary.by_target[index_of(source)];
            const auto& words = hs ? vocab.hs_words : vocab.cn_words;
            if (rng_.chance(config_.novel_rate)) text += novel_word(t);
            else text += words[rng_.below(words.size())];
        }
        text += " .";
        history.push_back({t, text});
        return text;
    }

    std::string chunk(std::optional<TargetLabel> label, const std::string& prefix) {
        const auto n_pairs = rng_.between(config_.pairs_per_chunk.min, config_.pairs_per_chunk.max);
        std::string text;
        std::vector<std::size_t> pair_starts;
        for (std::uint64_t p = 0; p < n_pairs; ++p) {
            const TargetLabel t = label ? *label : draw_target();
            std::string hs = sentence(t, true, config_.hs_length, hs_history_);
            if (p == 0 && !prefix.empty()) hs = prefix + " " + hs;
            const std::string cn = sentence(t, false, config_.cn_length, cn_history_);
            if (p) text += '\n';
            pair_starts.push_back(text.size());
            text += label ? tags::labeled_open_hs(*label) : std::string(tags::open_hs);
            text += ' ' + hs + ' ' + std::string(tags::end_hs) + ' ' + std::string(tags::open_cn) + ' ' + cn + ' ' +
                    std::string(tags::end_cn);
        }
        if (rng_.chance(config_.malformed_rate)) {
            const auto victim = rng_.below(pair_starts.size());
            const auto start = pair_starts[victim];
            if (rng_.chance(0.5)) {
                // Drop the victim's closing CN tag.
                const auto end = text.find(tags::end_cn, start);
                text.erase(end, tags::end_cn.size());
            } else {
                // Truncate the chunk inside the victim pair.
                const auto end = text.find(tags::end_cn, start);
                const auto open_end = text.find("|>", start) + 2;
                text.resize(open_end + rng_.below(end - open_end));
            }
        }
        return text;
    }

    MockAuthorConfig config_;
    Rng rng_;
    std::uint64_t novel_counter_ = 0;
    std::vector<Sentence> hs_history_;
    std::vector<Sentence> cn_history_;
};

/// In-process AuthorClient over a MockAuthor.
class MockAuthorClient : public AuthorClient {
public:
    explicit MockAuthorClient(MockAuthor& author) : author_(author) {}

    std::vector<std::string> generate(const GenerationRequest& request) override {
        std::lock_guard lock(mutex_);
        ++calls_;
        requests_.push_back(request);
        return author_.generate(request.condition, request.n_chunks);
    }

    std::size_t calls() const { return calls_; }
    const std::vector<GenerationRequest>& requests() const { return requests_; }

private:
    MockAuthor& author_;
    std::mutex mutex_;
    std::size_t calls_ = 0;
    std::vector<GenerationRequest> requests_;
};

/// Wire-protocol server over a MockAuthor.
class MockAuthorServer {
public:
    explicit MockAuthorServer(MockAuthor& author) : author_(author) {
        server_.Post("/generate", [this](const httplib::Request& req, httplib::Response& res) {
            try {
                const auto request = generation_request_from_json(nlohmann::json::parse(req.body));
                std::vector<std::string> chunks;
                {
                    std::lock_guard lock(mutex_);
                    chunks = author_.generate(request.condition, request.n_chunks);
                }
                nlohmann::ordered_json j;
                j["chunks"] = chunks;
                res.set_content(j.dump(), "application/json");
            } catch (const std::exception& e) {
                nlohmann::ordered_json j;
                j["error"] = "protocol_error";
                j["message"] = e.what();
                res.status = 400;
                res.set_content(j.dump(), "application/json");
            }
        });
    }

    int bind_any(const std::string& host) { return server_.bind_to_any_port(host); }
    bool listen_after_bind() { return server_.listen_after_bind(); }
    bool listen(const std::string& host, int port) { return server_.listen(host, port); }
    void stop() { server_.stop(); }

private:
    MockAuthor& author_;
    std::mutex mutex_;
    httplib::Server server_;
};

} // namespace hitl::sim
