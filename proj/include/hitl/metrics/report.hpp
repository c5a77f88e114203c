#pragma once

// Per-version metric suite. Every aggregate here works on a frozen
// VersionSnapshot plus the snapshots of its predecessors and is a pure
// function of them.

#include "hitl/core/error.hpp"
#include "hitl/core/target.hpp"
#include "hitl/corpus/version.hpp"
#include "hitl/metrics/distribution.hpp"
#include "hitl/metrics/imbalance.hpp"
#include "hitl/metrics/novelty.hpp"
#include "hitl/metrics/parallel.hpp"
#include "hitl/metrics/repetition.hpp"
#include "hitl/metrics/stats.hpp"
#include "hitl/metrics/ter.hpp"
#include "hitl/metrics/vocabulary.hpp"
#include "hitl/text/tokenizer.hpp"

#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace hitl {

enum class UnitSelector { HS, CN, PAIR };

inline std::string_view to_string(UnitSelector u) {
    switch (u) {
    case UnitSelector::HS: return "hs";
    case UnitSelector::CN: return "cn";
    case UnitSelector::PAIR: return "pair";
    }
    return "pair";
}

inline UnitSelector unit_from_string(std::string_view s) {
    if (s == "hs" || s == "HS") return UnitSelector::HS;
    if (s == "cn" || s == "CN") return UnitSelector::CN;
    if (s == "pair" || s == "PAIR") return UnitSelector::PAIR;
    fail(ErrorCode::invalid_argument, "unknown unit '" + std::string(s) + "'");
}

inline constexpr std::array<UnitSelector, 3> kAllUnits = {UnitSelector::PAIR, UnitSelector::HS, UnitSelector::CN};

/// A record with its four texts tokenized once.
struct TokenizedRecord {
    const PairRecord* record = nullptr;
    TokenSequence hs_original, cn_original, hs_final, cn_final;

    explicit TokenizedRecord(const PairRecord& r)
        : record(&r),
          hs_original(tokenize(r.hs_original)),
          cn_original(tokenize(r.cn_original)),
          hs_final(r.hs_edited ? tokenize(*r.hs_edited) : hs_original),
          cn_final(r.cn_edited ? tokenize(*r.cn_edited) : cn_original) {}

    /// HS and CN tokens are concatenated for the PAIR unit.
    TokenSequence original(UnitSelector u) const { return select(u, hs_original, cn_original); }
    TokenSequence final_text(UnitSelector u) const { return select(u, hs_final, cn_final); }

private:
    static TokenSequence select(UnitSelector u, const TokenSequence& hs, const TokenSequence& cn) {
        switch (u) {
        case UnitSelector::HS: return hs;
        case UnitSelector::CN: return cn;
        case UnitSelector::PAIR: break;
        }
        TokenSequence out = hs;
        out.insert(out.end(), cn.begin(), cn.end());
        return out;
    }
};

inline std::vector<TokenizedRecord> tokenize_records(std::span<const PairRecord> records) {
    std::vector<TokenizedRecord> out;
    out.reserve(records.size());
    for (const auto& r : records) out.emplace_back(r);
    return out;
}

// ---------------------------------------------------------------------------
// Acceptance

struct AcceptanceRates {
    std::size_t scrutinised = 0;
    std::size_t untouched = 0;
    std::size_t modified = 0;
    std::size_t discarded = 0;
    double untouched_pct = 0.0;
    double modified_pct = 0.0;
    double discarded_pct = 0.0;
    std::array<Metric, kTargetCount> per_target_untouched{};
    std::array<Metric, kTargetCount> per_target_modified{};
    MacroStat untouched_macro;
    MacroStat modified_macro;
};

/// Micro rates over every record a reviewer decided on. Per-target rates
/// need a label on every discarded pair; if any is missing, per-target and
/// macro values are undefined. Macro statistics cover the main targets that
/// had at least one reviewed pair.
inline AcceptanceRates acceptance_rates(std::span<const PairRecord> records) {
    AcceptanceRates a;
    std::array<std::size_t, kTargetCount> total_t{}, untouched_t{}, modified_t{};
    bool discards_labelled = true;
    for (const auto& r : records) {
        if (!r.scrutinised()) continue;
        ++a.scrutinised;
        switch (r.status) {
        case ReviewStatus::UNTOUCHED: ++a.untouched; break;
        case ReviewStatus::MODIFIED: ++a.modified; break;
        case ReviewStatus::DISCARDED:
            ++a.discarded;
            if (!r.target) discards_labelled = false;
            break;
        case ReviewStatus::PENDING: break;
        }
        if (r.target) {
            const auto t = index_of(*r.target);
            ++total_t[t];
            if (r.status == ReviewStatus::UNTOUCHED) ++untouched_t[t];
            if (r.status == ReviewStatus::MODIFIED) ++modified_t[t];
        }
    }
    if (a.scrutinised == 0) fail(ErrorCode::precondition_failed, "no reviewed records");
    const double n = static_cast<double>(a.scrutinised);
    a.untouched_pct = 100.0 * static_cast<double>(a.untouched) / n;
    a.modified_pct = 100.0 * static_cast<double>(a.modified) / n;
    a.discarded_pct = 100.0 * static_cast<double>(a.discarded) / n;
    if (!discards_labelled) return a;

    std::vector<double> u, m;
    for (TargetLabel t : kAllTargets) {
        const auto i = index_of(t);
        if (total_t[i] == 0) continue;
        a.per_target_untouched[i] = 100.0 * static_cast<double>(untouched_t[i]) / static_cast<double>(total_t[i]);
        a.per_target_modified[i] = 100.0 * static_cast<double>(modified_t[i]) / static_cast<double>(total_t[i]);
        if (is_main_target(t)) {
            u.push_back(*a.per_target_untouched[i]);
            m.push_back(*a.per_target_modified[i]);
        }
    }
    if (!u.empty()) {
        a.untouched_macro = {mean_of(u), sample_std(u)};
        a.modified_macro = {mean_of(m), sample_std(m)};
    }
    return a;
}

// ---------------------------------------------------------------------------
// HTER

enum class HterScope { ALL, MODIFIED };

struct HterAggregate {
    Metric micro;
    MacroStat macro;
    std::size_t pairs = 0;
};

/// Per accepted pair, TER of the generated text against the final text.
/// Untouched pairs score 0 and are left out under HterScope::MODIFIED.
inline HterAggregate hter_aggregate(std::span<const TokenizedRecord> records, HterScope scope, UnitSelector unit,
                                    const TerOptions& options = {}, std::size_t threads = 1) {
    std::vector<const TokenizedRecord*> chosen;
    for (const auto& r : records) {
        if (!r.record->accepted()) continue;
        if (scope == HterScope::MODIFIED && r.record->status != ReviewStatus::MODIFIED) continue;
        chosen.push_back(&r);
    }
    HterAggregate out;
    out.pairs = chosen.size();
    if (chosen.empty()) return out;

    std::vector<double> scores(chosen.size(), 0.0);
    parallel_for(chosen.size(), threads, [&](std::size_t i) {
        const auto& r = *chosen[i];
        if (r.record->status == ReviewStatus::MODIFIED) scores[i] = ter(r.original(unit), r.final_text(unit), options);
    });
    out.micro = mean_of(scores);

    std::array<std::vector<double>, kTargetCount> by_target;
    for (std::size_t i = 0; i < chosen.size(); ++i)
        if (chosen[i]->record->target) by_target[index_of(*chosen[i]->record->target)].push_back(scores[i]);
    std::vector<double> means;
    for (TargetLabel t : kMainTargets)
        if (!by_target[index_of(t)].empty()) means.push_back(mean_of(by_target[index_of(t)]));
    if (!means.empty()) out.macro = {mean_of(means), sample_std(means)};
    return out;
}

// ---------------------------------------------------------------------------
// Lengths

struct LengthStats {
    Metric cn_or_annotated;
    Metric cn_ed_annotated;
    Metric cn_or_untouched;
    Metric cn_or_discarded;
    Metric hs_or_untouched;
};

/// Mean token counts. "Annotated" means post-edited (MODIFIED) pairs.
inline LengthStats length_stats(std::span<const TokenizedRecord> records) {
    struct Acc {
        double sum = 0;
        std::size_t n = 0;
        void add(std::size_t v) { sum += static_cast<double>(v); ++n; }
        Metric value() const { return n ? Metric(sum / static_cast<double>(n)) : std::nullopt; }
    } cn_or_mod, cn_ed_mod, cn_or_unt, cn_or_dis, hs_or_unt;
    for (const auto& r : records) {
        switch (r.record->status) {
        case ReviewStatus::MODIFIED:
            cn_or_mod.add(r.cn_original.size());
            cn_ed_mod.add(r.cn_final.size());
            break;
        case ReviewStatus::UNTOUCHED:
            cn_or_unt.add(r.cn_original.size());
            hs_or_unt.add(r.hs_original.size());
            break;
        case ReviewStatus::DISCARDED:
            if (r.record->scrutinised()) cn_or_dis.add(r.cn_original.size());
            break;
        case ReviewStatus::PENDING: break;
        }
    }
    return {cn_or_mod.value(), cn_ed_mod.value(), cn_or_unt.value(), cn_or_dis.value(), hs_or_unt.value()};
}

inline LengthStats length_stats(std::span<const PairRecord> records) {
    auto tokenized = tokenize_records(records);
    return length_stats(std::span<const TokenizedRecord>(tokenized));
}

// ---------------------------------------------------------------------------
// Novelty and repetition per version

struct NoveltyStat {
    Metric micro;
    MacroStat macro;
};

struct RepetitionStat {
    Metric micro;
    MacroStat macro;
};

struct UnitCorpus {
    std::vector<TokenSequence> texts;
    std::vector<TargetLabel> targets;
};

/// Final texts of the accepted pairs, in record order.
inline UnitCorpus accepted_corpus(std::span<const TokenizedRecord> records, UnitSelector unit) {
    UnitCorpus c;
    for (const auto& r : records) {
        if (!r.record->accepted()) continue;
        c.texts.push_back(r.final_text(unit));
        c.targets.push_back(r.record->target.value_or(TargetLabel::OTHER));
    }
    return c;
}

/// Micro novelty of all candidates against the whole reference; macro over
/// main targets, each target's candidates against the same target's
/// reference units.
inline NoveltyStat novelty_stat(const UnitCorpus& candidates, const UnitCorpus& reference, std::size_t threads = 1) {
    NoveltyStat out;
    if (candidates.texts.empty() || reference.texts.empty()) return out;
    TokenInterner interner;
    std::vector<TokenSet> cand, ref;
    for (const auto& t : candidates.texts) cand.push_back(interner.set_of(t));
    for (const auto& t : reference.texts) ref.push_back(interner.set_of(t));
    out.micro = novelty(std::span<const TokenSet>(cand), std::span<const TokenSet>(ref), threads);

    std::vector<double> per_target;
    for (TargetLabel t : kMainTargets) {
        std::vector<TokenSet> c, r;
        for (std::size_t i = 0; i < cand.size(); ++i)
            if (candidates.targets[i] == t) c.push_back(cand[i]);
        for (std::size_t i = 0; i < ref.size(); ++i)
            if (reference.targets[i] == t) r.push_back(ref[i]);
        if (c.empty() || r.empty()) continue;
        per_target.push_back(novelty(std::span<const TokenSet>(c), std::span<const TokenSet>(r), threads));
    }
    if (!per_target.empty()) out.macro = {mean_of(per_target), sample_std(per_target)};
    return out;
}

inline Metric repetition_or_undefined(std::span<const TokenSequence> texts, const RepetitionOptions& o) {
    std::size_t tokens = 0;
    for (const auto& t : texts) tokens += t.size();
    if (tokens < o.max_order) return std::nullopt;
    return repetition_rate(texts, o);
}

inline RepetitionStat repetition_stat(const UnitCorpus& corpus, const RepetitionOptions& o = {}) {
    RepetitionStat out;
    out.micro = repetition_or_undefined(corpus.texts, o);
    std::vector<double> per_target;
    for (TargetLabel t : kMainTargets) {
        std::vector<TokenSequence> texts;
        for (std::size_t i = 0; i < corpus.texts.size(); ++i)
            if (corpus.targets[i] == t) texts.push_back(corpus.texts[i]);
        if (auto rr = repetition_or_undefined(texts, o)) per_target.push_back(*rr);
    }
    if (!per_target.empty()) out.macro = {mean_of(per_target), sample_std(per_target)};
    return out;
}

// ---------------------------------------------------------------------------
// Report

struct ReportOptions {
    /// Main target left out of the "6 cat." balance columns.
    TargetLabel six_category_drop = TargetLabel::DISABLED;
    TerOptions ter;
    RepetitionOptions repetition;
    std::size_t threads = 1;
};

struct BalanceRow {
    Metric rmse_abs_7, rmse_perc_7, rmse_abs_6, rmse_perc_6;
    Metric mse_abs_7, mse_perc_7, mse_abs_6, mse_perc_6;
};

struct UnitMetrics {
    HterAggregate hter_all;
    HterAggregate hter_modified;
    NoveltyStat novelty_cumulative;
    NoveltyStat novelty_previous;
    NoveltyStat novelty_first;
    RepetitionStat repetition;
    VocabularyExpansion vocabulary;
};

struct LoopReport {
    std::string version;
    std::vector<std::string> predecessors;
    std::size_t records = 0;
    std::size_t accepted = 0;
    std::array<std::uint64_t, kTargetCount> target_counts{};
    std::array<Metric, kTargetCount> coverage{};
    Metric imbalance_degree;
    TargetLabel six_category_drop = TargetLabel::DISABLED;
    BalanceRow balance;
    std::optional<AcceptanceRates> acceptance;
    LengthStats lengths;
    std::array<UnitMetrics, 3> units; // indexed by UnitSelector

    const UnitMetrics& unit(UnitSelector u) const { return units[static_cast<std::size_t>(u)]; }
    UnitMetrics& unit(UnitSelector u) { return units[static_cast<std::size_t>(u)]; }
};

inline std::array<std::uint64_t, kTargetCount> accepted_target_counts(std::span<const PairRecord> records) {
    std::array<std::uint64_t, kTargetCount> counts{};
    for (const auto& r : records)
        if (r.accepted() && r.target) ++counts[index_of(*r.target)];
    return counts;
}

inline BalanceRow balance_row(const std::array<std::uint64_t, kTargetCount>& counts, TargetLabel drop) {
    BalanceRow row;
    std::vector<std::uint64_t> seven, six;
    for (TargetLabel t : kMainTargets) {
        seven.push_back(counts[index_of(t)]);
        if (t != drop) six.push_back(counts[index_of(t)]);
    }
    auto total = [](const std::vector<std::uint64_t>& v) {
        std::uint64_t s = 0;
        for (auto c : v) s += c;
        return s;
    };
    if (total(seven) > 0) {
        auto a = distribution_balance(seven, FrequencyMode::absolute);
        auto p = distribution_balance(seven, FrequencyMode::percentage);
        row.rmse_abs_7 = a.rmse; row.mse_abs_7 = a.mse;
        row.rmse_perc_7 = p.rmse; row.mse_perc_7 = p.mse;
    }
    if (total(six) > 0) {
        auto a = distribution_balance(six, FrequencyMode::absolute);
        auto p = distribution_balance(six, FrequencyMode::percentage);
        row.rmse_abs_6 = a.rmse; row.mse_abs_6 = a.mse;
        row.rmse_perc_6 = p.rmse; row.mse_perc_6 = p.mse;
    }
    return row;
}

/// Assembles the full report of `current` given its predecessors, oldest
/// first (the same list as current.version.predecessors).
inline LoopReport loop_report(const VersionSnapshot& current, std::span<const VersionSnapshot> history,
                              const ReportOptions& options = {}) {
    if (!current.version.frozen)
        fail(ErrorCode::precondition_failed, "version " + current.version.name + " is not frozen");
    LoopReport rep;
    rep.version = current.version.name;
    rep.predecessors = current.version.predecessors;
    rep.records = current.records.size();
    rep.accepted = current.accepted_count();
    rep.six_category_drop = options.six_category_drop;

    rep.target_counts = accepted_target_counts(current.records);
    std::uint64_t labelled = 0;
    for (auto c : rep.target_counts) labelled += c;
    if (labelled > 0) {
        auto cov = coverage_percentages(rep.target_counts);
        for (std::size_t i = 0; i < kTargetCount; ++i) rep.coverage[i] = cov[i];
        std::vector<std::uint64_t> main_counts;
        for (TargetLabel t : kMainTargets) main_counts.push_back(rep.target_counts[index_of(t)]);
        std::uint64_t main_total = 0;
        for (auto c : main_counts) main_total += c;
        if (main_total > 0) rep.imbalance_degree = imbalance_degree(main_counts);
    }
    rep.balance = balance_row(rep.target_counts, options.six_category_drop);

    bool any_reviewed = false;
    for (const auto& r : current.records) any_reviewed = any_reviewed || r.scrutinised();
    if (any_reviewed) rep.acceptance = acceptance_rates(current.records);

    const auto tokenized = tokenize_records(current.records);
    rep.lengths = length_stats(std::span<const TokenizedRecord>(tokenized));

    std::vector<std::vector<TokenizedRecord>> history_tokens;
    history_tokens.reserve(history.size());
    for (const auto& h : history) history_tokens.push_back(tokenize_records(h.records));

    for (UnitSelector unit : kAllUnits) {
        auto& um = rep.unit(unit);
        um.hter_all = hter_aggregate(tokenized, HterScope::ALL, unit, options.ter, options.threads);
        um.hter_modified = hter_aggregate(tokenized, HterScope::MODIFIED, unit, options.ter, options.threads);

        const UnitCorpus candidates = accepted_corpus(tokenized, unit);
        if (!history_tokens.empty()) {
            UnitCorpus cumulative;
            for (const auto& h : history_tokens) {
                auto c = accepted_corpus(h, unit);
                cumulative.texts.insert(cumulative.texts.end(), c.texts.begin(), c.texts.end());
                cumulative.targets.insert(cumulative.targets.end(), c.targets.begin(), c.targets.end());
            }
            um.novelty_cumulative = novelty_stat(candidates, cumulative, options.threads);
            um.novelty_first = novelty_stat(candidates, accepted_corpus(history_tokens.front(), unit), options.threads);
            um.novelty_previous = novelty_stat(candidates, accepted_corpus(history_tokens.back(), unit), options.threads);
        }
        um.repetition = repetition_stat(candidates, options.repetition);

        std::vector<TokenSequence> generated, finals, past;
        std::vector<TargetLabel> past_targets;
        std::vector<VocabularyItem> items;
        for (const auto& r : tokenized) {
            if (!r.record->accepted()) continue;
            generated.push_back(r.original(unit));
            finals.push_back(r.final_text(unit));
        }
        std::size_t k = 0;
        for (const auto& r : tokenized) {
            if (!r.record->accepted()) continue;
            items.push_back({r.record->target.value_or(TargetLabel::OTHER), &generated[k], &finals[k]});
            ++k;
        }
        for (const auto& h : history_tokens)
            for (const auto& r : h) {
                if (!r.record->accepted()) continue;
                past.push_back(r.final_text(unit));
                past_targets.push_back(r.record->target.value_or(TargetLabel::OTHER));
            }
        std::vector<HistoryItem> hist;
        hist.reserve(past.size());
        for (std::size_t i = 0; i < past.size(); ++i) hist.push_back({past_targets[i], &past[i]});
        um.vocabulary = vocabulary_expansion(items, hist);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Rendering

namespace detail {

inline nlohmann::ordered_json metric_json(const Metric& m) {
    if (m && std::isfinite(*m)) return *m;
    return "NaN";
}

inline std::string metric_text(const Metric& m) {
    if (!m || !std::isfinite(*m)) return "NaN";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", *m);
    return buf;
}

inline nlohmann::ordered_json macro_json(const MacroStat& s) {
    nlohmann::ordered_json j;
    j["avg"] = metric_json(s.avg);
    j["std"] = metric_json(s.std);
    return j;
}

inline nlohmann::ordered_json hter_json(const HterAggregate& h) {
    nlohmann::ordered_json j;
    j["micro"] = metric_json(h.micro);
    j["macro"] = macro_json(h.macro);
    j["pairs"] = h.pairs;
    return j;
}

inline nlohmann::ordered_json novelty_json(const NoveltyStat& n) {
    nlohmann::ordered_json j;
    j["micro"] = metric_json(n.micro);
    j["macro"] = macro_json(n.macro);
    return j;
}

} // namespace detail

inline nlohmann::ordered_json to_json(const LoopReport& r) {
    using detail::macro_json;
    using detail::metric_json;
    nlohmann::ordered_json j;
    j["version"] = r.version;
    j["predecessors"] = r.predecessors;
    j["records"] = r.records;
    j["accepted"] = r.accepted;

    nlohmann::ordered_json targets = nlohmann::ordered_json::object();
    for (TargetLabel t : kAllTargets) {
        nlohmann::ordered_json e;
        e["pairs"] = r.target_counts[index_of(t)];
        e["coverage"] = metric_json(r.coverage[index_of(t)]);
        targets[std::string(to_string(t))] = e;
    }
    j["targets"] = targets;
    j["imbalance_degree"] = metric_json(r.imbalance_degree);

    nlohmann::ordered_json bal;
    bal["six_category_drop"] = std::string(to_string(r.six_category_drop));
    bal["rmse_abs_7"] = metric_json(r.balance.rmse_abs_7);
    bal["rmse_perc_7"] = metric_json(r.balance.rmse_perc_7);
    bal["rmse_abs_6"] = metric_json(r.balance.rmse_abs_6);
    bal["rmse_perc_6"] = metric_json(r.balance.rmse_perc_6);
    bal["mse_abs_7"] = metric_json(r.balance.mse_abs_7);
    bal["mse_perc_7"] = metric_json(r.balance.mse_perc_7);
    bal["mse_abs_6"] = metric_json(r.balance.mse_abs_6);
    bal["mse_perc_6"] = metric_json(r.balance.mse_perc_6);
    j["balance"] = bal;

    nlohmann::ordered_json acc;
    if (r.acceptance) {
        const auto& a = *r.acceptance;
        acc["reviewed"] = a.scrutinised;
        acc["untouched"] = a.untouched;
        acc["modified"] = a.modified;
        acc["discarded"] = a.discarded;
        acc["untouched_pct"] = a.untouched_pct;
        acc["modified_pct"] = a.modified_pct;
        acc["discarded_pct"] = a.discarded_pct;
        acc["untouched_macro"] = macro_json(a.untouched_macro);
        acc["modified_macro"] = macro_json(a.modified_macro);
        nlohmann::ordered_json per = nlohmann::ordered_json::object();
        for (TargetLabel t : kAllTargets) {
            nlohmann::ordered_json e;
            e["untouched_pct"] = metric_json(a.per_target_untouched[index_of(t)]);
            e["modified_pct"] = metric_json(a.per_target_modified[index_of(t)]);
            per[std::string(to_string(t))] = e;
        }
        acc["per_target"] = per;
    } else {
        for (const char* k : {"untouched_pct", "modified_pct", "discarded_pct"}) acc[k] = "NaN";
        acc["untouched_macro"] = macro_json({});
        acc["modified_macro"] = macro_json({});
    }
    j["acceptance"] = acc;

    nlohmann::ordered_json len;
    len["cn_or_annotated"] = metric_json(r.lengths.cn_or_annotated);
    len["cn_ed_annotated"] = metric_json(r.lengths.cn_ed_annotated);
    len["cn_or_untouched"] = metric_json(r.lengths.cn_or_untouched);
    len["cn_or_discarded"] = metric_json(r.lengths.cn_or_discarded);
    len["hs_or_untouched"] = metric_json(r.lengths.hs_or_untouched);
    j["lengths"] = len;

    nlohmann::ordered_json units;
    for (UnitSelector u : kAllUnits) {
        const auto& m = r.unit(u);
        nlohmann::ordered_json uj;
        uj["hter_all"] = detail::hter_json(m.hter_all);
        uj["hter_modified"] = detail::hter_json(m.hter_modified);
        uj["novelty_cumulative"] = detail::novelty_json(m.novelty_cumulative);
        uj["novelty_previous"] = detail::novelty_json(m.novelty_previous);
        uj["novelty_first"] = detail::novelty_json(m.novelty_first);
        nlohmann::ordered_json rr;
        rr["micro"] = metric_json(m.repetition.micro);
        rr["macro"] = macro_json(m.repetition.macro);
        uj["repetition_rate"] = rr;
        nlohmann::ordered_json voc;
        voc["author_novel"] = macro_json(m.vocabulary.author_novel);
        voc["author_same_target"] = macro_json(m.vocabulary.author_same_target);
        voc["author_other_target"] = macro_json(m.vocabulary.author_other_target);
        voc["reviewer_novel"] = macro_json(m.vocabulary.reviewer_novel);
        voc["reviewer_not_novel"] = macro_json(m.vocabulary.reviewer_not_novel);
        nlohmann::ordered_json per = nlohmann::ordered_json::object();
        for (TargetLabel t : kAllTargets) {
            const auto& b = m.vocabulary.per_target[index_of(t)];
            if (!b) continue;
            nlohmann::ordered_json e;
            e["words"] = b->words;
            e["author_novel"] = b->author_novel;
            e["author_same_target"] = b->author_same_target;
            e["author_other_target"] = b->author_other_target;
            e["reviewer_novel"] = b->reviewer_novel;
            e["reviewer_not_novel"] = b->reviewer_not_novel;
            per[std::string(to_string(t))] = e;
        }
        voc["per_target"] = per;
        uj["vocabulary_expansion"] = voc;
        units[std::string(to_string(u))] = uj;
    }
    j["units"] = units;
    return j;
}

/// Row label and value pairs in the order of the comparison table, for one
/// unit selector.
inline std::vector<std::pair<std::string, Metric>> report_rows(const LoopReport& r, UnitSelector unit) {
    const auto& m = r.unit(unit);
    const AcceptanceRates* a = r.acceptance ? &*r.acceptance : nullptr;
    auto acc = [&](auto field) -> Metric { return a ? Metric(field(*a)) : std::nullopt; };
    std::vector<std::pair<std::string, Metric>> rows = {
        {"RMSE (abs.fr.) 7 cat.", r.balance.rmse_abs_7},
        {"RMSE (perc.fr.) 7 cat.", r.balance.rmse_perc_7},
        {"RMSE (abs.fr.) 6 cat.", r.balance.rmse_abs_6},
        {"RMSE (perc.fr.) 6 cat.", r.balance.rmse_perc_6},
        {"MSE (abs.fr.) 7 cat.", r.balance.mse_abs_7},
        {"MSE (perc.fr.) 7 cat.", r.balance.mse_perc_7},
        {"MSE (abs.fr.) 6 cat.", r.balance.mse_abs_6},
        {"MSE (perc.fr.) 6 cat.", r.balance.mse_perc_6},
        {"Accept.rate (untouched)", acc([](const AcceptanceRates& x) { return x.untouched_pct; })},
        {"Accept.rate (modified)", acc([](const AcceptanceRates& x) { return x.modified_pct; })},
        {"Percentage of discarded pairs", acc([](const AcceptanceRates& x) { return x.discarded_pct; })},
        {"Accept.rate (untouched) macro avg", a ? a->untouched_macro.avg : std::nullopt},
        {"Accept.rate (untouched) macro std", a ? a->untouched_macro.std : std::nullopt},
        {"Accept.rate (mod.) macro avg", a ? a->modified_macro.avg : std::nullopt},
        {"Accept.rate (mod.) macro std", a ? a->modified_macro.std : std::nullopt},
        {"Avg length CN_or annotated", r.lengths.cn_or_annotated},
        {"Avg length CN_ed annotated", r.lengths.cn_ed_annotated},
        {"Avg length CN_or untouched", r.lengths.cn_or_untouched},
        {"Avg length CN_or discarded", r.lengths.cn_or_discarded},
        {"Avg length HS_or untouched", r.lengths.hs_or_untouched},
        {"HTER (all)", m.hter_all.micro},
        {"HTER macro avg (all)", m.hter_all.macro.avg},
        {"HTER macro std (all)", m.hter_all.macro.std},
        {"HTER (mod.)", m.hter_modified.micro},
        {"HTER macro avg (mod.)", m.hter_modified.macro.avg},
        {"HTER macro std (mod.)", m.hter_modified.macro.std},
        {"Nov. cumulative", m.novelty_cumulative.micro},
        {"Nov. cumulative macro avg", m.novelty_cumulative.macro.avg},
        {"Nov. cumulative macro std", m.novelty_cumulative.macro.std},
        {"Nov. V(i) - V(i+1)", m.novelty_previous.micro},
        {"Nov. V(i) - V(i+1) macro avg", m.novelty_previous.macro.avg},
        {"Nov. V(i) - V(i+1) macro std", m.novelty_previous.macro.std},
        {"Nov. V(1) - V(i)", m.novelty_first.micro},
        {"Nov. V(1) - V(i) macro avg", m.novelty_first.macro.avg},
        {"Nov. V(1) - V(i) macro std", m.novelty_first.macro.std},
        {"RR", m.repetition.micro},
        {"RR macro avg", m.repetition.macro.avg},
        {"RR macro std", m.repetition.macro.std},
        {"Vocab. gpt2 novel", m.vocabulary.author_novel.avg},
        {"Vocab. gpt2 novel (std)", m.vocabulary.author_novel.std},
        {"Vocab. gpt2 same target", m.vocabulary.author_same_target.avg},
        {"Vocab. gpt2 same target (std)", m.vocabulary.author_same_target.std},
        {"Vocab. gpt2 other target", m.vocabulary.author_other_target.avg},
        {"Vocab. gpt2 other target (std)", m.vocabulary.author_other_target.std},
        {"Vocab. human novel", m.vocabulary.reviewer_novel.avg},
        {"Vocab. human novel (std)", m.vocabulary.reviewer_novel.std},
        {"Vocab. human not novel", m.vocabulary.reviewer_not_novel.avg},
        {"Vocab. human not novel (std)", m.vocabulary.reviewer_not_novel.std},
        {"Imbalance degree", r.imbalance_degree},
    };
    return rows;
}

/// Aligned two-column text table, one row per metric.
inline std::string render_table(const LoopReport& r, UnitSelector unit) {
    auto rows = report_rows(r, unit);
    std::size_t width = 0;
    for (const auto& [label, value] : rows) width = std::max(width, label.size());
    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(width)) << ("[" + std::string(to_string(unit)) + "]") << "  "
        << std::right << std::setw(10) << r.version << '\n';
    for (const auto& [label, value] : rows)
        out << std::left << std::setw(static_cast<int>(width)) << label << "  " << std::right << std::setw(10)
            << detail::metric_text(value) << '\n';
    return out.str();
}

} // namespace hitl
