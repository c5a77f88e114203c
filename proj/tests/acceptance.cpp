// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 when
// any criterion fails. INFO lines are diagnostics, not criteria.

#include "hitl/hitl.hpp"
#include "oracles.hpp"
#include "published_fixtures.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace hitl;

namespace {

int failures = 0;

void report(bool ok, const char* name, const std::string& detail) {
    std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    if (!ok) ++failures;
}

void info(const std::string& msg) { std::printf("INFO %s\n", msg.c_str()); }

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

void table_consistency() {
    bool ok = true;
    double worst_identity = 0.0, worst_printed = 0.0;
    double n_v2 = 0.0, n_v2_ours = 0.0;
    for (const auto& row : fixture::kBalanceRows) {
        std::vector<std::uint64_t> seven(row.counts.begin(), row.counts.end());
        std::vector<std::uint64_t> six(row.counts.begin() + 1, row.counts.end());
        const BalanceError e[4] = {distribution_balance(seven, FrequencyMode::absolute),
                                   distribution_balance(seven, FrequencyMode::percentage),
                                   distribution_balance(six, FrequencyMode::absolute),
                                   distribution_balance(six, FrequencyMode::percentage)};
        for (int i = 0; i < 4; ++i) {
            const double rel = std::abs(e[i].mse - e[i].rmse * e[i].rmse) / std::max(1.0, e[i].mse);
            worst_identity = std::max(worst_identity, rel);
            worst_printed = std::max(worst_printed, std::abs(std::round(e[i].rmse * 1000) / 1000 - row.printed[i]));
            worst_printed = std::max(worst_printed, std::abs(std::round(e[i].mse * 1000) / 1000 - row.printed[4 + i]));
        }
        if (row.version == "V2") {
            n_v2 = 100.0 * row.printed[0] / row.printed[1];
            n_v2_ours = 100.0 * e[0].rmse / e[1].rmse;
        }
    }
    ok = worst_identity <= 1e-6 && worst_printed < 5e-4 + 1e-9 && std::abs(n_v2 - 620) <= 1 &&
         std::abs(n_v2_ours - 620) / 620 <= 1e-6;
    report(ok, "table-consistency",
           "max |mse-rmse^2| rel " + fmt("%.2e", worst_identity) + ", max deviation from printed " +
               fmt("%.4f", worst_printed) + ", V2 N from printed ratio " + fmt("%.3f", n_v2) + ", from ours " +
               fmt("%.9f", n_v2_ours));
}

void final_dataset() {
    const auto cov = coverage_percentages(fixture::kFinalCounts);
    double worst = 0.0;
    for (std::size_t i = 0; i < cov.size(); ++i)
        worst = std::max(worst, std::abs(std::round(cov[i] * 100) / 100 - fixture::kFinalCoverage[i]));
    std::vector<std::uint64_t> main(fixture::kFinalCounts.begin(), fixture::kFinalCounts.begin() + 7);
    double n = 0;
    for (auto c : main) n += static_cast<double>(c);
    std::vector<double> abs_v, perc_v;
    for (auto c : main) {
        abs_v.push_back(static_cast<double>(c));
        perc_v.push_back(100.0 * static_cast<double>(c) / n);
    }
    const double d_abs = std::abs(distribution_balance(main, FrequencyMode::absolute).rmse - oracle::rmse(abs_v, n / 7));
    const double d_perc =
        std::abs(distribution_balance(main, FrequencyMode::percentage).rmse - oracle::rmse(perc_v, 100.0 / 7));
    report(worst <= 0.01 + 1e-12 && d_abs <= 1e-9 && d_perc <= 1e-9, "final-dataset",
           "coverage max deviation " + fmt("%.4f", worst) + " (DISABLED " + fmt("%.2f", cov[0]) +
               "), balance vs oracle abs " + fmt("%.1e", d_abs) + " perc " + fmt("%.1e", d_perc));
}

void ter_oracle() {
    std::mt19937_64 rng(2024);
    std::size_t mismatches = 0, shift_free = 0, shift_free_bad = 0, with_shift = 0;
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::pair<oracle::Tokens, oracle::Tokens>> cases;
    for (int iter = 0; iter < 1000; ++iter) {
        const std::size_t alpha = 2 + rng() % 6;
        oracle::Tokens ref(1 + rng() % 8), hyp(rng() % 9);
        for (auto& t : ref) t = "w" + std::to_string(rng() % alpha);
        if (iter % 2 == 0) {
            // Perturbations of the reference exercise the shift search.
            hyp = ref;
            const auto ops = 1 + rng() % 3;
            for (std::size_t k = 0; k < ops; ++k) {
                if (rng() % 2 && hyp.size() > 1) {
                    const auto s = rng() % hyp.size();
                    const auto l = 1 + rng() % (hyp.size() - s);
                    hyp = oracle::move_block(hyp, s, l, rng() % (hyp.size() - l + 1));
                } else if (!hyp.empty()) {
                    hyp[rng() % hyp.size()] = "w" + std::to_string(rng() % alpha);
                }
            }
            if (hyp.size() > 8) hyp.resize(8);
        } else {
            for (auto& t : hyp) t = "w" + std::to_string(rng() % alpha);
        }
        cases.emplace_back(hyp, ref);
    }
    for (const auto& [hyp, ref] : cases) {
        const auto got = ter_detail(hyp, ref);
        const auto want = oracle::ter_greedy(hyp, ref);
        if (got.score != want.score || got.shifts != want.shifts) ++mismatches;
        if (want.shifts == 0) {
            ++shift_free;
            const double dp = static_cast<double>(oracle::edit_distance(hyp, ref)) / static_cast<double>(ref.size());
            if (got.score != dp) ++shift_free_bad;
        } else {
            ++with_shift;
        }
    }
    const double elapsed = seconds_since(t0);
    report(mismatches == 0 && shift_free_bad == 0 && elapsed < 10.0, "ter-oracle",
           std::to_string(cases.size()) + " instances, " + std::to_string(mismatches) +
               " mismatches vs exhaustive greedy shift+edit search (" + std::to_string(with_shift) +
               " with shifts), " + std::to_string(shift_free_bad) + "/" + std::to_string(shift_free) +
               " shift-free instances off DP/|ref|, " + fmt("%.2f s", elapsed));

    // Distance of the greedy score from the unrestricted optimum.
    std::size_t above = 0, checked = 0;
    for (const auto& [hyp, ref] : cases) {
        if (hyp.size() > 6 || ref.size() > 6) continue;
        ++checked;
        const auto opt = oracle::ter_optimal_cost(hyp, ref);
        const auto g = ter_detail(hyp, ref);
        if (g.shifts + g.edits > opt) ++above;
    }
    info("ter greedy cost above unrestricted optimum on " + std::to_string(above) + " of " + std::to_string(checked) +
         " instances with both lengths <= 6");
}

std::vector<TokenSequence> random_corpus(std::mt19937_64& rng, std::size_t n, std::size_t vocab, const std::string& prefix) {
    std::vector<TokenSequence> out(n);
    for (auto& s : out) {
        s.resize(1 + rng() % 10);
        for (auto& t : s) t = prefix + std::to_string(rng() % vocab);
    }
    return out;
}

void novelty_properties() {
    std::mt19937_64 rng(77);
    std::size_t self_bad = 0, disjoint_bad = 0, growth_bad = 0, brute_bad = 0;
    for (int iter = 0; iter < 200; ++iter) {
        const auto c = random_corpus(rng, 1 + rng() % 30, 40, "a");
        const auto r = random_corpus(rng, 1 + rng() % 30, 40, "a");
        const auto extra = random_corpus(rng, 1 + rng() % 10, 40, "a");
        const auto other = random_corpus(rng, 1 + rng() % 10, 40, "b");
        if (novelty(c, c) != 0.0) ++self_bad;
        if (novelty(c, other) != 1.0) ++disjoint_bad;
        auto grown = r;
        grown.insert(grown.end(), extra.begin(), extra.end());
        if (novelty(c, grown) > novelty(c, r)) ++growth_bad;
    }
    for (int iter = 0; iter < 200; ++iter) {
        const auto c = random_corpus(rng, 1 + rng() % 20, 15, "a");
        const auto r = random_corpus(rng, 1 + rng() % 20, 15, "a");
        if (novelty(c, r) != oracle::novelty(c, r)) ++brute_bad;
    }
    report(self_bad + disjoint_bad + growth_bad + brute_bad == 0, "novelty-properties",
           "200 corpora: self!=0 " + std::to_string(self_bad) + ", disjoint!=1 " + std::to_string(disjoint_bad) +
               ", growth violations " + std::to_string(growth_bad) + "; 200 brute-force corpora (<=20 sentences), " +
               std::to_string(brute_bad) + " inexact");
}

void repetition_rate_checks() {
    // Natural-ish text: mock author output at several sizes.
    sim::MockAuthor author(sim::MockAuthorConfig{});
    std::vector<TokenSequence> units;
    double worst = 0.0;
    std::size_t fixtures = 0;
    for (const auto& chunk : author.generate("<|startofhs|>", 120))
        for (const auto& p : parse_generation(chunk, TrainingFormat::PLAIN).pairs) units.push_back(tokenize(p.cn));
    for (std::size_t take : {180u, 260u, 400u, 700u, 1000u}) {
        std::vector<TokenSequence> base(units.begin(), units.begin() + static_cast<std::ptrdiff_t>(take));
        std::size_t tokens = 0;
        for (const auto& u : base) tokens += u.size();
        if (tokens < 2000) continue;
        auto doubled = base;
        doubled.insert(doubled.end(), base.begin(), base.end());
        worst = std::max(worst, std::abs(repetition_rate(doubled) - repetition_rate(base)));
        ++fixtures;
    }
    TokenSequence s;
    for (int i = 0; i < 100; ++i) s.push_back("d" + std::to_string(i));
    for (int rep = 0; rep < 2; ++rep)
        for (int i = 0; i < 50; ++i) s.push_back("b" + std::to_string(i));
    std::vector<TokenSequence> hand = {s};
    const double got = repetition_rate(hand);
    const double counted = 100.0 * std::pow((50.0 * 49 * 48 * 47) / std::pow(150.0, 4), 0.25);
    const double oracle_v = oracle::repetition_rate(s);
    const bool ok = fixtures >= 3 && worst < 1.0 && std::abs(got - oracle_v) <= 1e-9 && std::abs(got - counted) <= 1e-9;
    report(ok, "repetition-rate",
           "max |RR(dup)-RR| over " + std::to_string(fixtures) + " fixtures >= 2000 tokens: " + fmt("%.4f", worst) +
               "; 200-token fixture " + fmt("%.12f", got) + " vs oracle " + fmt("%.12f", oracle_v));
}

void imbalance_checks() {
    std::vector<std::uint64_t> extreme = {0, 0, 30};
    const double id = imbalance_degree(extreme);
    std::mt19937_64 rng(99);
    double worst = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<std::uint64_t> c(3 + rng() % 7);
        for (auto& x : c) x = rng() % 200;
        c[rng() % c.size()] += 1;
        worst = std::max(worst, std::abs(imbalance_degree(c) - oracle::imbalance_degree(c)));
    }
    std::size_t iff_bad = 0;
    for (int iter = 0; iter < 200; ++iter) {
        const std::size_t k = 2 + rng() % 8;
        std::vector<std::uint64_t> c(k, 1 + rng() % 50);
        if (imbalance_degree(c) != 0.0) ++iff_bad;
        c[rng() % k] += 1 + rng() % 5;
        if (!(imbalance_degree(c) > 0.0)) ++iff_bad;
    }
    std::size_t scale_bad = 0;
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<std::uint64_t> c(3 + rng() % 7), d;
        for (auto& x : c) x = rng() % 100;
        c[0] += 1;
        const auto f = 2 + rng() % 1000;
        for (auto x : c) d.push_back(x * f);
        if (imbalance_degree(c) != imbalance_degree(d)) ++scale_bad;
    }
    report(id == 2.0 && worst <= 1e-6 && iff_bad == 0 && scale_bad == 0, "imbalance-degree",
           "ID([0,0,30]) = " + fmt("%.17g", id) + ", max |ID-oracle| on 100 distributions (K 3..9) " +
               fmt("%.2e", worst) + ", zero-iff-balanced violations " + std::to_string(iff_bad) +
               ", scale violations " + std::to_string(scale_bad));
}

void vocabulary_checks() {
    std::mt19937_64 rng(5);
    double worst = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<TokenSequence> gen(20), fin(20), past(30);
        std::vector<VocabularyItem> cur;
        std::vector<HistoryItem> hist;
        auto fill = [&](TokenSequence& s) {
            s.resize(1 + rng() % 8);
            for (auto& t : s) t = "v" + std::to_string(rng() % 60);
        };
        for (std::size_t i = 0; i < 20; ++i) {
            fill(gen[i]);
            fill(fin[i]);
            cur.push_back({kAllTargets[rng() % kTargetCount], &gen[i], &fin[i]});
        }
        for (auto& p : past) {
            fill(p);
            hist.push_back({kAllTargets[rng() % kTargetCount], &p});
        }
        auto v = vocabulary_expansion(cur, hist);
        for (const auto& b : v.per_target)
            if (b)
                worst = std::max(worst, std::abs(b->author_novel + b->author_same_target + b->author_other_target +
                                                 b->reviewer_novel + b->reviewer_not_novel - 100.0));
    }
    const auto g = tokenize("a b c ."), f = tokenize("a b d .");
    std::vector<VocabularyItem> hand = {{TargetLabel::JEWS, &g, &f}};
    const auto h = *vocabulary_expansion(hand, {}).per_target[index_of(TargetLabel::JEWS)];
    const bool hand_ok = std::abs(h.author_novel - 66.7) < 0.05 && std::abs(h.reviewer_novel - 33.3) < 0.05;

    const auto past_w = tokenize("we choose peace"), gen_j = tokenize("peace matters"), fin_j = tokenize("peace matters");
    std::vector<HistoryItem> ph = {{TargetLabel::WOMEN, &past_w}};
    std::vector<VocabularyItem> pc = {{TargetLabel::JEWS, &gen_j, &fin_j}};
    const auto x = *vocabulary_expansion(pc, ph).per_target[index_of(TargetLabel::JEWS)];
    const bool cross_ok = x.author_other_target == 50.0 && x.author_novel == 50.0;
    report(worst <= 1e-9 && hand_ok && cross_ok, "vocabulary-expansion",
           "max |sum-100| " + fmt("%.1e", worst) + " over 200 instances; hand example (" + fmt("%.1f", h.author_novel) +
               ", " + fmt("%.1f", h.reviewer_novel) + "); seeded word in author_other_target: " +
               (cross_ok ? "yes" : "no"));
}

std::string random_text(std::mt19937_64& rng) {
    static const std::vector<std::string> pieces = {"word", "Hate", "they're", "9/11", "!", "?", ",", "é", "ünïcode",
                                                    "«q»", "<", "|", ">", "<|", "|>", "start", "of", "hs", ":",
                                                    "中文", "emoji\xF0\x9F\x98\x80", "a-b", "\"x\""};
    std::string s;
    const auto n = 1 + rng() % 12;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) s += rng() % 5 ? " " : "  ";
        s += pieces[rng() % pieces.size()];
    }
    return s;
}

void parser_round_trip() {
    std::mt19937_64 rng(31337);
    std::size_t bad = 0, generated = 0;
    for (auto format : {TrainingFormat::PLAIN, TrainingFormat::LABELED}) {
        std::string exported;
        std::vector<ParsedPair> expected;
        while (expected.size() < 1000) {
            ParsedPair p{random_text(rng), random_text(rng), std::nullopt};
            if (tags::contains_any(p.hs) || tags::contains_any(p.cn)) continue;
            if (format == TrainingFormat::LABELED) p.label = kAllTargets[rng() % kTargetCount];
            exported += training_line(p.hs, p.cn, format, p.label) + "\n";
            expected.push_back(p);
        }
        generated += expected.size();
        const auto parsed = parse_generation(exported, format);
        if (parsed.pairs != expected || !parsed.diagnostics.empty()) ++bad;
    }
    // Also through the store: import, freeze, export, parse.
    {
        Store store;
        std::string jsonl;
        std::vector<ParsedPair> expected;
        for (int i = 0; i < 1000; ++i) {
            PairRecord r;
            r.id = "r" + std::to_string(i);
            r.version = "V1";
            do {
                r.hs_original = random_text(rng);
                r.cn_original = random_text(rng);
            } while (tags::contains_any(r.hs_original) || tags::contains_any(r.cn_original));
            r.status = ReviewStatus::UNTOUCHED;
            r.target = kAllTargets[rng() % kTargetCount];
            jsonl += to_json(r).dump() + "\n";
            expected.push_back({r.hs_original, r.cn_original, r.target});
        }
        std::istringstream in(jsonl);
        store.import_pairs(in, "V1");
        store.freeze("V1");
        if (parse_generation(store.export_training("V1", TrainingFormat::LABELED), TrainingFormat::LABELED).pairs != expected)
            ++bad;
    }

    // Adversarial noise: tag fragments, random bytes, near-miss tags.
    static const std::vector<std::string> noise = {"<|startofhs|>", "<|endofhs|>", "<|startofcn|>", "<|endofcn|>",
                                                   "<|startofhs: JEWS|>", "<|startofhs:", "<|startofhs: BOGUS|>",
                                                   "<|", "|>", "<|startof", "\n", " ", "text", "\0", "\xff\xfe"};
    std::string blob;
    while (blob.size() < (1u << 20)) {
        if (rng() % 4 == 0) blob += static_cast<char>(rng() % 256);
        else blob += noise[rng() % noise.size()];
    }
    std::size_t crashes = 0, unaccounted = 0, opens = 0;
    for (std::size_t pos = blob.find(tags::open_hs_prefix); pos != std::string::npos;
         pos = blob.find(tags::open_hs_prefix, pos + 1))
        ++opens;
    for (auto format : {TrainingFormat::PLAIN, TrainingFormat::LABELED}) {
        try {
            const auto r = parse_generation(blob, format);
            if (r.pairs.size() + r.diagnostics.size() != r.fragments || r.fragments != opens) ++unaccounted;
        } catch (...) {
            ++crashes;
        }
    }
    report(bad == 0 && crashes == 0 && unaccounted == 0, "parser-round-trip",
           std::to_string(generated) + " random pairs in both formats plus 1000 through the store, " +
               std::to_string(bad) + " failed round trips; " + fmt("%.0f", static_cast<double>(blob.size())) +
               " bytes of noise, " + std::to_string(opens) + " fragments, " + std::to_string(crashes) +
               " crashes, " + std::to_string(unaccounted) + " accounting errors");
}

void end_to_end() {
    namespace fs = std::filesystem;
    const auto root = fs::temp_directory_path() / ("hitl-acceptance-" + std::to_string(std::random_device{}()));
    sim::SimulationConfig sc;
    sc.loops = 3;
    sc.quota = 50;
    sc.seed_pairs = 50;
    sim::MockAuthorConfig ac;
    ac.seed = 11;
    ac.malformed_rate = 0.1;
    ac.repetition_bias = 0.05;
    sim::ScriptedReviewerConfig rc;
    rc.seed = 12;

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<sim::SimulationResult> runs;
    for (int i = 0; i < 2; ++i) {
        sc.store_dir = root / std::to_string(i);
        runs.push_back(sim::run_simulation(sc, ac, rc));
    }
    const double elapsed = seconds_since(t0) / 2;

    bool identical = runs[0].reports.size() == runs[1].reports.size() && runs[0].state_dump == runs[1].state_dump;
    for (std::size_t i = 0; identical && i < runs[0].reports.size(); ++i)
        identical = to_json(runs[0].reports[i]).dump() == to_json(runs[1].reports[i]).dump();

    std::size_t recompute_bad = 0;
    {
        Store store(root / "0");
        for (const auto& rep : runs[0].reports) {
            const auto again = loop_report(store.snapshot(rep.version), store.history(rep.version));
            if (to_json(again).dump() != to_json(rep).dump()) ++recompute_bad;
        }
    }
    std::error_code ec;
    fs::remove_all(root, ec);
    const bool complete = !runs[0].stalled && runs[0].reports.size() == 4;
    report(complete && elapsed < 60.0 && identical && recompute_bad == 0, "end-to-end-simulation",
           "3 loops x quota 50, " + fmt("%.2f s per run", elapsed) + ", runs identical: " +
               (identical ? "yes" : "no") + ", reports differing from standalone recompute: " +
               std::to_string(recompute_bad) + (complete ? "" : ", run stalled"));
}

} // namespace

int main() {
    table_consistency();
    final_dataset();
    ter_oracle();
    novelty_properties();
    repetition_rate_checks();
    imbalance_checks();
    vocabulary_checks();
    parser_round_trip();
    end_to_end();
    std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "OK", failures);
    return failures ? 1 : 0;
}
