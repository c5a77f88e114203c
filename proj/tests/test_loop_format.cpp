#include "helpers.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace hitl;
using testutil::pair_text;

TEST(Parser, TwoWellFormedPairs) {
    const auto raw = pair_text("first hs", "first cn") + "\n" + pair_text("second hs", "second cn");
    auto r = parse_generation(raw, TrainingFormat::PLAIN);
    ASSERT_EQ(r.pairs.size(), 2u);
    EXPECT_TRUE(r.diagnostics.empty());
    EXPECT_EQ(r.pairs[0].hs, "first hs");
    EXPECT_EQ(r.pairs[1].cn, "second cn");
    EXPECT_FALSE(r.pairs[0].label);
}

TEST(Parser, MissingEndTagSkipsOnlyThatPair) {
    const auto raw = std::string("<|startofhs|> broken <|endofhs|> <|startofcn|> no end\n") + pair_text("ok hs", "ok cn");
    auto r = parse_generation(raw, TrainingFormat::PLAIN);
    ASSERT_EQ(r.pairs.size(), 1u);
    EXPECT_EQ(r.pairs[0].hs, "ok hs");
    ASSERT_EQ(r.diagnostics.size(), 1u);
    EXPECT_EQ(r.diagnostics[0].offset, 0u);
    EXPECT_EQ(r.fragments, 2u);
}

TEST(Parser, LabeledTags) {
    auto r = parse_generation(pair_text("h", "c", "<|startofhs: MUSLIMS|>"), TrainingFormat::LABELED);
    ASSERT_EQ(r.pairs.size(), 1u);
    EXPECT_EQ(r.pairs[0].label, TargetLabel::MUSLIMS);
    auto plus = parse_generation(pair_text("h", "c", "<|startofhs:LGBT+ |>"), TrainingFormat::LABELED);
    ASSERT_EQ(plus.pairs.size(), 1u);
    EXPECT_EQ(plus.pairs[0].label, TargetLabel::LGBT);
}

TEST(Parser, UnknownOrMisplacedLabelIsRejected) {
    for (const char* open : {"<|startofhs: ROBOTS|>", "<|startofhs: muslims|>", "<|startofhs: MUSLIM|>"}) {
        auto r = parse_generation(pair_text("h", "c", open), TrainingFormat::LABELED);
        EXPECT_TRUE(r.pairs.empty()) << open;
        EXPECT_EQ(r.diagnostics.size(), 1u);
    }
    EXPECT_TRUE(parse_generation(pair_text("h", "c", "<|startofhs: JEWS|>"), TrainingFormat::PLAIN).pairs.empty());
    EXPECT_TRUE(parse_generation(pair_text("h", "c"), TrainingFormat::LABELED).pairs.empty());
}

TEST(Parser, RejectsEmptyTextsTrailingTextAndStrayTags) {
    for (const std::string& raw : {
             pair_text(" ", "c"),
             pair_text("h", "  "),
             pair_text("h", "c") + " trailing words",
             pair_text("h <|startofcn|>", "c"),
             std::string("<|startofhs|> h <|endofhs|> c <|endofcn|>"),
             std::string("<|startofhs h <|endofhs|> <|startofcn|> c <|endofcn|>"),
         }) {
        auto r = parse_generation(raw, TrainingFormat::PLAIN);
        EXPECT_TRUE(r.pairs.empty()) << raw;
        EXPECT_FALSE(r.diagnostics.empty()) << raw;
    }
}

TEST(Parser, NoiseNeverThrowsAndEveryFragmentIsAccounted) {
    std::mt19937_64 rng(17);
    const std::vector<std::string> pieces = {"<|startofhs|>", "<|endofhs|>", "<|startofcn|>", "<|endofcn|>",
                                             "<|startofhs: WOMEN|>", "<|", "|>", "word", " ", "\n", "\xff", ":"};
    for (int iter = 0; iter < 2000; ++iter) {
        std::string raw;
        const auto n = rng() % 30;
        for (std::size_t i = 0; i < n; ++i) raw += pieces[rng() % pieces.size()];
        for (auto format : {TrainingFormat::PLAIN, TrainingFormat::LABELED}) {
            ParseResult r;
            ASSERT_NO_THROW(r = parse_generation(raw, format));
            ASSERT_EQ(r.pairs.size() + r.diagnostics.size(), r.fragments);
        }
    }
}

TEST(Parser, RoundTripsTrainingLines) {
    const auto line = training_line("some hs", "some cn", TrainingFormat::LABELED, TargetLabel::POC);
    auto r = parse_generation(line, TrainingFormat::LABELED);
    ASSERT_EQ(r.pairs.size(), 1u);
    EXPECT_EQ(r.pairs[0], (ParsedPair{"some hs", "some cn", TargetLabel::POC}));
}

TEST(Strategy, LabRoundRobinIsBalanced) {
    ConditionSchedule s(Strategy{StrategyKind::LAB, {}, {}});
    std::array<int, kTargetCount> seen{};
    for (std::uint64_t k = 0; k < 7000; ++k) {
        auto c = s.at(k);
        ASSERT_TRUE(c.target);
        EXPECT_EQ(c.text, tags::labeled_open_hs(*c.target));
        ++seen[index_of(*c.target)];
        // Every window of 7 consecutive conditions covers all main targets.
        if (k % 7 == 6) {
            std::set<TargetLabel> window;
            for (std::uint64_t i = k - 6; i <= k; ++i) window.insert(*s.at(i).target);
            ASSERT_EQ(window.size(), kMainTargetCount);
        }
    }
    for (TargetLabel t : kMainTargets) EXPECT_EQ(seen[index_of(t)], 1000);
    EXPECT_EQ(seen[index_of(TargetLabel::OTHER)], 0);
}

TEST(Strategy, PlainIsBareOpenTag) {
    ConditionSchedule s(Strategy{});
    EXPECT_EQ(s.at(0).text, "<|startofhs|>");
    EXPECT_EQ(s.at(99).text, "<|startofhs|>");
}

TEST(Strategy, SbfRotatesTargetsAndStatements) {
    Strategy st;
    st.kind = StrategyKind::SBF;
    st.label_mapping = default_sbf_mapping();
    st.condition_pool = {{"jews", "j one"}, {"Black folks", "p one"}, {"jewish folks", "j two"}, {"gypsies", "o one"}};
    ConditionSchedule s(st);
    EXPECT_EQ(s.at(0).text, "<|startofhs|> j one");
    EXPECT_EQ(s.at(0).target, TargetLabel::JEWS);
    EXPECT_EQ(s.at(1).text, "<|startofhs|> p one");
    EXPECT_EQ(s.at(2).target, TargetLabel::OTHER);
    EXPECT_EQ(s.at(3).text, "<|startofhs|> j two");
    EXPECT_EQ(s.at(6).text, "<|startofhs|> j one");
}

TEST(Strategy, SbfNeedsMappedLabels) {
    Strategy st;
    st.kind = StrategyKind::SBF;
    st.label_mapping = default_sbf_mapping();
    st.condition_pool = {{"martians", "x"}};
    EXPECT_THROW(ConditionSchedule{st}, Error);
    st.condition_pool = {{std::nullopt, "x"}};
    EXPECT_THROW(ConditionSchedule{st}, Error);
}

TEST(Strategy, DefaultMappingCoversTable) {
    const auto m = default_sbf_mapping();
    EXPECT_EQ(resolve_label(m, "Holocaust victims"), TargetLabel::JEWS);
    EXPECT_EQ(resolve_label(m, "african"), TargetLabel::POC);
    EXPECT_EQ(resolve_label(m, "african folks"), TargetLabel::POC);
    EXPECT_EQ(resolve_label(m, "islamic"), TargetLabel::MUSLIMS);
    EXPECT_EQ(resolve_label(m, "fat folks"), TargetLabel::OTHER);
    EXPECT_EQ(resolve_label(m, "WOMEN"), TargetLabel::WOMEN);
    EXPECT_FALSE(resolve_label(m, "robots"));
}

TEST(Strategy, ArgCyclesGoldPool) {
    Strategy st;
    st.kind = StrategyKind::ARG;
    st.condition_pool = {{std::nullopt, "gold a"}, {std::nullopt, "gold b"}};
    ConditionSchedule s(st);
    EXPECT_EQ(s.at(0).text, "<|startofhs|> gold a");
    EXPECT_EQ(s.at(3).text, "<|startofhs|> gold b");
    st.condition_pool.clear();
    EXPECT_THROW(ConditionSchedule{st}, Error);
}

TEST(Strategy, MixPairsLabelWithStatement) {
    Strategy st;
    st.kind = StrategyKind::MIX;
    st.label_mapping = default_sbf_mapping();
    st.condition_pool = {{"jews", "j one"}};
    ConditionSchedule s(st);
    EXPECT_EQ(s.at(0).text, "<|startofhs: DISABLED|>");
    EXPECT_EQ(s.at(1).text, "<|startofhs: JEWS|> j one");
    EXPECT_EQ(training_format_for(StrategyKind::MIX), TrainingFormat::LABELED);
    EXPECT_EQ(training_format_for(StrategyKind::SBF), TrainingFormat::PLAIN);
}

TEST(Strategy, PoolFileAndJsonRoundTrip) {
    std::istringstream in("jews\tsome statement\r\nplain statement\n\n   \n");
    auto pool = parse_pool(in);
    ASSERT_EQ(pool.size(), 2u);
    EXPECT_EQ(pool[0].label, "jews");
    EXPECT_FALSE(pool[1].label);
    Strategy st{StrategyKind::SBF, pool, default_sbf_mapping()};
    auto back = strategy_from_json(nlohmann::json::parse(to_json(st).dump()));
    EXPECT_EQ(back.kind, st.kind);
    EXPECT_EQ(back.condition_pool, st.condition_pool);
    EXPECT_EQ(back.label_mapping, st.label_mapping);
}

TEST(AuthorProtocol, RequestSchema) {
    auto r = generation_request_from_json(nlohmann::json{{"condition", "<|startofhs|>"}, {"n_chunks", 3}, {"max_tokens", 64}});
    EXPECT_EQ(r.n_chunks, 3u);
    EXPECT_THROW(generation_request_from_json(nlohmann::json{{"n_chunks", 3}, {"max_tokens", 64}}), Error);
    EXPECT_THROW(generation_request_from_json(nlohmann::json{{"condition", "x"}, {"n_chunks", 0}, {"max_tokens", 64}}), Error);
    EXPECT_THROW(generation_request_from_json(nlohmann::json{{"condition", "x"}, {"n_chunks", "2"}, {"max_tokens", 64}}), Error);
}

TEST(AuthorProtocol, ResponseSchema) {
    EXPECT_EQ(generation_response_from_json(nlohmann::json{{"chunks", {"a", "b"}}}, 2).size(), 2u);
    EXPECT_THROW(generation_response_from_json(nlohmann::json{{"chunks", {"a"}}}, 2), Error);
    EXPECT_THROW(generation_response_from_json(nlohmann::json{{"chunks", {1, 2}}}, 2), Error);
    EXPECT_THROW(generation_response_from_json(nlohmann::json::array(), 0), Error);
}

TEST(AuthorProtocol, ConfigFileAndEnvOverride) {
    testutil::TempDir dir;
    const auto path = dir.path() / "author.json";
    std::ofstream(path) << R"({"url": "http://example:1", "retries": 5})";
    unsetenv("HITL_AUTHOR_URL");
    auto c = load_author_config(path.string());
    EXPECT_EQ(c.url, "http://example:1");
    EXPECT_EQ(c.retries, 5u);
    setenv("HITL_AUTHOR_URL", "http://override:2", 1);
    EXPECT_EQ(load_author_config(path.string()).url, "http://override:2");
    unsetenv("HITL_AUTHOR_URL");
}
