#include "helpers.hpp"

#include <gtest/gtest.h>

#include <thread>

using namespace hitl;
using namespace testutil;
using nlohmann::json;

namespace {

class ServiceTest : public ::testing::Test {
protected:
    void SetUp() override {
        import_frozen(store, "V1", 7);
        author.chunks = {chunk_of(4, "svc")};
        orch = std::make_unique<Orchestrator>(store, &author);
        service = std::make_unique<Service>(*orch);
        port = service->bind_any("127.0.0.1");
        ASSERT_GT(port, 0);
        thread = std::thread([this] { service->listen_after_bind(); });
        client = std::make_unique<httplib::Client>("127.0.0.1", port);
        for (int i = 0; i < 100 && !service->server().is_running(); ++i)
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }

    void TearDown() override {
        service->stop();
        thread.join();
    }

    httplib::Result post(const std::string& path, const json& body) {
        return client->Post(path, body.dump(), "application/json");
    }

    Store store;
    FixedAuthor author;
    std::unique_ptr<Orchestrator> orch;
    std::unique_ptr<Service> service;
    std::unique_ptr<httplib::Client> client;
    std::thread thread;
    int port = 0;
};

} // namespace

TEST_F(ServiceTest, FullLoopOverHttp) {
    auto res = post("/loops", {{"name", "V2"}, {"strategy", "PLAIN"}, {"quota", 2}});
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 201);
    EXPECT_EQ(json::parse(res->body)["training_export_lines"], 7);

    res = post("/loops/V2/generate", {{"n_chunks", 1}});
    ASSERT_EQ(res->status, 200);
    EXPECT_EQ(json::parse(res->body)["chunks"][0]["admitted"], 4);

    res = client->Get("/loops/V2");
    ASSERT_EQ(res->status, 200);
    EXPECT_EQ(json::parse(res->body)["pending"], 4);

    for (int i = 0; i < 2; ++i) {
        res = client->Get("/review/next?annotator=ann");
        ASSERT_EQ(res->status, 200);
        const auto id = json::parse(res->body)["id"].get<std::string>();
        res = post("/review/" + id + "?annotator=ann", {{"verdict", "UNTOUCHED"}, {"target", "WOMEN"}});
        ASSERT_EQ(res->status, 200) << res->body;
        EXPECT_EQ(json::parse(res->body)["status"], "UNTOUCHED");
    }
    res = client->Get("/review/next?annotator=ann");
    EXPECT_EQ(res->status, 204);

    res = post("/loops/V2/close", json::object());
    ASSERT_EQ(res->status, 200) << res->body;
    EXPECT_EQ(json::parse(res->body)["version"]["frozen"], true);

    res = client->Get("/versions/V2/report");
    ASSERT_EQ(res->status, 200);
    EXPECT_EQ(json::parse(res->body)["accepted"], 2);
    res = client->Get("/versions/V2/report?format=table&unit=cn");
    ASSERT_EQ(res->status, 200);
    EXPECT_NE(res->body.find("HTER (all)"), std::string::npos);

    res = client->Get("/versions/V2/export?format=labeled");
    ASSERT_EQ(res->status, 200);
    EXPECT_NE(res->body.find("<|startofhs: WOMEN|>"), std::string::npos);
    res = client->Get("/versions/V2/export?format=jsonl");
    EXPECT_EQ(std::count(res->body.begin(), res->body.end(), '\n'), 4);
}

TEST_F(ServiceTest, ErrorCodes) {
    auto res = client->Get("/loops/nope");
    EXPECT_EQ(res->status, 404);
    EXPECT_EQ(json::parse(res->body)["error"], "not_found");

    res = post("/loops", {{"strategy", "PLAIN"}});
    EXPECT_EQ(res->status, 400);
    res = client->Post("/loops", "{broken", "application/json");
    EXPECT_EQ(res->status, 400);
    res = post("/loops", {{"name", "V2"}, {"strategy", "BOGUS"}});
    EXPECT_EQ(res->status, 400);

    ASSERT_EQ(post("/loops", {{"name", "V2"}, {"quota", 1}})->status, 201);
    EXPECT_EQ(post("/loops", {{"name", "V2"}, {"quota", 1}})->status, 409);
    EXPECT_EQ(post("/loops", {{"name", "V3"}, {"base", "V2"}})->status, 409);
    EXPECT_EQ(post("/loops/V2/close", json::object())->status, 409);
    EXPECT_EQ(post("/loops/V2/generate", {{"n_chunks", 0}})->status, 400);

    EXPECT_EQ(client->Get("/review/next")->status, 400);
    ASSERT_EQ(post("/loops/V2/generate", {{"n_chunks", 1}})->status, 200);
    auto next = client->Get("/review/next?annotator=a");
    const auto id = json::parse(next->body)["id"].get<std::string>();
    // Wrong annotator, mismatched id, bad verdict, unknown record.
    EXPECT_EQ(post("/review/" + id, {{"verdict", "UNTOUCHED"}, {"target", "JEWS"}, {"annotator", "b"}})->status, 409);
    EXPECT_EQ(post("/review/" + id, {{"pair_id", "other"}, {"verdict", "UNTOUCHED"}, {"annotator", "a"}})->status, 400);
    EXPECT_EQ(post("/review/" + id, {{"verdict", "MAYBE"}, {"annotator", "a"}})->status, 400);
    EXPECT_EQ(post("/review/" + id, {{"verdict", "UNTOUCHED"}, {"annotator", "a"}})->status, 400);
    EXPECT_EQ(post("/review/ghost", {{"verdict", "DISCARDED"}, {"annotator", "a"}})->status, 409);

    EXPECT_EQ(client->Get("/versions/V2/report")->status, 409);
    EXPECT_EQ(client->Get("/versions/V9/report")->status, 404);
    EXPECT_EQ(client->Get("/versions/V1/report?format=xml")->status, 400);
    EXPECT_EQ(client->Get("/versions/V2/export")->status, 409);
    EXPECT_EQ(client->Get("/versions/V1/export?format=csv")->status, 400);
}

TEST_F(ServiceTest, StrategyObjectInRequest) {
    json strategy = {{"kind", "SBF"}, {"condition_pool", {{{"label", "muslims"}, {"text", "a statement"}}}}};
    auto res = post("/loops", {{"name", "V2"}, {"strategy", strategy}, {"quota", 1}, {"chunk_admit_limit", 2}});
    ASSERT_EQ(res->status, 201) << res->body;
    post("/loops/V2/generate", {{"n_chunks", 1}});
    EXPECT_EQ(author.requests.back().condition, "<|startofhs|> a statement");
    EXPECT_EQ(json::parse(client->Get("/loops/V2")->body)["records"], 2);
}

TEST(AuthorWire, HttpClientAgainstMockServer) {
    sim::MockAuthor author(sim::MockAuthorConfig{});
    sim::MockAuthorServer server(author);
    const int port = server.bind_any("127.0.0.1");
    std::thread t([&] { server.listen_after_bind(); });
    AuthorClientConfig cfg;
    cfg.url = "http://127.0.0.1:" + std::to_string(port);
    cfg.timeout_seconds = 5;
    HttpAuthorClient client(cfg);
    auto chunks = client.generate({"<|startofhs: POC|>", 3, 128});
    ASSERT_EQ(chunks.size(), 3u);
    for (const auto& c : chunks) {
        auto parsed = parse_generation(c, TrainingFormat::LABELED);
        EXPECT_EQ(parsed.pairs.size(), 9u);
        EXPECT_TRUE(parsed.diagnostics.empty());
        for (const auto& p : parsed.pairs) EXPECT_EQ(p.label, TargetLabel::POC);
    }
    httplib::Client raw("127.0.0.1", port);
    auto bad = raw.Post("/generate", R"({"condition": 3})", "application/json");
    EXPECT_EQ(bad->status, 400);
    EXPECT_EQ(json::parse(bad->body)["error"], "protocol_error");
    server.stop();
    t.join();
}

TEST(AuthorWire, UnreachableAuthorIsIoError) {
    AuthorClientConfig cfg;
    cfg.url = "http://127.0.0.1:1";
    cfg.timeout_seconds = 1;
    cfg.retries = 1;
    HttpAuthorClient client(cfg);
    try {
        client.generate({"<|startofhs|>", 1, 16});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::io_error);
    }
}
