// Command-line front end: corpus, loop, metrics, serve, sim, mock-author.

#include "hitl/hitl.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace hitl;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io_error, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json read_json(const std::string& path) {
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::parse_error, path + ": " + e.what());
    }
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io_error, "cannot write " + path);
    out << text;
}

std::pair<std::string, int> split_addr(const std::string& addr) {
    const auto colon = addr.rfind(':');
    if (colon == std::string::npos) fail(ErrorCode::invalid_argument, "address must be host:port");
    return {addr.substr(0, colon), std::stoi(addr.substr(colon + 1))};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Human-in-the-loop HS/CN corpus workbench"};
    app.require_subcommand(1);
    std::string store_dir = "hitl-store";
    app.add_option("--store", store_dir, "Store directory")->capture_default_str();

    // corpus
    auto* corpus = app.add_subcommand("corpus", "Import, export and freeze versions");
    corpus->require_subcommand(1);
    std::string file, version, format = "plain", out_path, preds;
    std::uint64_t quota = 0;
    bool quota_set = false, freeze_after = false;

    auto* imp = corpus->add_subcommand("import", "Import a pair JSONL file as a new version");
    imp->add_option("--file", file, "Pair JSONL file")->required();
    imp->add_option("--version", version, "Version name")->required();
    auto* quota_opt = imp->add_option("--quota", quota, "Quota (default: accepted count)");
    imp->add_option("--predecessors", preds, "Comma-separated predecessor chain");
    imp->add_flag("--freeze", freeze_after, "Freeze after import");

    auto* exp = corpus->add_subcommand("export", "Export a version");
    exp->add_option("--version", version, "Last version of the range")->required();
    exp->add_option("--format", format, "plain | labeled | jsonl")->capture_default_str();
    exp->add_option("--out", out_path, "Output file (default stdout)");

    auto* frz = corpus->add_subcommand("freeze", "Freeze a version");
    frz->add_option("--version", version, "Version name")->required();

    // loop
    auto* loop = app.add_subcommand("loop", "Run loops");
    loop->require_subcommand(1);
    std::string name, base, strategy = "PLAIN", pool, mapping, author_config;
    std::uint64_t loop_quota = 500, admit_limit = 0;
    std::size_t n_chunks = 1;

    auto* start = loop->add_subcommand("start", "Start a loop");
    start->add_option("--name", name, "Loop / version name")->required();
    start->add_option("--base", base, "Base version (default: last frozen)");
    start->add_option("--strategy", strategy, "PLAIN | SBF | LAB | ARG | MIX")->capture_default_str();
    start->add_option("--pool", pool, "Condition pool file (text or label<TAB>text lines)");
    start->add_option("--mapping", mapping, "Label mapping JSON object (default: shipped SBF table)");
    start->add_option("--quota", loop_quota, "Accepted pairs needed to close")->capture_default_str();
    start->add_option("--admit-limit", admit_limit, "Pairs admitted per chunk, 0 = all")->capture_default_str();

    auto* gen = loop->add_subcommand("generate", "Request chunks from the author");
    gen->add_option("--loop", name, "Loop name")->required();
    gen->add_option("--chunks", n_chunks, "Number of chunks")->capture_default_str();
    gen->add_option("--author-config", author_config, "Author client config JSON");

    auto* close = loop->add_subcommand("close", "Close a loop");
    close->add_option("--loop", name, "Loop name")->required();

    auto* status = loop->add_subcommand("status", "Show loop status");
    status->add_option("--loop", name, "Loop name")->required();

    // metrics
    auto* metrics = app.add_subcommand("metrics", "Compute reports");
    metrics->require_subcommand(1);
    std::string unit = "pair";
    std::size_t threads = 1;
    auto* rep = metrics->add_subcommand("report", "Report of a frozen version");
    rep->add_option("--version", version, "Version name")->required();
    rep->add_option("--unit", unit, "pair | hs | cn (table only)")->capture_default_str();
    rep->add_option("--format", format, "json | table");
    rep->add_option("--threads", threads, "Worker threads")->capture_default_str();

    // serve
    std::string addr = "127.0.0.1:8080";
    double lease_minutes = 30;
    auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
    serve->add_option("--addr", addr, "host:port")->capture_default_str();
    serve->add_option("--author-config", author_config, "Author client config JSON");
    serve->add_option("--lease-minutes", lease_minutes, "Review lease duration")->capture_default_str();

    // sim
    auto* sim = app.add_subcommand("sim", "Simulation harness");
    sim->require_subcommand(1);
    std::string sim_config;
    bool in_memory = false;
    auto* run = sim->add_subcommand("run", "Run a simulation and print its reports");
    run->add_option("--config", sim_config, "JSON with simulation/author/reviewer sections");
    run->add_option("--out", out_path, "Output file (default stdout)");
    run->add_flag("--in-memory", in_memory, "Do not persist the store");

    auto* mock = app.add_subcommand("mock-author", "Mock author");
    mock->require_subcommand(1);
    auto* mock_serve = mock->add_subcommand("serve", "Serve the author wire protocol");
    mock_serve->add_option("--addr", addr, "host:port")->capture_default_str();
    mock_serve->add_option("--config", sim_config, "Mock author config JSON");

    CLI11_PARSE(app, argc, argv);
    quota_set = quota_opt->count() > 0;

    try {
        auto make_author = [&]() -> std::unique_ptr<AuthorClient> {
            return std::make_unique<HttpAuthorClient>(load_author_config(author_config));
        };

        if (*imp) {
            Store store(store_dir);
            std::ifstream in(file, std::ios::binary);
            if (!in) fail(ErrorCode::io_error, "cannot read " + file);
            ImportOptions o;
            if (quota_set) o.quota = quota;
            std::stringstream ss(preds);
            for (std::string p; std::getline(ss, p, ',');)
                if (!p.empty()) o.predecessors.push_back(p);
            auto v = store.import_pairs(in, version, o);
            if (freeze_after) v = store.freeze(version);
            std::cout << to_json(v).dump(2) << '\n';
        } else if (*exp) {
            Store store(store_dir);
            write_output(out_path, format == "jsonl" ? store.export_jsonl(version)
                                                     : store.export_training(version, training_format_from_string(format)));
        } else if (*frz) {
            Store store(store_dir);
            std::cout << to_json(store.freeze(version)).dump(2) << '\n';
        } else if (*start) {
            Store store(store_dir);
            Orchestrator orch(store, nullptr);
            LoopConfig c;
            c.name = name;
            if (!base.empty()) c.base = base;
            c.strategy.kind = strategy_kind_from_string(strategy);
            if (!pool.empty()) {
                std::ifstream in(pool, std::ios::binary);
                if (!in) fail(ErrorCode::io_error, "cannot read " + pool);
                c.strategy.condition_pool = parse_pool(in);
            }
            if (!mapping.empty())
                for (const auto& [k, v] : read_json(mapping).items())
                    c.strategy.label_mapping[normalize_label(k)] = target_from_string(v.get<std::string>());
            c.quota = loop_quota;
            c.chunk_admit_limit = admit_limit;
            auto started = orch.start_loop(c);
            nlohmann::ordered_json j;
            j["loop"] = to_json(started.status);
            if (started.export_path) j["training_export_path"] = started.export_path->string();
            std::cout << j.dump(2) << '\n';
        } else if (*gen) {
            Store store(store_dir);
            auto author = make_author();
            OrchestratorOptions o;
            o.max_tokens = load_author_config(author_config).max_tokens;
            Orchestrator orch(store, author.get(), o);
            nlohmann::ordered_json j = nlohmann::ordered_json::array();
            for (const auto& c : orch.request_generation(name, n_chunks)) {
                auto cj = to_json(c);
                cj.erase("raw_text");
                j.push_back(cj);
            }
            std::cout << j.dump(2) << '\n';
        } else if (*close) {
            Store store(store_dir);
            Orchestrator orch(store, nullptr);
            auto closed = orch.close_loop(name);
            std::cout << to_json(closed.version).dump(2) << '\n';
        } else if (*status) {
            Store store(store_dir);
            Orchestrator orch(store, nullptr);
            std::cout << to_json(orch.status(name)).dump(2) << '\n';
        } else if (*rep) {
            Store store(store_dir);
            ReportOptions o;
            o.threads = threads;
            const auto snap = store.snapshot(version);
            const auto hist = store.history(version);
            const auto report = loop_report(snap, hist, o);
            if (format == "table") std::cout << render_table(report, unit_from_string(unit));
            else if (format == "json" || format == "plain") std::cout << to_json(report).dump(2) << '\n';
            else fail(ErrorCode::invalid_argument, "unknown report format '" + format + "'");
        } else if (*serve) {
            Store store(store_dir);
            std::unique_ptr<AuthorClient> author = make_author();
            OrchestratorOptions o;
            o.lease_duration = std::chrono::seconds(static_cast<long long>(lease_minutes * 60));
            o.max_tokens = load_author_config(author_config).max_tokens;
            Orchestrator orch(store, author.get(), o);
            Service service(orch);
            auto [host, port] = split_addr(addr);
            std::cerr << "listening on " << host << ':' << port << '\n';
            if (!service.listen(host, port)) fail(ErrorCode::io_error, "cannot listen on " + addr);
        } else if (*run) {
            nlohmann::json cfg = sim_config.empty() ? nlohmann::json::object() : read_json(sim_config);
            auto sc = sim::simulation_config_from_json(cfg.value("simulation", nlohmann::json::object()));
            if (!in_memory) sc.store_dir = store_dir;
            auto ac = sim::mock_author_config_from_json(cfg.value("author", nlohmann::json::object()));
            auto rc = sim::scripted_reviewer_config_from_json(cfg.value("reviewer", nlohmann::json::object()));
            auto result = sim::run_simulation(sc, ac, rc);
            nlohmann::ordered_json j;
            j["stalled"] = result.stalled;
            if (result.stalled) j["stalled_loop"] = result.stalled_loop;
            j["reports"] = nlohmann::ordered_json::array();
            for (const auto& r : result.reports) j["reports"].push_back(to_json(r));
            write_output(out_path, j.dump(2) + "\n");
            return result.stalled ? 3 : 0;
        } else if (*mock_serve) {
            auto ac = sim::mock_author_config_from_json(sim_config.empty() ? nlohmann::json::object()
                                                                           : read_json(sim_config));
            sim::MockAuthor author(ac);
            sim::MockAuthorServer server(author);
            auto [host, port] = split_addr(addr);
            std::cerr << "mock author listening on " << host << ':' << port << '\n';
            if (!server.listen(host, port)) fail(ErrorCode::io_error, "cannot listen on " + addr);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
