#include "recfeed/catalog.hpp"
#include "recfeed/distill.hpp"
#include "recfeed/error.hpp"
#include "recfeed/runtime.hpp"
#include "recfeed/service.hpp"
#include "recfeed/simulator.hpp"
#include "recfeed/synthetic.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>

using namespace recfeed;

namespace {

Service* g_service = nullptr;

void on_signal(int)
{
    if (g_service)
        g_service->stop();
}

std::shared_ptr<const Catalog> catalog_or_synthetic(const std::string& path, std::uint64_t seed)
{
    if (path.empty())
        return make_synthetic_catalog(seed);
    return std::make_shared<const Catalog>(load_catalog(path));
}

int run_serve(const std::string& catalog_path, const std::string& host, int port, const std::string& log_dir,
              const RuntimeOptions& options)
{
    auto catalog = catalog_or_synthetic(catalog_path, 42);
    auto engine = make_engine(make_index(catalog, options), options);
    ServiceConfig cfg;
    cfg.log_dir = log_dir;
    Service service(engine, cfg);
    auto restored = service.restore();
    if (restored)
        std::cerr << "restored " << restored << " sessions from " << log_dir << "\n";
    g_service = &service;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "serving " << catalog->size() << " items on " << host << ":" << port << "\n";
    if (!service.serve(host, port)) {
        std::cerr << "could not listen on " << host << ":" << port << "\n";
        return 1;
    }
    return 0;
}

int run_bench(const std::string& mode_name, std::size_t users, std::uint64_t seed, const std::string& catalog_path,
              const std::string& report_out, const std::string& variant, const std::string& ranking,
              const std::string& log_dir, bool with_traces, RuntimeOptions options)
{
    auto mode = parse_scenario_mode(mode_name);
    if (!mode)
        throw ConfigError("unknown mode '" + mode_name + "'");
    auto planner_mode = parse_planner_mode(variant);
    if (!planner_mode)
        throw ConfigError("unknown variant '" + variant + "'");
    auto ranking_mode = parse_ranking_mode(ranking);
    if (!ranking_mode)
        throw ConfigError("unknown ranking mode '" + ranking + "'");
    options.mode = *planner_mode;
    options.planner_seed = seed;

    SyntheticConfig sc;
    sc.users = users;
    sc.seed = seed;
    std::shared_ptr<const Catalog> catalog = catalog_or_synthetic(catalog_path, seed);
    auto bench_users = make_users(*catalog, sc);
    auto engine = make_engine(make_index(catalog, options), options);

    ScenarioConfig cfg;
    cfg.mode = *mode;
    cfg.seed = seed;
    cfg.ranking = *ranking_mode;

    std::function<void(const Session&)> sink;
    if (!log_dir.empty()) {
        std::filesystem::create_directories(log_dir);
        sink = [&](const Session& s) {
            std::ofstream out(std::filesystem::path(log_dir) / (s.id + ".jsonl"), std::ios::trunc | std::ios::binary);
            write_event_log(out, s.events);
        };
    }
    auto report = run_scenario(cfg, bench_users, *engine, sink);
    auto j = report.to_json(with_traces);
    if (report_out.empty() || report_out == "-") {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out(report_out, std::ios::trunc);
        if (!out)
            throw TransportError(report_out, "cannot open for writing");
        out << j.dump(2) << "\n";
    }
    std::cerr << to_string(cfg.mode) << " " << report.variant << ": PR=" << report.pass_rate
              << " AR=" << report.avg_rounds << " recall@10=" << report.recall.at(10) << "\n";
    return 0;
}

int run_distill(const std::string& logs, const std::string& out, const std::string& catalog_path, std::uint64_t seed)
{
    auto catalog = catalog_or_synthetic(catalog_path, seed);
    auto collection = collect(read_log_shards(logs), *catalog);
    export_mixed(collection, out);
    std::cerr << "parser samples " << collection.parser.size() << ", planner samples " << collection.planner.size()
              << ", duplicates " << collection.duplicates << ", degraded " << collection.degraded_steps
              << ", corrupt lines " << collection.corrupt_lines << "\n";
    return 0;
}

int run_replay(const std::string& log, const std::string& catalog_path, std::uint64_t seed,
               const RuntimeOptions& options)
{
    auto catalog = catalog_or_synthetic(catalog_path, seed);
    std::ifstream in(log);
    if (!in)
        throw PreconditionError("cannot read " + log);
    auto events = read_event_log(in);
    RuntimeOptions opts = options;
    opts.llm_endpoint.clear();
    for (const auto& e : events.events) {
        if (e.kind == "created") {
            if (auto m = parse_planner_mode(e.payload.value("planner", "full")))
                opts.mode = *m;
            opts.planner_seed = e.payload.value("planner_seed", std::uint64_t{0});
            break;
        }
    }
    auto engine = make_engine(make_index(catalog, opts), opts);
    auto report = replay(events.events, *engine);
    std::cout << "steps " << report.steps << ", feeds compared " << report.feeds_compared << ", corrupt lines "
              << events.corrupt << "\n";
    for (const auto& m : report.mismatches)
        std::cout << "mismatch: " << m << "\n";
    std::cout << (report.ok() ? "replay OK" : "replay FAILED") << "\n";
    return report.ok() ? 0 : 2;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Interactive recommendation feed engine"};
    app.require_subcommand(1);

    RuntimeOptions options;
    std::string catalog_path;

    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string log_dir;
    serve->add_option("--catalog", catalog_path, "Catalog file (JSONL); synthetic catalog if omitted");
    serve->add_option("--host", host);
    serve->add_option("--port", port);
    serve->add_option("--log-dir", log_dir, "Directory for append-only session logs");

    auto* bench = app.add_subcommand("bench", "Run a simulated benchmark");
    std::string mode = "mr", variant = "full", ranking = "feed", report_out;
    std::size_t users = 200;
    std::uint64_t seed = 42;
    bool no_traces = false;
    bench->add_option("--mode", mode, "sr | mr | mrid")->check(CLI::IsMember({"sr", "mr", "mrid"}));
    bench->add_option("--users", users);
    bench->add_option("--seed", seed);
    bench->add_option("--catalog", catalog_path);
    bench->add_option("--report-out", report_out, "Report path; stdout if omitted");
    bench->add_option("--variant", variant, "full | semantic | random")
        ->check(CLI::IsMember({"full", "semantic", "random"}));
    bench->add_option("--ranking", ranking, "feed | full")->check(CLI::IsMember({"feed", "full"}));
    bench->add_option("--log-dir", log_dir, "Write one session log per simulated user");
    bench->add_flag("--no-traces", no_traces, "Omit per-user traces from the report");

    auto* distill = app.add_subcommand("distill", "Export parser/planner training corpora from session logs");
    std::string logs, out;
    distill->add_option("--logs", logs, "Log file or directory of *.jsonl logs")->required();
    distill->add_option("--out", out)->required();
    distill->add_option("--catalog", catalog_path);
    distill->add_option("--seed", seed, "Seed of the synthetic catalog when --catalog is omitted");

    auto* replay_cmd = app.add_subcommand("replay", "Replay a session log and compare feeds");
    std::string log;
    replay_cmd->add_option("--log", log)->required();
    replay_cmd->add_option("--catalog", catalog_path);
    replay_cmd->add_option("--seed", seed);

    auto* gen = app.add_subcommand("gen-catalog", "Write the synthetic benchmark catalog");
    gen->add_option("--out", out)->required();
    gen->add_option("--seed", seed);

    CLI11_PARSE(app, argc, argv);

    try {
        options = options_from_env(options);
        if (*serve)
            return run_serve(catalog_path, host, port, log_dir, options);
        if (*bench)
            return run_bench(mode, users, seed, catalog_path, report_out, variant, ranking, log_dir, !no_traces,
                             options);
        if (*distill)
            return run_distill(logs, out, catalog_path, seed);
        if (*replay_cmd)
            return run_replay(log, catalog_path, seed, options);
        if (*gen) {
            std::ofstream f(out, std::ios::trunc);
            if (!f)
                throw TransportError(out, "cannot open for writing");
            write_catalog(f, *make_synthetic_catalog(seed));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
