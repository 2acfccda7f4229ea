#include <doctest.h>

#include "fixtures.hpp"
#include "recfeed/error.hpp"
#include "recfeed/service.hpp"

#include <httplib.h>

#include <chrono>
#include <filesystem>
#include <thread>

#include <unistd.h>

using namespace recfeed;
using namespace recfeed::testing;
using nlohmann::json;

namespace {

class FailingParser final : public ParserBackend {
public:
    std::string name() const override { return "failing"; }
    ParseOutcome parse(const Feed&, const Command&, const PreferenceState&) const override
    {
        throw TransportError("http://llm.invalid", "connection refused");
    }
};

json body_of(const HttpResponse& r)
{
    return json::parse(r.body);
}

std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("recfeed-" + name + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    return dir;
}

} // namespace

TEST_CASE("routing and status codes")
{
    auto stack = make_stack(mini_catalog());
    Service svc(stack.engine);

    auto health = svc.handle("GET", "/healthz", "");
    CHECK(health.status == 200);
    CHECK(body_of(health)["catalog_items"] == 12);
    CHECK(svc.handle("POST", "/healthz", "").status == 405);
    CHECK(svc.handle("GET", "/nowhere", "").status == 404);
    CHECK(svc.handle("GET", "/sessions", "").status == 405);

    CHECK(svc.handle("POST", "/sessions", "{").status == 400);
    CHECK(svc.handle("POST", "/sessions", "[]").status == 400);
    CHECK(svc.handle("POST", "/sessions", R"({"history": []})").status == 400);
    CHECK(svc.handle("POST", "/sessions", R"({"user_id": "u", "history": ["zz"]})").status == 400);
    CHECK(svc.handle("POST", "/sessions", R"({"user_id": "u", "config": {"k": 0}})").status == 400);
    CHECK(svc.handle("POST", "/sessions", R"({"user_id": "u", "session_id": "bad id!"})").status == 400);

    auto created = svc.handle("POST", "/sessions", R"({"user_id": "u", "session_id": "a"})");
    CHECK(created.status == 201);
    auto view = body_of(created);
    CHECK(view["session_id"] == "a");
    CHECK(view["round"] == 0);
    CHECK(view["status"] == "active");
    CHECK(view["feed"]["entries"].size() == 5);
    CHECK(view["feed"]["entries"][0]["rank"] == 1);
    CHECK(view["feedback"].is_null());
    CHECK(svc.handle("POST", "/sessions", R"({"user_id": "u", "session_id": "a"})").status == 409);

    auto anon = body_of(svc.handle("POST", "/sessions", R"({"user_id": "u"})"));
    CHECK(anon["session_id"] != "a");

    CHECK(svc.handle("GET", "/sessions/zz", "").status == 404);
    CHECK(svc.handle("POST", "/sessions/zz/commands", R"({"text": "hi"})").status == 404);
    CHECK(svc.handle("POST", "/sessions/a/commands", R"({"words": "hi"})").status == 400);
    CHECK(svc.handle("POST", "/sessions/a/commands", R"({"text": "hi", "satisfied": "yes"})").status == 400);
    CHECK(svc.handle("POST", "/sessions/a/commands", R"({"text": "   "})").status == 400);
    CHECK(svc.handle("DELETE", "/sessions/a", "").status == 405);
}

TEST_CASE("commands advance rounds until the session ends")
{
    auto stack = make_stack(mini_catalog());
    Service svc(stack.engine);
    svc.handle("POST", "/sessions", R"({"user_id": "u", "session_id": "a", "config": {"t_max": 2}})");

    auto r1 = svc.handle("POST", "/sessions/a/commands", R"({"text": "under $50"})");
    REQUIRE(r1.status == 200);
    auto v1 = body_of(r1);
    CHECK(v1["round"] == 1);
    CHECK(v1["feedback"]["kind"] == "compatible");
    for (const auto& e : v1["feed"]["entries"])
        CHECK(e["price"].get<double>() < 50);

    auto trace = body_of(svc.handle("GET", "/sessions/a/trace", ""));
    CHECK(trace["traces"].size() == 2);
    CHECK(trace["traces"][1]["round"] == 1);

    auto r2 = svc.handle("POST", "/sessions/a/commands", R"({"text": "perfect", "satisfied": true})");
    REQUIRE(r2.status == 200);
    CHECK(body_of(r2)["status"] == "satisfied");
    CHECK(svc.handle("POST", "/sessions/a/commands", R"({"text": "more"})").status == 409);

    svc.handle("POST", "/sessions", R"({"user_id": "u", "session_id": "b", "config": {"t_max": 1}})");
    auto last = body_of(svc.handle("POST", "/sessions/b/commands", R"({"text": "no red"})"));
    CHECK(last["status"] == "exhausted");
    CHECK(svc.handle("POST", "/sessions/b/commands", R"({"text": "more"})").status == 409);
}

TEST_CASE("reads are idempotent and a failed step leaves state unchanged")
{
    auto stack = make_stack(mini_catalog());
    auto planner = std::shared_ptr<const Planner>(stack.engine, &stack.engine->planner());
    auto failing = std::make_shared<SessionEngine>(std::make_shared<FailingParser>(), planner);
    failing->set_clock([] { return std::string("2026-01-01T00:00:00Z"); });
    Service svc(failing);

    REQUIRE(svc.handle("POST", "/sessions", R"({"user_id": "u", "session_id": "a"})").status == 201);
    auto first = svc.handle("GET", "/sessions/a", "");
    auto second = svc.handle("GET", "/sessions/a", "");
    CHECK(first.body == second.body);

    auto bad = svc.handle("POST", "/sessions/a/commands", R"({"text": "under 50"})");
    CHECK(bad.status == 502);
    CHECK(body_of(bad)["endpoint"] == "http://llm.invalid");
    CHECK(svc.handle("GET", "/sessions/a", "").body == first.body);
    CHECK(svc.handle("GET", "/sessions/a/trace", "").body == svc.handle("GET", "/sessions/a/trace", "").body);
}

TEST_CASE("golden session view over HTTP")
{
    auto stack = make_stack(mini_catalog());
    Service svc(stack.engine);
    int port = svc.bind_any("127.0.0.1");
    REQUIRE(port > 0);
    std::thread server([&] { svc.serve_bound(); });

    httplib::Client client("127.0.0.1", port);
    client.set_connection_timeout(5);
    json last;
    for (const auto& step : golden_script()) {
        auto res = step.method == "GET" ? client.Get(step.path)
                                        : client.Post(step.path, step.body, "application/json");
        REQUIRE(res);
        CHECK(res->status == step.status);
        last = json::parse(res->body);
    }
    auto again = client.Get("/sessions/golden");
    REQUIRE(again);
    CHECK(json::parse(again->body) == last);
    svc.stop();
    server.join();

    auto expected = golden("session_view.json", last);
    REQUIRE_FALSE(expected.is_null());
    std::string where;
    CHECK_MESSAGE(json_close(last, expected, 1e-9, &where), where);
}

TEST_CASE("sessions are restored from their logs")
{
    auto dir = scratch_dir("restore");
    auto stack = make_stack(mini_catalog());
    std::string before;
    {
        Service svc(stack.engine, ServiceConfig{dir, {}});
        svc.handle("POST", "/sessions", R"({"user_id": "u", "session_id": "a", "history": ["d1"]})");
        svc.handle("POST", "/sessions/a/commands", R"({"text": "no floral, under $100"})");
        svc.handle("POST", "/sessions/a/commands", R"({"text": "brand: stride"})");
        before = svc.handle("GET", "/sessions/a", "").body;
    }
    Service fresh(stack.engine, ServiceConfig{dir, {}});
    CHECK(fresh.restore() == 1);
    CHECK(fresh.handle("GET", "/sessions/a", "").body == before);
    CHECK(fresh.handle("POST", "/sessions/a/commands", R"({"text": "cheaper please"})").status == 200);
    std::filesystem::remove_all(dir);
}
