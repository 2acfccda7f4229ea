#include "recfeed/service.hpp"

#include "recfeed/error.hpp"
#include "recfeed/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <regex>

#include <httplib.h>

namespace recfeed {

using nlohmann::json;

json session_view(const Session& s, const Catalog& catalog)
{
    const Feed& feed = s.current_feed();
    json entries = json::array();
    for (std::size_t i = 0; i < feed.entries.size(); ++i) {
        const auto& e = feed.entries[i];
        const Item* item = catalog.find(e.item_id);
        json attrs = json::object();
        json price = nullptr;
        if (item) {
            for (const auto& [key, values] : item->attributes)
                attrs[key] = values;
            if (const auto* p = item->find("price"); p && p->front().is_number())
                price = p->front().as_number();
        }
        entries.push_back({{"rank", i + 1},
                           {"item_id", e.item_id},
                           {"title", item ? item->title : ""},
                           {"price", price},
                           {"attributes", attrs},
                           {"score", e.score}});
    }
    const auto& tr = s.current_trace();
    json j = {{"session_id", s.id},
              {"user_id", s.user_id},
              {"round", s.round},
              {"status", to_string(s.status)},
              {"t_max", s.config.t_max},
              {"k", s.config.k},
              {"feed", {{"round", feed.round}, {"k", feed.k}, {"entries", entries}}},
              {"preference_state", s.memory},
              {"plan_trace", to_json(tr, false)},
              {"fallback", tr.fallback},
              {"pool_exhausted", tr.pool_exhausted}};
    if (s.feedback.empty()) {
        j["feedback"] = nullptr;
        j["degraded"] = false;
    } else {
        j["feedback"] = s.feedback.back();
        j["degraded"] = static_cast<bool>(s.degraded.back());
    }
    return j;
}

std::shared_ptr<const Session> Service::Entry::load() const
{
    std::lock_guard lock(snap);
    return snapshot;
}

void Service::Entry::store(std::shared_ptr<const Session> s)
{
    std::lock_guard lock(snap);
    snapshot = std::move(s);
}

Service::Service(std::shared_ptr<const SessionEngine> engine, ServiceConfig config)
    : engine_(std::move(engine)), config_(std::move(config))
{
    if (!engine_)
        throw ConfigError("service needs a session engine");
    config_.defaults.validate();
    if (!config_.log_dir.empty())
        std::filesystem::create_directories(config_.log_dir);
}

Service::~Service() = default;

namespace {

HttpResponse reply(int status, const json& body)
{
    return {status, body.dump()};
}

HttpResponse error(int status, const std::string& message)
{
    return reply(status, {{"error", message}});
}

bool valid_id(const std::string& id)
{
    static const std::regex re("[A-Za-z0-9_-]{1,64}");
    return std::regex_match(id, re);
}

} // namespace

std::shared_ptr<Service::Entry> Service::find(const std::string& id) const
{
    std::shared_lock lock(mu_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

void Service::persist(Entry& entry, const Session& session)
{
    if (config_.log_dir.empty())
        return;
    std::ofstream out(config_.log_dir / (session.id + ".jsonl"), std::ios::app | std::ios::binary);
    for (std::size_t i = entry.persisted; i < session.events.size(); ++i)
        out << to_line(session.events[i]) << '\n';
    entry.persisted = session.events.size();
}

HttpResponse Service::handle(const std::string& method, const std::string& path, const std::string& body)
{
    static const std::regex session_re(R"(^/sessions/([^/]+)$)");
    static const std::regex commands_re(R"(^/sessions/([^/]+)/commands$)");
    static const std::regex trace_re(R"(^/sessions/([^/]+)/trace$)");
    std::smatch m;
    try {
        if (path == "/healthz") {
            if (method != "GET")
                return error(405, "method not allowed");
            return reply(200, {{"status", "ok"}, {"catalog_items", engine_->catalog().size()}});
        }
        if (path == "/sessions") {
            if (method != "POST")
                return error(405, "method not allowed");
            return create(body);
        }
        if (std::regex_match(path, m, commands_re)) {
            if (method != "POST")
                return error(405, "method not allowed");
            return command(m[1].str(), body);
        }
        if (std::regex_match(path, m, trace_re)) {
            if (method != "GET")
                return error(405, "method not allowed");
            return trace(m[1].str());
        }
        if (std::regex_match(path, m, session_re)) {
            if (method != "GET")
                return error(405, "method not allowed");
            return get(m[1].str());
        }
        return error(404, "no route for " + path);
    } catch (const std::exception& e) {
        return error(500, e.what());
    }
}

HttpResponse Service::create(const std::string& body)
{
    json req;
    try {
        req = json::parse(body.empty() ? "{}" : body);
    } catch (const json::exception&) {
        return error(400, "request body is not valid JSON");
    }
    if (!req.is_object())
        return error(400, "request body must be an object");
    if (!req.contains("user_id") || !req.at("user_id").is_string() || req.at("user_id").get<std::string>().empty())
        return error(400, "user_id is required");

    std::vector<std::string> history;
    SessionConfig cfg = config_.defaults;
    try {
        if (req.contains("history"))
            history = req.at("history").get<std::vector<std::string>>();
        if (req.contains("config")) {
            const auto& c = req.at("config");
            cfg.t_max = c.value("t_max", cfg.t_max);
            cfg.k = c.value("k", cfg.k);
            cfg.aia_cold_start = c.value("aia_cold_start", cfg.aia_cold_start);
        }
    } catch (const json::exception&) {
        return error(400, "history must be a list of item ids and config an object of integers");
    }

    std::string id;
    if (req.contains("session_id")) {
        if (!req.at("session_id").is_string() || !valid_id(req.at("session_id").get<std::string>()))
            return error(400, "session_id must match [A-Za-z0-9_-]{1,64}");
        id = req.at("session_id").get<std::string>();
    }

    std::unique_lock lock(mu_);
    if (id.empty()) {
        do {
            char buf[24];
            std::snprintf(buf, sizeof buf, "s%06llu", static_cast<unsigned long long>(next_id_++));
            id = buf;
        } while (sessions_.count(id));
    } else if (sessions_.count(id)) {
        return error(409, "session '" + id + "' already exists");
    }

    Session session;
    try {
        session = engine_->create(id, req.at("user_id").get<std::string>(), history, cfg);
    } catch (const PreconditionError& e) {
        return error(400, e.what());
    } catch (const ConfigError& e) {
        return error(400, e.what());
    }
    auto entry = std::make_shared<Entry>();
    persist(*entry, session);
    auto view = session_view(session, engine_->catalog());
    entry->store(std::make_shared<const Session>(std::move(session)));
    sessions_.emplace(id, entry);
    return reply(201, view);
}

HttpResponse Service::get(const std::string& id)
{
    auto entry = find(id);
    if (!entry)
        return error(404, "unknown session '" + id + "'");
    return reply(200, session_view(*entry->load(), engine_->catalog()));
}

HttpResponse Service::trace(const std::string& id)
{
    auto entry = find(id);
    if (!entry)
        return error(404, "unknown session '" + id + "'");
    auto s = entry->load();
    json traces = json::array();
    for (std::size_t i = 0; i < s->traces.size(); ++i) {
        auto t = to_json(s->traces[i]);
        t["round"] = i;
        traces.push_back(std::move(t));
    }
    return reply(200, {{"session_id", s->id}, {"traces", traces}});
}

HttpResponse Service::command(const std::string& id, const std::string& body)
{
    auto entry = find(id);
    if (!entry)
        return error(404, "unknown session '" + id + "'");

    json req;
    try {
        req = json::parse(body);
    } catch (const json::exception&) {
        return error(400, "request body is not valid JSON");
    }
    if (!req.is_object() || !req.contains("text") || !req.at("text").is_string())
        return error(400, "text is required");
    std::optional<bool> satisfied;
    if (req.contains("satisfied") && !req.at("satisfied").is_null()) {
        if (!req.at("satisfied").is_boolean())
            return error(400, "satisfied must be a boolean");
        satisfied = req.at("satisfied").get<bool>();
    }

    std::lock_guard write(entry->write);
    Session next = *entry->load();
    if (next.status != SessionStatus::active)
        return error(409, "session '" + id + "' is " + to_string(next.status));
    try {
        engine_->step(next, req.at("text").get<std::string>(), satisfied.value_or(false));
    } catch (const TransportError& e) {
        return reply(502, {{"error", e.what()}, {"endpoint", e.endpoint()}});
    } catch (const StateError& e) {
        return error(409, e.what());
    } catch (const PreconditionError& e) {
        return error(400, e.what());
    }
    persist(*entry, next);
    auto view = session_view(next, engine_->catalog());
    entry->store(std::make_shared<const Session>(std::move(next)));
    return reply(200, view);
}

std::size_t Service::restore()
{
    if (config_.log_dir.empty() || !std::filesystem::exists(config_.log_dir))
        return 0;
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(config_.log_dir)) {
        if (e.is_regular_file() && e.path().extension() == ".jsonl")
            files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::size_t restored = 0;
    for (const auto& f : files) {
        std::ifstream in(f);
        auto log = read_event_log(in);
        auto report = replay(log.events, *engine_);
        if (!report.ok()) {
            std::cerr << "skipping " << f << ": "
                      << (report.mismatches.empty() ? "replay failed" : report.mismatches.front()) << "\n";
            continue;
        }
        auto entry = std::make_shared<Entry>();
        entry->persisted = report.session->events.size();
        auto id = report.session->id;
        entry->store(std::make_shared<const Session>(std::move(*report.session)));
        std::unique_lock lock(mu_);
        sessions_[id] = std::move(entry);
        ++restored;
    }
    return restored;
}

namespace {

void install_routes(httplib::Server& svr, Service& service)
{
    auto dispatch = [&service](const httplib::Request& req, httplib::Response& res) {
        auto r = service.handle(req.method, req.path, req.body);
        res.status = r.status;
        res.set_content(r.body, "application/json");
    };
    svr.Get(".*", dispatch);
    svr.Post(".*", dispatch);
    svr.Put(".*", dispatch);
    svr.Delete(".*", dispatch);
}

} // namespace

bool Service::serve(const std::string& host, int port)
{
    server_ = std::make_unique<httplib::Server>();
    install_routes(*server_, *this);
    return server_->listen(host, port);
}

int Service::bind_any(const std::string& host)
{
    server_ = std::make_unique<httplib::Server>();
    install_routes(*server_, *this);
    return server_->bind_to_any_port(host);
}

bool Service::serve_bound()
{
    if (!server_)
        throw StateError("bind_any must be called first");
    return server_->listen_after_bind();
}

void Service::stop()
{
    if (server_)
        server_->stop();
}

} // namespace recfeed
