#pragma once

#include "recfeed/session.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>

namespace httplib {
class Server;
}

namespace recfeed {

struct ServiceConfig {
    // Append-only session logs; empty disables persistence.
    std::filesystem::path log_dir;
    SessionConfig defaults;
};

struct HttpResponse {
    int status = 200;
    std::string body;
};

// Read-only view of a session as served over HTTP. Timings are left out so
// that the view is a pure function of the session state.
nlohmann::json session_view(const Session& session, const Catalog& catalog);

/**
 * In-memory session store behind the HTTP API. Steps on one session are
 * serialized; reads copy an immutable snapshot.
 */
class Service {
public:
    Service(std::shared_ptr<const SessionEngine> engine, ServiceConfig config = {});
    ~Service();

    HttpResponse handle(const std::string& method, const std::string& path, const std::string& body);

    // Rebuilds sessions from log_dir; returns the number restored.
    std::size_t restore();

    // Blocks until stop(). Returns false if the socket could not be bound.
    bool serve(const std::string& host, int port);
    // Binds to an ephemeral port and returns it; pair with serve_bound().
    int bind_any(const std::string& host);
    bool serve_bound();
    void stop();

private:
    struct Entry {
        std::mutex write;
        mutable std::mutex snap;
        std::shared_ptr<const Session> snapshot;
        std::size_t persisted = 0;

        std::shared_ptr<const Session> load() const;
        void store(std::shared_ptr<const Session> s);
    };

    HttpResponse create(const std::string& body);
    HttpResponse get(const std::string& id);
    HttpResponse trace(const std::string& id);
    HttpResponse command(const std::string& id, const std::string& body);
    std::shared_ptr<Entry> find(const std::string& id) const;
    void persist(Entry& entry, const Session& session);

    std::shared_ptr<const SessionEngine> engine_;
    ServiceConfig config_;
    mutable std::shared_mutex mu_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
    std::atomic<std::uint64_t> next_id_{1};
    std::unique_ptr<httplib::Server> server_;
};

} // namespace recfeed
