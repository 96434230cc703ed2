#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "infprop/io.hpp"
#include "infprop/structure.hpp"

namespace httplib {
class Server;
}

namespace infprop {

struct ServiceError : std::runtime_error {
    int status;
    nlohmann::json detail;
    ServiceError(int st, const std::string& msg, nlohmann::json d = nullptr)
        : std::runtime_error(msg), status(st), detail(std::move(d)) {}
};

struct UserChoice {
    std::string pred;
    std::vector<std::string> tuple;
    bool value = true;
};

// Live configuration sessions. Every request recomputes propagation from the base
// problem plus the ordered user choices.
class SessionStore {
public:
    // Returns {id, state}.
    nlohmann::json create(const std::string& problem_text, bool oracle = false);
    nlohmann::json get(const std::string& id) const;
    nlohmann::json assign(const std::string& id, const UserChoice& c);
    nlohmann::json retract(const std::string& id, std::size_t index);
    nlohmann::json retract(const std::string& id, const std::string& pred, const std::vector<std::string>& tuple);
    void remove(const std::string& id);
    std::size_t size() const;

private:
    struct Session {
        std::string id;
        Problem problem;
        bool oracle = false;
        std::vector<UserChoice> choices;
        nlohmann::json state;
        std::mutex mu;
    };
    std::shared_ptr<Session> find(const std::string& id) const;
    nlohmann::json recompute(Session& s, const std::vector<UserChoice>& choices) const;

    mutable std::shared_mutex mu_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::size_t next_ = 1;
};

// Routes of the HTTP API on an existing server object.
void install_routes(httplib::Server& srv, SessionStore& store);
// Blocks until the server stops.
bool serve(SessionStore& store, const std::string& host, int port);

} // namespace infprop
