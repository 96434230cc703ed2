#include "infprop/service.hpp"

#include <algorithm>

#include <httplib.h>

#include "infprop/oracle.hpp"
#include "infprop/propagate.hpp"

namespace infprop {

using nlohmann::json;

namespace {

const char* status_name(TV v) {
    switch (v) {
    case TV::T: return "forced";
    case TV::F: return "forbidden";
    case TV::U: return "free";
    default: return "conflict";
    }
}

Tuple resolve(const Problem& p, const std::string& pred, const std::vector<std::string>& names) {
    auto& sig = p.structure.signature();
    auto k = sig.find(pred);
    if (!k) throw ServiceError(422, "unknown predicate " + pred);
    if (static_cast<int>(names.size()) != sig.arity(*k))
        throw ServiceError(422, "wrong arity for " + pred);
    Tuple t;
    for (auto& n : names) {
        auto e = p.domain().find(n);
        if (!e) throw ServiceError(422, "unknown domain element " + n);
        t.push_back(*e);
    }
    return t;
}

} // namespace

json SessionStore::recompute(Session& s, const std::vector<UserChoice>& choices) const {
    auto& p = s.problem;
    Structure start = p.structure;
    for (auto& c : choices) {
        auto t = resolve(p, c.pred, c.tuple);
        int k = *start.signature().find(c.pred);
        auto idx = start.index(t);
        start.set(k, idx, lub_p(start.get(k, idx), c.value ? TV::T : TV::F));
    }
    Structure result;
    json explanation = json::array();
    if (s.oracle) {
        try {
            result = complete_propagate(p.theory, p.vocabulary, start);
        } catch (const OracleLimit& e) {
            throw ServiceError(422, e.what());
        }
    } else {
        auto r = propagate(p.theory, p.vocabulary, start);
        result = r.structure;
        if (r.trace.inconsistent) {
            auto& steps = r.trace.steps;
            std::size_t from = steps.size() > 5 ? steps.size() - 5 : 0;
            for (std::size_t k = from; k < steps.size(); ++k)
                explanation.push_back({{"propagator", steps[k].propagator < 0 ? "input" : r.trace.propagators[steps[k].propagator]},
                                       {"sentence", r.describe(steps[k].propagator)}});
        }
    }
    bool inconsistent = !result.three_valued();
    json atoms = json::array();
    auto& sig = result.signature();
    for (std::size_t pi = 0; pi < sig.preds.size(); ++pi) {
        int k = static_cast<int>(pi);
        for (std::size_t a = 0; a < result.atom_count(k); ++a) {
            auto t = result.tuple(k, a);
            std::vector<std::string> names;
            for (int e : t) names.push_back(result.domain().name(e));
            TV v = result.get(k, a);
            std::string st = status_name(v);
            if (v != TV::I)
                for (auto& c : choices)
                    if (c.pred == sig.preds[pi].name && c.tuple == names) st = "user";
            atoms.push_back({{"pred", sig.preds[pi].name}, {"tuple", names}, {"status", st}});
        }
    }
    json delta = json::array();
    if (s.state.is_object()) {
        auto& old = s.state["atoms"];
        for (std::size_t k = 0; k < atoms.size() && k < old.size(); ++k)
            if (old[k]["status"] != atoms[k]["status"])
                delta.push_back({{"pred", atoms[k]["pred"]},
                                 {"tuple", atoms[k]["tuple"]},
                                 {"from", old[k]["status"]},
                                 {"to", atoms[k]["status"]}});
    }
    json ch = json::array();
    for (auto& c : choices) ch.push_back({{"pred", c.pred}, {"tuple", c.tuple}, {"value", c.value ? "t" : "f"}});
    return {{"atoms", atoms},
            {"inconsistent", inconsistent},
            {"delta", delta},
            {"explanation", explanation},
            {"assignments", ch},
            {"structure", structure_to_json(result)}};
}

json SessionStore::create(const std::string& text, bool oracle) {
    auto s = std::make_shared<Session>();
    try {
        s->problem = parse_problem(text);
    } catch (const ParseError& e) {
        throw ServiceError(422, "parse error", {{"line", e.line}, {"column", e.column}, {"message", e.what()}});
    }
    auto diags = validate(s->problem.theory, s->problem.vocabulary);
    if (!diags.empty()) {
        json d = json::array();
        for (auto& x : diags) d.push_back({{"kind", x.kind}, {"message", x.message}});
        throw ServiceError(422, "invalid theory", d);
    }
    s->oracle = oracle;
    s->state = recompute(*s, {});
    s->state["delta"] = json::array();
    std::unique_lock lk(mu_);
    s->id = "s" + std::to_string(next_++);
    sessions_[s->id] = s;
    return {{"id", s->id}, {"state", s->state}};
}

std::shared_ptr<SessionStore::Session> SessionStore::find(const std::string& id) const {
    std::shared_lock lk(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw ServiceError(404, "no session " + id);
    return it->second;
}

json SessionStore::get(const std::string& id) const {
    auto s = find(id);
    std::lock_guard lk(s->mu);
    return s->state;
}

json SessionStore::assign(const std::string& id, const UserChoice& c) {
    auto s = find(id);
    std::lock_guard lk(s->mu);
    resolve(s->problem, c.pred, c.tuple);
    auto choices = s->choices;
    choices.push_back(c);
    s->state = recompute(*s, choices);
    s->choices = std::move(choices);
    return s->state;
}

json SessionStore::retract(const std::string& id, std::size_t index) {
    auto s = find(id);
    std::lock_guard lk(s->mu);
    if (index >= s->choices.size()) throw ServiceError(404, "no assignment " + std::to_string(index));
    auto choices = s->choices;
    choices.erase(choices.begin() + static_cast<std::ptrdiff_t>(index));
    s->state = recompute(*s, choices);
    s->choices = std::move(choices);
    return s->state;
}

json SessionStore::retract(const std::string& id, const std::string& pred, const std::vector<std::string>& tuple) {
    std::size_t index = 0;
    {
        auto s = find(id);
        std::lock_guard lk(s->mu);
        auto it = std::find_if(s->choices.rbegin(), s->choices.rend(),
                               [&](const UserChoice& c) { return c.pred == pred && c.tuple == tuple; });
        if (it == s->choices.rend()) throw ServiceError(404, "no assignment for " + pred);
        index = static_cast<std::size_t>(s->choices.rend() - it) - 1;
    }
    return retract(id, index);
}

void SessionStore::remove(const std::string& id) {
    std::unique_lock lk(mu_);
    if (!sessions_.erase(id)) throw ServiceError(404, "no session " + id);
}

std::size_t SessionStore::size() const {
    std::shared_lock lk(mu_);
    return sessions_.size();
}

// ---------------------------------------------------------------- http

namespace {

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

template <class F>
void guarded(httplib::Response& res, F&& f) {
    try {
        f();
    } catch (const ServiceError& e) {
        json body = {{"error", e.what()}};
        if (!e.detail.is_null()) body["detail"] = e.detail;
        reply(res, e.status, body);
    } catch (const json::exception& e) {
        reply(res, 400, {{"error", std::string("bad request: ") + e.what()}});
    } catch (const std::exception& e) {
        reply(res, 500, {{"error", e.what()}});
    }
}

bool oracle_flag(const httplib::Request& req) {
    return req.has_param("oracle") && req.get_param_value("oracle") == "true";
}

} // namespace

void install_routes(httplib::Server& srv, SessionStore& store) {
    srv.Post("/sessions", [&](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { reply(res, 201, store.create(req.body, oracle_flag(req))); });
    });
    srv.Get(R"(/sessions/([^/]+))", [&](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { reply(res, 200, store.get(req.matches[1])); });
    });
    srv.Post(R"(/sessions/([^/]+)/assign)", [&](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto j = json::parse(req.body);
            UserChoice c;
            c.pred = j.at("atom").at("pred").get<std::string>();
            c.tuple = j.at("atom").at("tuple").get<std::vector<std::string>>();
            auto v = j.at("value").get<std::string>();
            if (v != "t" && v != "f") throw ServiceError(422, "value must be \"t\" or \"f\"");
            c.value = v == "t";
            reply(res, 200, store.assign(req.matches[1], c));
        });
    });
    srv.Post(R"(/sessions/([^/]+)/retract)", [&](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto j = json::parse(req.body);
            if (j.contains("index"))
                reply(res, 200, store.retract(req.matches[1], j.at("index").get<std::size_t>()));
            else
                reply(res, 200,
                      store.retract(req.matches[1], j.at("atom").at("pred").get<std::string>(),
                                    j.at("atom").at("tuple").get<std::vector<std::string>>()));
        });
    });
    srv.Delete(R"(/sessions/([^/]+))", [&](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            store.remove(req.matches[1]);
            reply(res, 200, {{"deleted", std::string(req.matches[1])}});
        });
    });
}

bool serve(SessionStore& store, const std::string& host, int port) {
    httplib::Server srv;
    install_routes(srv, store);
    return srv.listen(host, port);
}

} // namespace infprop
