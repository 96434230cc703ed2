// Python bindings. Structured results cross the boundary as JSON text; the
// package's __init__ turns them into dicts.
#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "infprop/eval.hpp"
#include "infprop/io.hpp"
#include "infprop/normalize.hpp"
#include "infprop/oracle.hpp"
#include "infprop/propagate.hpp"
#include "infprop/rules.hpp"
#include "infprop/service.hpp"
#include "infprop/symbolic.hpp"

namespace py = pybind11;
using namespace infprop;
using nlohmann::json;

namespace {

struct InvalidTheory : std::runtime_error {
    json diags;
    explicit InvalidTheory(json d) : std::runtime_error(d.dump()), diags(std::move(d)) {}
};

Problem load(const std::string& text) {
    auto p = parse_problem(text);
    auto diags = validate(p.theory, p.vocabulary);
    if (!diags.empty()) {
        json d = json::array();
        for (auto& x : diags) d.push_back({{"kind", x.kind}, {"message", x.message}});
        throw InvalidTheory(d);
    }
    return p;
}

SymbolicStructure run_symbolic(const Problem& p, Vocabulary& voc, std::optional<std::size_t> rounds,
                               std::size_t max_size) {
    if (!p.theory.definitions().empty()) throw std::invalid_argument("symbolic propagation does not cover definitions");
    auto plan = plan_propagation(p.theory, p.vocabulary);
    voc = plan.vocabulary;
    std::map<std::string, InputMode> modes(p.inputs.begin(), p.inputs.end());
    SymbolicBudget b;
    b.rounds = rounds;
    b.max_query_size = max_size;
    return symbolic_propagate(plan.infs, initial_symbolic(voc, modes), b);
}

std::string check(const std::string& text) {
    auto p = load(text);
    return json{{"predicates", p.vocabulary.predicates().size()},
                {"elements", p.domain().size()},
                {"sentences", p.theory.sentences().size()},
                {"definitions", p.theory.definitions().size()}}
        .dump();
}

std::string run_propagate(const std::string& text, std::optional<std::size_t> budget, bool oracle, bool keep_aux) {
    auto p = load(text);
    json out;
    if (oracle) {
        auto r = complete_propagate(p.theory, p.vocabulary, p.structure);
        out = {{"structure", structure_to_json(r)}, {"text", print_structure(r)}, {"inconsistent", !r.three_valued()}};
        return out.dump();
    }
    PropagateConfig cfg;
    cfg.budget = budget;
    cfg.restrict_output = !keep_aux;
    auto r = propagate(p.theory, p.vocabulary, p.structure, cfg);
    json steps = json::array();
    for (auto& st : r.trace.steps) {
        json ch = json::array();
        for (auto& c : st.changes) ch.push_back(to_string(c, r.working));
        steps.push_back({{"propagator", st.propagator < 0 ? std::string("input") : r.trace.propagators[st.propagator]},
                         {"changes", ch}});
    }
    json props = json::object();
    for (std::size_t k = 0; k < r.trace.propagators.size(); ++k)
        props[r.trace.propagators[k]] = r.describe(static_cast<int>(k));
    out = {{"structure", structure_to_json(r.structure)},
           {"text", print_structure(r.structure)},
           {"inconsistent", !r.structure.three_valued()},
           {"stabilized", r.trace.stabilized},
           {"applications", r.trace.applications},
           {"steps", steps},
           {"propagators", props}};
    return out.dump();
}

std::vector<std::string> normalize(const std::string& text, const std::string& form) {
    auto p = load(text);
    std::vector<std::string> out;
    if (form == "enf") {
        auto fe = eliminate_functions(p.theory, p.vocabulary);
        for (auto& e : to_enf(fe.theory, fe.vocabulary).sentences) out.push_back(to_string(e));
    } else if (form == "inf") {
        for (auto& s : theory_to_inf(p.theory, p.vocabulary).infs) out.push_back(to_string(s));
    } else {
        throw std::invalid_argument("form must be \"enf\" or \"inf\"");
    }
    return out;
}

std::vector<std::string> models(const std::string& text, std::size_t max_unknown) {
    auto p = load(text);
    OracleOptions o;
    o.max_unknown = max_unknown;
    std::vector<std::string> out;
    for (auto& m : enumerate_models(p.theory, p.vocabulary, p.structure, o)) out.push_back(structure_to_json(m).dump());
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "constraint propagation for FO(ID) with aggregates";

    static py::exception<ParseError> parse_exc(m, "ParseError", PyExc_ValueError);
    static py::exception<InvalidTheory> invalid_exc(m, "InvalidTheory", PyExc_ValueError);
    static py::exception<ServiceError> service_exc(m, "ServiceError", PyExc_RuntimeError);
    static py::exception<OracleLimit> limit_exc(m, "OracleLimit", PyExc_RuntimeError);
    py::register_exception<EvalError>(m, "EvalError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ParseError& e) {
            PyErr_SetObject(parse_exc.ptr(), py::make_tuple(e.what(), e.line, e.column).ptr());
        } catch (const InvalidTheory& e) {
            PyErr_SetObject(invalid_exc.ptr(), py::make_tuple(e.diags.dump()).ptr());
        } catch (const ServiceError& e) {
            PyErr_SetObject(service_exc.ptr(), py::make_tuple(e.what(), e.status, e.detail.dump()).ptr());
        } catch (const OracleLimit& e) {
            limit_exc(e.what());
        }
    });

    m.def("check", &check, py::arg("text"));
    m.def("propagate", &run_propagate, py::arg("text"), py::arg("budget") = py::none(), py::arg("oracle") = false,
          py::arg("keep_aux") = false);
    m.def("normalize", &normalize, py::arg("text"), py::arg("form") = "enf");
    m.def(
        "emit_rules",
        [](const std::string& text) {
            auto p = load(text);
            return to_datalog(emit_rule_set(plan_propagation(p.theory, p.vocabulary).infs));
        },
        py::arg("text"));
    m.def(
        "symbolic",
        [](const std::string& text, std::optional<std::size_t> rounds, std::size_t max_query_size) {
            Vocabulary voc;
            return print_symbolic(run_symbolic(load(text), voc, rounds, max_query_size));
        },
        py::arg("text"), py::arg("rounds") = py::none(), py::arg("max_query_size") = 20000);
    m.def(
        "rewrite",
        [](const std::string& text, const std::string& query, std::optional<std::size_t> rounds,
           std::size_t max_query_size) {
            auto p = load(text);
            Vocabulary voc;
            auto phi = run_symbolic(p, voc, rounds, max_query_size);
            auto q = parse_query(query, voc);
            return std::make_pair(to_string(rewrite_certain(phi, q)), to_string(rewrite_possible(phi, q)));
        },
        py::arg("text"), py::arg("query"), py::arg("rounds") = py::none(), py::arg("max_query_size") = 20000);
    m.def("models", &models, py::arg("text"), py::arg("max_unknown") = 30);

    py::class_<SessionStore>(m, "SessionStore")
        .def(py::init<>())
        .def(
            "create", [](SessionStore& s, const std::string& text, bool oracle) { return s.create(text, oracle).dump(); },
            py::arg("text"), py::arg("oracle") = false)
        .def("get", [](const SessionStore& s, const std::string& id) { return s.get(id).dump(); })
        .def(
            "assign",
            [](SessionStore& s, const std::string& id, const std::string& pred, const std::vector<std::string>& tuple,
               bool value) { return s.assign(id, {pred, tuple, value}).dump(); },
            py::arg("id"), py::arg("pred"), py::arg("tuple"), py::arg("value"))
        .def("retract_index",
             [](SessionStore& s, const std::string& id, std::size_t index) { return s.retract(id, index).dump(); })
        .def("retract_atom",
             [](SessionStore& s, const std::string& id, const std::string& pred, const std::vector<std::string>& tuple) {
                 return s.retract(id, pred, tuple).dump();
             })
        .def("remove", &SessionStore::remove)
        .def("__len__", &SessionStore::size);
}
