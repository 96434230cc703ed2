#include "infprop/io.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace infprop {

ParseError::ParseError(const std::string& msg, int l, int c)
    : std::runtime_error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg), line(l), column(c) {}

namespace {

enum class Tok { Ident, Number, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1, col = 1;
};

const char* const kPuncts[] = {"<=>", "=>", "=<", ">=", "~=", "<-", "<", ">", "=", "~", "&", "|", "!",
                               "?",   ":",  ".",  ",",  "(",  ")",  "{", "}", "/"};

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.col = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
                ++j;
            t.kind = Tok::Ident;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
            out.push_back(std::move(t));
            continue;
        }
        bool neg = c == '-' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1]));
        if (std::isdigit(static_cast<unsigned char>(c)) || neg) {
            std::size_t j = i + (neg ? 1 : 0);
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            t.kind = Tok::Number;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
            out.push_back(std::move(t));
            continue;
        }
        bool matched = false;
        for (const char* p : kPuncts) {
            std::string_view pv(p);
            if (src.substr(i, pv.size()) == pv) {
                t.kind = Tok::Punct;
                t.text = std::string(pv);
                advance(pv.size());
                out.push_back(std::move(t));
                matched = true;
                break;
            }
        }
        if (!matched) throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    Token end;
    end.line = line;
    end.col = col;
    out.push_back(end);
    return out;
}

bool is_agg_keyword(const std::string& s) {
    return s == "card" || s == "sum" || s == "prod" || s == "min" || s == "max";
}

AggFn agg_of(const std::string& s) {
    if (s == "card") return AggFn::Card;
    if (s == "sum") return AggFn::Sum;
    if (s == "prod") return AggFn::Prod;
    if (s == "min") return AggFn::Min;
    return AggFn::Max;
}

bool is_comparison(const Token& t) {
    if (t.kind != Tok::Punct) return false;
    return t.text == "=" || t.text == "~=" || t.text == "<" || t.text == "=<" || t.text == ">" || t.text == ">=";
}

// bound OP agg  <=>  agg FLIP(OP) bound
Cmp cmp_of(const std::string& op, bool agg_on_left) {
    Cmp c = op == ">=" ? Cmp::Geq : op == "=<" ? Cmp::Leq : op == ">" ? Cmp::Gt : op == "<" ? Cmp::Lt : Cmp::Eq;
    if (!agg_on_left) return c;
    switch (c) {
    case Cmp::Geq: return Cmp::Leq;
    case Cmp::Leq: return Cmp::Geq;
    case Cmp::Gt: return Cmp::Lt;
    case Cmp::Lt: return Cmp::Gt;
    default: return c;
    }
}

class Parser {
public:
    Parser(std::string_view src, Vocabulary* voc) : toks_(lex(src)), voc_(voc) {}

    Problem problem() {
        Problem p;
        std::vector<std::string> domain;
        bool have_domain = false, have_structure = false;
        struct Pending {
            std::string pred;
            int mode; // 0 two-valued, 1 ct, 2 cf
            std::vector<std::vector<std::string>> tuples;
            Token at;
        };
        std::vector<Pending> pending;
        while (!at_end()) {
            Token kw = expect_ident();
            if (kw.text == "vocabulary") {
                expect("{");
                while (!accept("}")) {
                    bool fn = false;
                    Token name = expect_ident();
                    if (name.text == "function" && peek().kind == Tok::Ident) {
                        fn = true;
                        name = expect_ident();
                    }
                    expect("/");
                    Token ar = next();
                    if (ar.kind != Tok::Number || ar.text.find_first_not_of("0123456789") != std::string::npos)
                        fail(ar, "expected an arity");
                    accept(".");
                    accept(",");
                    try {
                        if (fn)
                            voc_->add_function(name.text, std::stoi(ar.text));
                        else
                            voc_->add_predicate(name.text, std::stoi(ar.text));
                    } catch (const std::invalid_argument& e) {
                        fail(name, e.what());
                    }
                }
            } else if (kw.text == "domain") {
                expect("{");
                have_domain = true;
                // quantifier semantics (and the INF rules built on them) assume at least one element
                if (peek().text == "}") fail(peek(), "empty domain");
                {
                    do {
                        Token e = next();
                        if (e.kind != Tok::Ident && e.kind != Tok::Number) fail(e, "expected a domain element");
                        if (std::find(domain.begin(), domain.end(), e.text) != domain.end())
                            fail(e, "duplicate domain element " + e.text);
                        domain.push_back(e.text);
                    } while (accept(","));
                    expect("}");
                }
            } else if (kw.text == "theory") {
                expect("{");
                while (!accept("}")) {
                    if (peek().kind == Tok::Ident && peek().text == "define" && peek(1).text == "{") {
                        next();
                        next();
                        p.theory.elements.emplace_back(definition());
                    } else {
                        auto f = formula();
                        expect(".");
                        p.theory.elements.emplace_back(f);
                    }
                }
            } else if (kw.text == "structure") {
                expect("{");
                have_structure = true;
                while (!accept("}")) {
                    Pending pe;
                    pe.at = peek();
                    pe.pred = expect_ident().text;
                    pe.mode = 0;
                    bool closed_eq = false;
                    if (accept("<")) {
                        Token m = expect_ident();
                        if (m.text == "ct")
                            pe.mode = 1;
                        else if (m.text == "cf")
                            pe.mode = 2;
                        else
                            fail(m, "expected ct or cf");
                        if (accept(">=")) closed_eq = true;
                        else expect(">");
                    }
                    if (!closed_eq) expect("=");
                    expect("{");
                    if (!accept("}")) {
                        do {
                            pe.tuples.push_back(tuple());
                        } while (accept(","));
                        expect("}");
                    }
                    expect(".");
                    pending.push_back(std::move(pe));
                }
            } else if (kw.text == "input") {
                expect("{");
                while (!accept("}")) {
                    Token name = expect_ident();
                    InputMode m = InputMode::TwoValued;
                    if (accept("<")) {
                        Token ct = expect_ident();
                        if (ct.text != "ct") fail(ct, "expected ct");
                        expect(">");
                        m = InputMode::CtOnly;
                    }
                    accept(",");
                    p.inputs.emplace_back(name.text, m);
                }
            } else {
                fail(kw, "expected vocabulary, domain, theory, structure or input");
            }
        }
        if (!have_domain) fail(peek(), "missing domain block");
        (void)have_structure;
        p.vocabulary = *voc_;
        auto dom = std::make_shared<Domain>(domain);
        Structure s(dom, make_signature(*voc_));
        std::map<std::string, int> seen_mode; // pred -> bitmask of modes seen
        for (auto& pe : pending) {
            auto pi = s.signature().find(pe.pred);
            if (!pi) fail(pe.at, "structure interprets undeclared predicate " + pe.pred);
            int& mask = seen_mode[pe.pred];
            int bit = 1 << pe.mode;
            if ((mask & bit) || (pe.mode == 0 && mask) || (pe.mode != 0 && (mask & 1)))
                fail(pe.at, "predicate " + pe.pred + " is interpreted twice");
            mask |= bit;
            int ar = s.signature().arity(*pi);
            std::vector<bool> listed(s.atom_count(*pi), false);
            for (auto& tup : pe.tuples) {
                if (static_cast<int>(tup.size()) != ar) fail(pe.at, "tuple arity mismatch for " + pe.pred);
                Tuple t;
                for (auto& n : tup) {
                    auto e = dom->find(n);
                    if (!e) fail(pe.at, "unknown domain element " + n);
                    t.push_back(*e);
                }
                listed[s.index(t)] = true;
            }
            for (std::size_t i = 0; i < listed.size(); ++i) {
                TV cur = s.get(*pi, i);
                if (pe.mode == 0)
                    s.set(*pi, i, listed[i] ? TV::T : TV::F);
                else if (listed[i])
                    s.set(*pi, i, lub_p(cur, pe.mode == 1 ? TV::T : TV::F));
            }
        }
        p.structure = std::move(s);
        return p;
    }

    FormulaPtr formula_only() {
        auto f = formula();
        accept(".");
        if (!at_end()) fail(peek(), "unexpected input after formula");
        return f;
    }

    QueryDef query_only() {
        QueryDef q;
        expect("{");
        while (peek().kind == Tok::Ident) q.vars.push_back(next().text);
        expect(":");
        for (auto& v : q.vars) scope_.push_back(v);
        q.body = formula();
        for (std::size_t i = 0; i < q.vars.size(); ++i) scope_.pop_back();
        expect("}");
        if (!at_end()) fail(peek(), "unexpected input after query");
        return q;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    Vocabulary* voc_;
    std::vector<std::string> scope_;

    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool at_end() const { return peek().kind == Tok::End; }
    Token next() {
        Token t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }
    [[noreturn]] void fail(const Token& t, const std::string& msg) const {
        std::string near = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw ParseError(msg + " near " + near, t.line, t.col);
    }
    bool accept(const char* p) {
        if (peek().kind == Tok::Punct && peek().text == p) {
            next();
            return true;
        }
        return false;
    }
    void expect(const char* p) {
        if (!accept(p)) fail(peek(), std::string("expected '") + p + "'");
    }
    Token expect_ident() {
        if (peek().kind != Tok::Ident) fail(peek(), "expected an identifier");
        return next();
    }

    std::vector<std::string> tuple() {
        std::vector<std::string> t;
        auto elem = [&] {
            Token e = next();
            if (e.kind != Tok::Ident && e.kind != Tok::Number) fail(e, "expected a domain element");
            t.push_back(e.text);
        };
        if (accept("(")) {
            if (accept(")")) return t;
            do elem();
            while (accept(","));
            expect(")");
        } else {
            elem();
        }
        return t;
    }

    bool bound(const std::string& v) const { return std::find(scope_.begin(), scope_.end(), v) != scope_.end(); }

    Definition definition() {
        Definition d;
        while (!accept("}")) {
            Rule r;
            if (accept("!")) {
                while (peek().kind == Tok::Ident) r.vars.push_back(next().text);
                expect(":");
            }
            for (auto& v : r.vars) scope_.push_back(v);
            r.head = expect_ident().text;
            if (accept("(")) {
                if (!accept(")")) {
                    do r.head_args.push_back(term());
                    while (accept(","));
                    expect(")");
                }
            }
            expect("<-");
            r.body = formula();
            expect(".");
            for (std::size_t i = 0; i < r.vars.size(); ++i) scope_.pop_back();
            d.rules.push_back(std::move(r));
        }
        return d;
    }

    FormulaPtr formula() { return iff(); }

    FormulaPtr iff() {
        auto a = implication();
        while (accept("<=>")) a = mk_iff(a, implication());
        return a;
    }

    FormulaPtr implication() {
        auto a = disjunction();
        if (accept("=>")) return mk_implies(a, implication());
        return a;
    }

    FormulaPtr disjunction() {
        std::vector<FormulaPtr> k{conjunction()};
        while (accept("|")) k.push_back(conjunction());
        return k.size() == 1 ? k[0] : mk_or(std::move(k));
    }

    FormulaPtr conjunction() {
        std::vector<FormulaPtr> k{unary()};
        while (accept("&")) k.push_back(unary());
        return k.size() == 1 ? k[0] : mk_and(std::move(k));
    }

    FormulaPtr unary() {
        if (accept("~")) return mk_not(unary());
        if (peek().kind == Tok::Punct && (peek().text == "!" || peek().text == "?")) {
            Op q = next().text == "!" ? Op::Forall : Op::Exists;
            std::vector<std::string> vars;
            while (peek().kind == Tok::Ident) vars.push_back(next().text);
            if (vars.empty()) fail(peek(), "quantifier without variables");
            expect(":");
            for (auto& v : vars) scope_.push_back(v);
            auto body = formula();
            for (std::size_t i = 0; i < vars.size(); ++i) scope_.pop_back();
            return mk_quant(q, vars, body);
        }
        return primary();
    }

    FormulaPtr primary() {
        const Token& t = peek();
        if (accept("(")) {
            auto f = formula();
            expect(")");
            return f;
        }
        if (t.kind == Tok::Ident && (t.text == "true" || t.text == "false") && !bound(t.text)) {
            next();
            return t.text == "true" ? mk_true() : mk_false();
        }
        if (t.kind == Tok::Ident && is_agg_keyword(t.text) && peek(1).text == "{") {
            auto [fn, vars, cond] = aggregate();
            Token op = next();
            if (!is_comparison(op) || op.text == "~=") fail(op, "expected a comparison after the aggregate");
            auto b = term();
            return mk_agg(b, cmp_of(op.text, true), fn, vars, cond);
        }
        if (t.kind == Tok::Ident && !bound(t.text) && !voc_->has_function(t.text)) {
            bool pred = voc_->has_predicate(t.text);
            bool call = peek(1).text == "(";
            if (pred || (call && !is_comparison_after_call()) || (!call && !is_comparison(peek(1)))) {
                Token name = next();
                std::vector<TermPtr> args;
                if (accept("(")) {
                    if (!accept(")")) {
                        do args.push_back(term());
                        while (accept(","));
                        expect(")");
                    }
                }
                return mk_atom(name.text, std::move(args));
            }
        }
        if (t.kind != Tok::Ident && t.kind != Tok::Number) fail(t, "expected a formula");
        auto lhs = term();
        Token op = next();
        if (!is_comparison(op)) fail(op, "expected a comparison operator");
        if (peek().kind == Tok::Ident && is_agg_keyword(peek().text) && peek(1).text == "{") {
            if (op.text == "~=") fail(op, "~= is not an aggregate comparison");
            auto [fn, vars, cond] = aggregate();
            return mk_agg(lhs, cmp_of(op.text, false), fn, vars, cond);
        }
        auto rhs = term();
        if (op.text == "=") return mk_eq(lhs, rhs);
        if (op.text == "~=") return mk_neq(lhs, rhs);
        if (op.text == "<") return mk_atom(kLt, {lhs, rhs});
        if (op.text == "=<") return mk_atom(kLe, {lhs, rhs});
        if (op.text == ">") return mk_atom(kLt, {rhs, lhs});
        return mk_atom(kLe, {rhs, lhs});
    }

    // An undeclared name applied to arguments: a comparison after the closing paren
    // means it was meant as a function term.
    bool is_comparison_after_call() const {
        int depth = 0;
        for (std::size_t k = 1;; ++k) {
            const Token& t = peek(k);
            if (t.kind == Tok::End) return false;
            if (t.text == "(") ++depth;
            if (t.text == ")" && --depth == 0) return is_comparison(peek(k + 1));
        }
    }

    std::tuple<AggFn, std::vector<std::string>, FormulaPtr> aggregate() {
        AggFn fn = agg_of(next().text);
        expect("{");
        std::vector<std::string> vars;
        while (peek().kind == Tok::Ident) vars.push_back(next().text);
        expect(":");
        for (auto& v : vars) scope_.push_back(v);
        auto cond = formula();
        for (std::size_t i = 0; i < vars.size(); ++i) scope_.pop_back();
        expect("}");
        return {fn, vars, cond};
    }

    TermPtr term() {
        Token t = next();
        if (t.kind == Tok::Number) return mk_num(std::stod(t.text), t.text);
        if (t.kind != Tok::Ident) fail(t, "expected a term");
        if (accept("(")) {
            std::vector<TermPtr> args;
            if (!accept(")")) {
                do args.push_back(term());
                while (accept(","));
                expect(")");
            }
            return mk_func(t.text, std::move(args));
        }
        if (!bound(t.text) && voc_->has_function(t.text)) return mk_func(t.text, {});
        return mk_var(t.text);
    }
};

std::string tuple_text(const std::vector<std::string>& t) {
    if (t.size() == 1) return t[0];
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + t[i];
    return s + ")";
}

std::string list_text(const std::vector<std::vector<std::string>>& ts) {
    if (ts.empty()) return "{ }";
    std::string s = "{ ";
    for (std::size_t i = 0; i < ts.size(); ++i) s += (i ? ", " : "") + tuple_text(ts[i]);
    return s + " }";
}

} // namespace

Problem parse_problem(std::string_view text) {
    Vocabulary v;
    Parser p(text, &v);
    return p.problem();
}

FormulaPtr parse_formula(std::string_view text, const Vocabulary& v) {
    Vocabulary copy = v;
    Parser p(text, &copy);
    return p.formula_only();
}

QueryDef parse_query(std::string_view text, const Vocabulary& v) {
    Vocabulary copy = v;
    Parser p(text, &copy);
    return p.query_only();
}

std::vector<std::vector<std::string>> sorted_tuples(const Structure& s, int pred, bool ct_side) {
    std::vector<std::vector<std::string>> out;
    for (std::size_t i = 0; i < s.atom_count(pred); ++i) {
        TV v = s.get(pred, i);
        if (ct_side ? !ct_bit(v) : !cf_bit(v)) continue;
        std::vector<std::string> names;
        for (int e : s.tuple(pred, i)) names.push_back(s.domain().name(e));
        out.push_back(std::move(names));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string print_structure(const Structure& s, const std::string& indent) {
    std::string out = "structure {\n";
    for (std::size_t p = 0; p < s.signature().preds.size(); ++p) {
        int pi = static_cast<int>(p);
        auto& name = s.signature().preds[p].name;
        bool all_u = true, two = true;
        for (std::size_t i = 0; i < s.atom_count(pi); ++i) {
            TV v = s.get(pi, i);
            if (v != TV::U) all_u = false;
            if (v == TV::U || v == TV::I) two = false;
        }
        if (all_u && s.atom_count(pi) > 0) continue;
        if (two) {
            out += indent + name + " = " + list_text(sorted_tuples(s, pi, true)) + ".\n";
        } else {
            out += indent + name + "<ct> = " + list_text(sorted_tuples(s, pi, true)) + ".\n";
            out += indent + name + "<cf> = " + list_text(sorted_tuples(s, pi, false)) + ".\n";
        }
    }
    return out + "}\n";
}

std::string print_problem(const Problem& p) {
    std::string out = "vocabulary {\n";
    for (auto& s : p.vocabulary.predicates()) out += "  " + s.name + "/" + std::to_string(s.arity) + "\n";
    for (auto& s : p.vocabulary.functions()) out += "  function " + s.name + "/" + std::to_string(s.arity) + "\n";
    out += "}\n";
    out += "domain {";
    auto& names = p.structure.domain().names();
    for (std::size_t i = 0; i < names.size(); ++i) out += (i ? ", " : " ") + names[i];
    out += names.empty() ? "}\n" : " }\n";
    out += "theory {\n";
    for (auto& e : p.theory.elements) {
        if (auto f = std::get_if<FormulaPtr>(&e)) {
            out += "  " + to_string(*f) + ".\n";
            continue;
        }
        out += "  define {\n";
        for (auto& r : std::get<Definition>(e).rules) out += "    " + to_string(r) + ".\n";
        out += "  }\n";
    }
    out += "}\n";
    out += print_structure(p.structure);
    if (!p.inputs.empty()) {
        out += "input {";
        for (auto& [name, mode] : p.inputs) out += " " + name + (mode == InputMode::CtOnly ? "<ct>" : "");
        out += " }\n";
    }
    return out;
}

bool equal(const Problem& a, const Problem& b) {
    return a.vocabulary == b.vocabulary && equal(a.theory, b.theory) && a.structure == b.structure &&
           a.inputs == b.inputs;
}

nlohmann::json structure_to_json(const Structure& s) {
    nlohmann::json j;
    j["domain"] = s.domain().names();
    for (std::size_t p = 0; p < s.signature().preds.size(); ++p) {
        int pi = static_cast<int>(p);
        std::vector<std::pair<std::vector<std::string>, std::string>> rows;
        for (std::size_t i = 0; i < s.atom_count(pi); ++i) {
            TV v = s.get(pi, i);
            if (v == TV::U) continue;
            std::vector<std::string> names;
            for (int e : s.tuple(pi, i)) names.push_back(s.domain().name(e));
            rows.emplace_back(std::move(names), std::string(1, tv_char(v)));
        }
        std::sort(rows.begin(), rows.end());
        auto arr = nlohmann::json::array();
        for (auto& [t, v] : rows) arr.push_back(nlohmann::json::array({t, v}));
        j[s.signature().preds[p].name] = arr;
    }
    return j;
}

Structure structure_from_json(const nlohmann::json& j, SignaturePtr sig) {
    auto dom = std::make_shared<Domain>(j.at("domain").get<std::vector<std::string>>());
    Structure s(dom, sig);
    for (auto& [key, val] : j.items()) {
        if (key == "domain") continue;
        auto p = sig->find(key);
        if (!p) throw std::invalid_argument("unknown predicate " + key);
        for (auto& row : val) {
            auto names = row.at(0).get<std::vector<std::string>>();
            auto v = row.at(1).get<std::string>();
            auto tv = v.size() == 1 ? tv_from_char(v[0]) : std::nullopt;
            if (!tv) throw std::invalid_argument("bad truth value " + v);
            s.set_value(key, names, *tv);
        }
    }
    return s;
}

} // namespace infprop
