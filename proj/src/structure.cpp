#include "infprop/structure.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace infprop {

char tv_char(TV v) {
    switch (v) {
    case TV::T: return 't';
    case TV::F: return 'f';
    case TV::I: return 'i';
    default: return 'u';
    }
}

std::optional<TV> tv_from_char(char c) {
    switch (c) {
    case 't': return TV::T;
    case 'f': return TV::F;
    case 'u': return TV::U;
    case 'i': return TV::I;
    default: return std::nullopt;
    }
}

std::optional<double> parse_numeral(const std::string& s) {
    std::size_t i = 0;
    if (i < s.size() && s[i] == '-') ++i;
    std::size_t digits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++digits;
    if (!digits) return std::nullopt;
    if (i < s.size() && s[i] == '.') {
        ++i;
        std::size_t frac = 0;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++frac;
        if (!frac) return std::nullopt;
    }
    if (i != s.size()) return std::nullopt;
    return std::strtod(s.c_str(), nullptr);
}

Domain::Domain(std::vector<std::string> names) : names_(std::move(names)) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (!index_.emplace(names_[i], static_cast<int>(i)).second)
            throw std::invalid_argument("duplicate domain element " + names_[i]);
        nums_.push_back(parse_numeral(names_[i]));
    }
    std::vector<int> order(names_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        auto &na = nums_[a], &nb = nums_[b];
        if (na && nb) return *na != *nb ? *na < *nb : names_[a] < names_[b];
        if (na || nb) return na.has_value();
        return names_[a] < names_[b];
    });
    rank_.resize(names_.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank_[order[r]] = static_cast<int>(r);
}

std::optional<int> Domain::find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::optional<int> Domain::find_number(double v) const {
    for (std::size_t i = 0; i < nums_.size(); ++i)
        if (nums_[i] && *nums_[i] == v) return static_cast<int>(i);
    return std::nullopt;
}

bool Domain::less(int a, int b) const { return rank_[a] < rank_[b]; }

Signature::Signature(std::vector<Symbol> p) : preds(std::move(p)) {
    for (std::size_t i = 0; i < preds.size(); ++i) index[preds[i].name] = static_cast<int>(i);
}

std::optional<int> Signature::find(const std::string& name) const {
    auto it = index.find(name);
    if (it == index.end()) return std::nullopt;
    return it->second;
}

SignaturePtr make_signature(const std::vector<Symbol>& preds) { return std::make_shared<Signature>(preds); }
SignaturePtr make_signature(const Vocabulary& v) { return make_signature(v.predicates()); }

std::size_t ipow(std::size_t base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

Structure::Structure(DomainPtr dom, SignaturePtr sig) : dom_(std::move(dom)), sig_(std::move(sig)) {
    sizes_.reserve(sig_->preds.size());
    for (auto& p : sig_->preds) sizes_.push_back(ipow(dom_->size(), p.arity));
    tables_.resize(sig_->preds.size());
}

Structure Structure::top(DomainPtr dom, SignaturePtr sig) {
    Structure s(std::move(dom), std::move(sig));
    for (std::size_t p = 0; p < s.tables_.size(); ++p) s.tables_[p].assign(s.sizes_[p], static_cast<std::uint8_t>(TV::I));
    return s;
}

std::size_t Structure::index(const Tuple& t) const {
    std::size_t idx = 0, n = dom_->size();
    for (int e : t) idx = idx * n + e;
    return idx;
}

Tuple Structure::tuple(int pred, std::size_t idx) const {
    int k = sig_->preds[pred].arity;
    Tuple t(k);
    std::size_t n = dom_->size();
    for (int i = k - 1; i >= 0; --i) {
        t[i] = static_cast<int>(idx % n);
        idx /= n;
    }
    return t;
}

void Structure::set(int pred, std::size_t idx, TV v) {
    auto& tb = tables_[pred];
    if (tb.empty()) {
        if (v == TV::U) return;
        tb.assign(sizes_[pred], 0);
    }
    tb[idx] = static_cast<std::uint8_t>(v);
}

static int require_pred(const Signature& sig, const std::string& pred, std::size_t arity) {
    auto p = sig.find(pred);
    if (!p) throw std::invalid_argument("unknown predicate " + pred);
    if (sig.preds[*p].arity != static_cast<int>(arity))
        throw std::invalid_argument("arity mismatch for " + pred);
    return *p;
}

TV Structure::value(const std::string& pred, const Tuple& t) const {
    int p = require_pred(*sig_, pred, t.size());
    return get(p, index(t));
}

static Tuple tuple_of_names(const Domain& d, const std::vector<std::string>& names) {
    Tuple t;
    for (auto& n : names) {
        auto e = d.find(n);
        if (!e) throw std::invalid_argument("unknown domain element " + n);
        t.push_back(*e);
    }
    return t;
}

TV Structure::value(const std::string& pred, const std::vector<std::string>& names) const {
    return value(pred, tuple_of_names(*dom_, names));
}

void Structure::set_value(const std::string& pred, const std::vector<std::string>& names, TV v) {
    auto t = tuple_of_names(*dom_, names);
    set(require_pred(*sig_, pred, t.size()), index(t), v);
}

bool Structure::three_valued() const {
    for (auto& tb : tables_)
        for (auto b : tb)
            if (b == static_cast<std::uint8_t>(TV::I)) return false;
    return true;
}

bool Structure::two_valued() const {
    for (std::size_t p = 0; p < tables_.size(); ++p) {
        if (sizes_[p] && tables_[p].empty()) return false;
        for (auto b : tables_[p])
            if (b == 0 || b == 3) return false;
    }
    return true;
}

std::size_t Structure::count(TV v) const {
    std::size_t n = 0;
    for (std::size_t p = 0; p < tables_.size(); ++p) {
        if (tables_[p].empty()) {
            if (v == TV::U) n += sizes_[p];
            continue;
        }
        n += std::count(tables_[p].begin(), tables_[p].end(), static_cast<std::uint8_t>(v));
    }
    return n;
}

Structure Structure::extend(SignaturePtr wider) const {
    Structure s(dom_, std::move(wider));
    for (std::size_t p = 0; p < sig_->preds.size(); ++p) {
        auto q = s.sig_->find(sig_->preds[p].name);
        if (!q || s.sig_->preds[*q].arity != sig_->preds[p].arity)
            throw std::invalid_argument("extend: signature does not contain " + sig_->preds[p].name);
        s.tables_[*q] = tables_[p];
    }
    return s;
}

Structure Structure::restrict(SignaturePtr narrower) const {
    Structure s(dom_, std::move(narrower));
    for (std::size_t q = 0; q < s.sig_->preds.size(); ++q) {
        auto p = sig_->find(s.sig_->preds[q].name);
        if (!p) throw std::invalid_argument("restrict: unknown predicate " + s.sig_->preds[q].name);
        s.tables_[q] = tables_[*p];
    }
    return s;
}

bool Structure::operator==(const Structure& o) const {
    if (!(*dom_ == *o.dom_) || !(*sig_ == *o.sig_)) return false;
    for (std::size_t p = 0; p < tables_.size(); ++p) {
        for (std::size_t i = 0; i < sizes_[p]; ++i)
            if (get(static_cast<int>(p), i) != o.get(static_cast<int>(p), i)) return false;
    }
    return true;
}

static void check_compatible(const Structure& a, const Structure& b) {
    if (!(a.domain() == b.domain()) || !(a.signature() == b.signature()))
        throw std::invalid_argument("structures over different domains or vocabularies");
}

bool leq_p(const Structure& a, const Structure& b) {
    check_compatible(a, b);
    for (std::size_t p = 0; p < a.signature().preds.size(); ++p)
        for (std::size_t i = 0; i < a.atom_count(static_cast<int>(p)); ++i)
            if (!leq_p(a.get(static_cast<int>(p), i), b.get(static_cast<int>(p), i))) return false;
    return true;
}

bool leq_t(const Structure& a, const Structure& b) {
    check_compatible(a, b);
    for (std::size_t p = 0; p < a.signature().preds.size(); ++p)
        for (std::size_t i = 0; i < a.atom_count(static_cast<int>(p)); ++i)
            if (!leq_t(a.get(static_cast<int>(p), i), b.get(static_cast<int>(p), i))) return false;
    return true;
}

Structure lub_p(const Structure& a, const Structure& b) {
    check_compatible(a, b);
    Structure s = a;
    for (std::size_t p = 0; p < a.signature().preds.size(); ++p)
        for (std::size_t i = 0; i < a.atom_count(static_cast<int>(p)); ++i)
            s.set(static_cast<int>(p), i, lub_p(a.get(static_cast<int>(p), i), b.get(static_cast<int>(p), i)));
    return s;
}

Structure glb_p(const Structure& a, const Structure& b) {
    check_compatible(a, b);
    Structure s = a;
    for (std::size_t p = 0; p < a.signature().preds.size(); ++p)
        for (std::size_t i = 0; i < a.atom_count(static_cast<int>(p)); ++i)
            s.set(static_cast<int>(p), i, glb_p(a.get(static_cast<int>(p), i), b.get(static_cast<int>(p), i)));
    return s;
}

Structure set_literal(const Structure& s, const DomainLiteral& lit, TV v) {
    auto p = s.signature().find(lit.pred);
    if (!p) throw std::invalid_argument("unknown predicate " + lit.pred);
    if (s.signature().arity(*p) != static_cast<int>(lit.tuple.size()))
        throw std::invalid_argument("arity mismatch for " + lit.pred);
    Structure r = s;
    r.set(*p, s.index(lit.tuple), lit.positive ? v : inverse(v));
    return r;
}

std::string tf_name(const std::string& pred, bool ct) { return pred + (ct ? "_ct" : "_cf"); }

SignaturePtr tf_signature(const Signature& sig) {
    std::vector<Symbol> preds;
    for (auto& p : sig.preds) {
        preds.push_back({tf_name(p.name, true), p.arity});
        preds.push_back({tf_name(p.name, false), p.arity});
    }
    return make_signature(preds);
}

Structure tf_encode(const Structure& s) {
    Structure tf(s.domain_ptr(), tf_signature(s.signature()));
    for (std::size_t p = 0; p < s.signature().preds.size(); ++p) {
        int pi = static_cast<int>(p);
        for (std::size_t i = 0; i < s.atom_count(pi); ++i) {
            TV v = s.get(pi, i);
            tf.set(2 * pi, i, ct_bit(v) ? TV::T : TV::F);
            tf.set(2 * pi + 1, i, cf_bit(v) ? TV::T : TV::F);
        }
    }
    return tf;
}

Structure tf_decode(const Structure& tf, SignaturePtr sig) {
    Structure s(tf.domain_ptr(), sig);
    for (std::size_t p = 0; p < s.signature().preds.size(); ++p) {
        int pi = static_cast<int>(p);
        auto& name = s.signature().preds[p].name;
        auto ct = tf.signature().find(tf_name(name, true));
        auto cf = tf.signature().find(tf_name(name, false));
        for (std::size_t i = 0; i < s.atom_count(pi); ++i) {
            bool a = ct && tf.get(*ct, i) == TV::T;
            bool b = cf && tf.get(*cf, i) == TV::T;
            s.set(pi, i, from_bits(a, b));
        }
    }
    return s;
}

} // namespace infprop
