#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "infprop/logic.hpp"

namespace infprop {

// Bit 0 = "at least true", bit 1 = "at least false". This is the tf pair
// (ct, cf) of a single atom, so lub_p is bitwise or and glb_p bitwise and.
enum class TV : std::uint8_t { U = 0, T = 1, F = 2, I = 3 };

inline TV inverse(TV v) {
    auto b = static_cast<std::uint8_t>(v);
    return static_cast<TV>(((b & 1) << 1) | ((b >> 1) & 1));
}
inline TV lub_p(TV a, TV b) { return static_cast<TV>(static_cast<std::uint8_t>(a) | static_cast<std::uint8_t>(b)); }
inline TV glb_p(TV a, TV b) { return static_cast<TV>(static_cast<std::uint8_t>(a) & static_cast<std::uint8_t>(b)); }
inline bool leq_p(TV a, TV b) { return (static_cast<std::uint8_t>(a) & ~static_cast<std::uint8_t>(b)) == 0; }
inline bool ct_bit(TV v) { return static_cast<std::uint8_t>(v) & 1; }
inline bool cf_bit(TV v) { return static_cast<std::uint8_t>(v) & 2; }
inline TV from_bits(bool ct, bool cf) { return static_cast<TV>((ct ? 1 : 0) | (cf ? 2 : 0)); }
// Truth order: f < u,i < t.
inline TV glb_t(TV a, TV b) { return from_bits(ct_bit(a) && ct_bit(b), cf_bit(a) || cf_bit(b)); }
inline TV lub_t(TV a, TV b) { return from_bits(ct_bit(a) || ct_bit(b), cf_bit(a) && cf_bit(b)); }
inline bool leq_t(TV a, TV b) { return (!ct_bit(a) || ct_bit(b)) && (cf_bit(a) || !cf_bit(b)); }

char tv_char(TV v);                 // 't', 'f', 'u', 'i'
std::optional<TV> tv_from_char(char c);

// ---------------------------------------------------------------- domain

class Domain {
public:
    Domain() = default;
    explicit Domain(std::vector<std::string> names);

    int size() const { return static_cast<int>(names_.size()); }
    const std::string& name(int e) const { return names_[e]; }
    const std::vector<std::string>& names() const { return names_; }
    std::optional<int> find(const std::string& name) const;
    std::optional<double> number(int e) const { return nums_[e]; }
    std::optional<int> find_number(double v) const;
    // Total order on elements used by < and =<: numerals by value first, then names.
    bool less(int a, int b) const;
    int rank(int e) const { return rank_[e]; }

    bool operator==(const Domain& o) const { return names_ == o.names_; }

private:
    std::vector<std::string> names_;
    std::vector<std::optional<double>> nums_;
    std::unordered_map<std::string, int> index_;
    std::vector<int> rank_;
};

std::optional<double> parse_numeral(const std::string& s);

// ---------------------------------------------------------------- signature

struct Signature {
    std::vector<Symbol> preds;
    std::unordered_map<std::string, int> index;

    Signature() = default;
    explicit Signature(std::vector<Symbol> p);
    std::optional<int> find(const std::string& name) const;
    int arity(int p) const { return preds[p].arity; }
    bool operator==(const Signature& o) const { return preds == o.preds; }
};

using SignaturePtr = std::shared_ptr<const Signature>;
using DomainPtr = std::shared_ptr<const Domain>;

SignaturePtr make_signature(const std::vector<Symbol>& preds);
SignaturePtr make_signature(const Vocabulary& v);

// ---------------------------------------------------------------- structures

using Tuple = std::vector<int>;

struct DomainLiteral {
    std::string pred;
    Tuple tuple;
    bool positive = true;
};

class Structure {
public:
    Structure() = default;
    Structure(DomainPtr dom, SignaturePtr sig); // every atom u

    static Structure top(DomainPtr dom, SignaturePtr sig);

    const Domain& domain() const { return *dom_; }
    const DomainPtr& domain_ptr() const { return dom_; }
    const Signature& signature() const { return *sig_; }
    const SignaturePtr& signature_ptr() const { return sig_; }

    std::size_t atom_count(int pred) const { return sizes_[pred]; }
    std::size_t index(const Tuple& t) const;
    Tuple tuple(int pred, std::size_t idx) const;

    TV get(int pred, std::size_t idx) const {
        auto& tb = tables_[pred];
        return tb.empty() ? TV::U : static_cast<TV>(tb[idx]);
    }
    void set(int pred, std::size_t idx, TV v);
    TV value(const std::string& pred, const Tuple& t) const;
    TV value(const std::string& pred, const std::vector<std::string>& names) const;
    void set_value(const std::string& pred, const std::vector<std::string>& names, TV v);

    bool three_valued() const;
    bool two_valued() const;
    std::size_t count(TV v) const;

    // Same domain, larger signature; fresh predicates all u. Existing predicates keep their values.
    Structure extend(SignaturePtr wider) const;
    // Keep only the named predicates (in the given signature's order).
    Structure restrict(SignaturePtr narrower) const;

    bool operator==(const Structure& o) const;
    bool operator!=(const Structure& o) const { return !(*this == o); }

private:
    DomainPtr dom_;
    SignaturePtr sig_;
    std::vector<std::size_t> sizes_;
    std::vector<std::vector<std::uint8_t>> tables_; // empty table: all u
};

std::size_t ipow(std::size_t base, int exp);

bool leq_p(const Structure& a, const Structure& b);
bool leq_t(const Structure& a, const Structure& b);
Structure lub_p(const Structure& a, const Structure& b);
Structure glb_p(const Structure& a, const Structure& b);

// Ĩ[L/v]: a negative literal stores v⁻¹.
Structure set_literal(const Structure& s, const DomainLiteral& lit, TV v);

// tf-vocabulary naming: P_ct and P_cf.
std::string tf_name(const std::string& pred, bool ct);
SignaturePtr tf_signature(const Signature& sig);
Structure tf_encode(const Structure& s);
Structure tf_decode(const Structure& tf, SignaturePtr sig);

} // namespace infprop
