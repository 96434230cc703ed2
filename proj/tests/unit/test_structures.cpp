#include <doctest.h>

#include <limits>

#include "gen.hpp"
#include "naive.hpp"

#include "infprop/eval.hpp"
#include "infprop/io.hpp"

using namespace infprop;

namespace {

const std::vector<TV> all_tv{TV::U, TV::T, TV::F, TV::I};

// Evaluate, mapping an EvalError to nullopt so the two evaluators can be compared.
template <class F>
std::optional<TV> guarded(F&& f) {
    try {
        return f();
    } catch (const EvalError&) {
        return std::nullopt;
    }
}

// j with some atoms raised in the precision order.
Structure raise(gen::Rng& r, const Structure& i) {
    Structure j = i;
    for (std::size_t p = 0; p < j.signature().preds.size(); ++p)
        for (std::size_t a = 0; a < j.atom_count(static_cast<int>(p)); ++a)
            if (r.coin(0.3)) j.set(static_cast<int>(p), a, lub_p(j.get(static_cast<int>(p), a), r.pick(all_tv)));
    return j;
}

} // namespace

TEST_CASE("truth value lattice") {
    for (TV a : all_tv) {
        CHECK(inverse(inverse(a)) == a);
        CHECK(tv_from_char(tv_char(a)) == a);
        for (TV b : all_tv) {
            CHECK(leq_p(glb_p(a, b), a));
            CHECK(leq_p(a, lub_p(a, b)));
            CHECK(leq_t(glb_t(a, b), a));
            CHECK(leq_t(a, lub_t(a, b)));
            // negation is monotone in the precision order
            if (leq_p(a, b)) CHECK(leq_p(inverse(a), inverse(b)));
        }
    }
    CHECK(inverse(TV::U) == TV::U);
    CHECK(inverse(TV::I) == TV::I);
    CHECK(leq_t(TV::F, TV::U));
    CHECK(leq_t(TV::U, TV::T));
    CHECK_FALSE(leq_t(TV::U, TV::I));
}

TEST_CASE("domain order puts numerals first") {
    Domain d({"b", "10", "a", "2"});
    CHECK(d.less(*d.find("2"), *d.find("10")));
    CHECK(d.less(*d.find("10"), *d.find("a")));
    CHECK(d.less(*d.find("a"), *d.find("b")));
    CHECK(d.find_number(10) == d.find("10"));
    CHECK_FALSE(d.number(*d.find("a")).has_value());
}

TEST_CASE("structure indexing, extend and restrict") {
    auto dom = gen::numeric_domain(3);
    auto sig = make_signature(std::vector<Symbol>{{"P", 2}, {"R", 0}});
    Structure s(dom, sig);
    CHECK(s.atom_count(0) == 9);
    CHECK(s.atom_count(1) == 1);
    for (std::size_t a = 0; a < 9; ++a) CHECK(s.index(s.tuple(0, a)) == a);
    s.set_value("P", {"1", "2"}, TV::T);
    CHECK(s.value("P", Tuple{1, 2}) == TV::T);
    CHECK(s.count(TV::U) == 9);
    auto wide = s.extend(make_signature(std::vector<Symbol>{{"P", 2}, {"R", 0}, {"S", 1}}));
    CHECK(wide.value("P", Tuple{1, 2}) == TV::T);
    CHECK(wide.value("S", Tuple{0}) == TV::U);
    CHECK(wide.restrict(sig) == s);
    CHECK(Structure::top(dom, sig).count(TV::I) == 10);
}

TEST_CASE("set_literal stores the inverse for negative literals") {
    auto dom = gen::numeric_domain(2);
    auto sig = make_signature(std::vector<Symbol>{{"P", 1}});
    Structure s(dom, sig);
    auto a = set_literal(s, {"P", {0}, false}, TV::T);
    CHECK(a.value("P", Tuple{0}) == TV::F);
    auto b = set_literal(s, {"P", {1}, true}, TV::T);
    CHECK(b.value("P", Tuple{1}) == TV::T);
}

TEST_CASE("tf encoding round trip and precision order") {
    gen::Rng r(21);
    auto dom = gen::numeric_domain(3);
    auto sig = make_signature(gen::predicates(r, 3, 2));
    for (int k = 0; k < 200; ++k) {
        auto a = gen::structure(r, dom, sig, 0.4, 0.1);
        auto b = raise(r, a);
        auto ta = tf_encode(a), tb = tf_encode(b);
        CHECK(ta.two_valued());
        CHECK(tf_decode(ta, sig) == a);
        CHECK(leq_p(a, b));
        // a ≤p b iff every true tf atom of a is true in b
        CHECK(leq_t(ta, tb));
        auto c = gen::structure(r, dom, sig, 0.4, 0.1);
        CHECK(leq_p(a, c) == leq_t(ta, tf_encode(c)));
        CHECK(leq_p(glb_p(a, c), a));
        CHECK(leq_p(c, lub_p(a, c)));
    }
}

TEST_CASE("student constraint is unknown before propagation") {
    std::string text =
        "vocabulary { Selected/1 Course/1 }\ndomain { c1, c2 }\n"
        "structure { Course = { c1, c2 }. Selected<ct> = { c1 }. }\n";
    auto p = parse_problem(text);
    auto all = parse_formula("! c : Course(c) => Selected(c)", p.vocabulary);
    CHECK(evaluate(p.structure, all) == TV::U);
    auto some = parse_formula("? c : Course(c) & Selected(c)", p.vocabulary);
    CHECK(evaluate(p.structure, some) == TV::T);
    CHECK(evaluate(p.structure, parse_formula("! c : Course(c)", p.vocabulary)) == TV::T);
}

TEST_CASE("aggregate bounds on small sets") {
    auto inf = std::numeric_limits<double>::infinity();
    // card {a^t, b^f, c^u}
    CHECK(bounds_of(AggFn::Card, {1}, {1}) == Bounds{1, 2});
    // sum {2^t, 3^u, -1^u}
    CHECK(bounds_of(AggFn::Sum, {2}, {3, -1}) == Bounds{1, 5});
    CHECK(bounds_of(AggFn::Min, {}, {}) == Bounds{inf, inf});
    CHECK(bounds_of(AggFn::Max, {}, {}) == Bounds{-inf, -inf});
    CHECK(bounds_of(AggFn::Min, {4}, {2, 7}) == Bounds{2, 4});
    CHECK(bounds_of(AggFn::Prod, {2}, {3, 0}) == Bounds{0, 6});
    CHECK(compare_bounds(2, Cmp::Leq, Bounds{1, 2}) == TV::U);
    CHECK(compare_bounds(1, Cmp::Leq, Bounds{1, 2}) == TV::T);
    CHECK(compare_bounds(3, Cmp::Leq, Bounds{1, 2}) == TV::F);
    CHECK(compare_bounds(3, Cmp::Eq, Bounds{3, 3}) == TV::T);
}

TEST_CASE("aggregate bounds agree with subset enumeration") {
    gen::Rng r(8);
    const std::vector<AggFn> fns{AggFn::Card, AggFn::Sum, AggFn::Prod, AggFn::Min, AggFn::Max};
    for (int k = 0; k < 400; ++k) {
        std::vector<double> c, u;
        int nc = r.uniform(0, 3), nu = r.uniform(0, 6);
        for (int i = 0; i < nc; ++i) c.push_back(r.uniform(0, 5));
        for (int i = 0; i < nu; ++i) u.push_back(r.uniform(-3, 5));
        for (AggFn fn : fns) {
            if (fn == AggFn::Prod)
                for (auto& x : u) x = std::abs(x);
            CHECK(bounds_of(fn, c, u) == naive::subset_bounds(fn, c, u));
        }
    }
}

TEST_CASE("compiled evaluation agrees with the reference evaluator") {
    gen::Rng r(2024);
    for (int k = 0; k < 1500; ++k) {
        int dn = r.uniform(1, 3);
        auto preds = gen::predicates(r, 3, 2);
        gen::FormulaOpts o{preds, dn};
        o.builtins = true;
        o.aggregates = k % 2 == 0;
        auto f = gen::sentence(r, o);
        auto s = gen::structure(r, gen::numeric_domain(dn), make_signature(preds), 0.4, k % 4 == 0 ? 0.15 : 0.0);
        auto a = guarded([&] { return evaluate(s, f); });
        auto b = guarded([&] { return naive::eval(s, f); });
        INFO(to_string(f));
        CHECK(a == b);
    }
}

TEST_CASE("evaluation is monotone and three-valued input stays three-valued") {
    gen::Rng r(77);
    for (int k = 0; k < 600; ++k) {
        int dn = r.uniform(1, 3);
        auto preds = gen::predicates(r, 3, 2);
        gen::FormulaOpts o{preds, dn};
        o.builtins = true;
        o.aggregates = k % 3 == 0;
        auto f = gen::sentence(r, o);
        auto i = gen::structure(r, gen::numeric_domain(dn), make_signature(preds), 0.5);
        auto j = raise(r, i);
        auto vi = guarded([&] { return evaluate(i, f); });
        auto vj = guarded([&] { return evaluate(j, f); });
        if (!vi || !vj) continue;
        INFO(to_string(f));
        CHECK(*vi != TV::I);
        CHECK(leq_p(*vi, *vj));
    }
}

TEST_CASE("two-valued structures give two-valued results") {
    gen::Rng r(91);
    for (int k = 0; k < 300; ++k) {
        auto preds = gen::predicates(r, 3, 2);
        gen::FormulaOpts o{preds, 2};
        o.aggregates = true;
        auto f = gen::sentence(r, o);
        auto s = gen::two_valued(r, gen::numeric_domain(2), make_signature(preds));
        auto v = guarded([&] { return evaluate(s, f); });
        if (v) CHECK((*v == TV::T || *v == TV::F));
    }
}

TEST_CASE("ct and cf formulas read the tf encoding") {
    gen::Rng r(404);
    for (int k = 0; k < 800; ++k) {
        int dn = r.uniform(1, 3);
        auto preds = gen::predicates(r, 3, 2);
        gen::FormulaOpts o{preds, dn};
        o.builtins = true;
        auto f = gen::sentence(r, o);
        auto s = gen::structure(r, gen::numeric_domain(dn), make_signature(preds), 0.4, 0.1);
        auto [ct, cf] = ct_cf(f);
        auto tf = tf_encode(s);
        TV v = evaluate(s, f);
        INFO(to_string(f));
        CHECK(evaluate(tf, ct) == (ct_bit(v) ? TV::T : TV::F));
        CHECK(evaluate(tf, cf) == (cf_bit(v) ? TV::T : TV::F));
    }
}

TEST_CASE("three-valued sets list every candidate tuple") {
    auto p = parse_problem("vocabulary { P/1 }\ndomain { 1, 2, 3 }\nstructure { P<ct> = { 1 }. P<cf> = { 2 }. }");
    auto cond = parse_formula("P(y)", p.vocabulary);
    auto set = three_valued_set(p.structure, {"y"}, cond);
    REQUIRE(set.elems.size() == 3);
    CHECK(set.elems[0].second == TV::T);
    CHECK(set.elems[1].second == TV::F);
    CHECK(set.elems[2].second == TV::U);
    CHECK(agg_bounds(p.structure, {"y"}, cond, AggFn::Sum) == Bounds{1, 4});

    auto q = parse_problem("vocabulary { P/1 }\ndomain { -1, 2 }\nstructure { P = { -1, 2 }. }");
    CHECK_THROWS_AS(evaluate(q.structure, parse_formula("0 >= prod{ y : P(y) }", q.vocabulary)), EvalError);
}
