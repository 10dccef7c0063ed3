#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <locus/corpus.hpp>
#include <locus/eval.hpp>
#include <locus/fragment.hpp>
#include <locus/formula.hpp>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

using namespace locus;

namespace
{
    // Z(1): relations P0..P2, Q0..Q2 on one sort, chain d0..d2.
    auto sig() -> const SignatureSpec &
    {
        static auto m = corpus_z(1);
        return *m.sig;
    }

    auto rel(const std::string & name) -> int
    {
        return *sig().relation_index(name);
    }

    auto prints(const std::vector<FormulaPtr> & fs) -> std::vector<std::string>
    {
        std::vector<std::string> out;
        for (const auto & f : fs)
            out.push_back(print(sig(), f));
        return out;
    }

    auto x() -> Term { return make_var("x", 0); }
}

TEST_CASE("sentence enumeration is small and exact for a narrow fragment")
{
    Fragment frag;
    frag.cls = FragmentClass::PrimitivePositive;
    frag.max_quantifier_depth = 1;
    frag.max_connective_width = 1;
    frag.allowed_relations = {"P0"};
    frag.allowed_locality = {"d1"};

    // closed atoms give only "true"; the binder contributes one sentence per
    // body mentioning x0; no anchors exist for a local binder
    auto got = prints(enumerate_fragment(sig(), frag));
    std::vector<std::string> expected{
        "true",
        "exists x0. x0 = x0",
        "exists x0. P0(x0)",
        "exists x0. d1(x0, x0)",
    };
    CHECK(got == expected);
}

TEST_CASE("local binders anchor on the free context")
{
    Fragment frag;
    frag.cls = FragmentClass::PrimitivePositive;
    frag.max_quantifier_depth = 1;
    frag.max_connective_width = 1;
    frag.free_variables = {{"x", 0}};
    frag.allowed_relations = {"P0"};
    frag.allowed_locality = {"d1"};

    // 4 open atoms, then 5 bodies over {x, x0} each yielding one unrestricted
    // and one d1-restricted binder anchored at x
    auto got = prints(enumerate_fragment(sig(), frag));
    CHECK(got.size() == 14);
    auto has = [&](const std::string & s) {
        return std::find(got.begin(), got.end(), s) != got.end();
    };
    CHECK(has("d1(x, x)"));
    CHECK(has("exists x0. x = x0"));
    CHECK(has("exists x0 in d1(x). P0(x0)"));
    CHECK(has("exists x0 in d1(x). d1(x, x0)"));
    CHECK(! has("exists x0. x = x")); // bodies must mention the bound variable
}

TEST_CASE("connective layers multiply out and deduplicate")
{
    Fragment frag;
    frag.cls = FragmentClass::Positive;
    frag.max_quantifier_depth = 0;
    frag.max_connective_width = 2;
    frag.free_variables = {{"x", 0}};
    frag.allowed_relations = {"P0", "Q0"};
    frag.allowed_locality = {"d0"}; // identity only: no locality syntax

    // units: true, false, x = x, P0(x), Q0(x); three plain units give 3
    // conjunction and 3 disjunction pairs, and mixing either back under the
    // other connective gives C(6,2) = 15 per orientation, 12 of them new
    auto got = prints(enumerate_fragment(sig(), frag));
    CHECK(got.size() == 35);

    std::set<std::string> seen(got.begin(), got.end());
    CHECK(seen.size() == got.size());
    CHECK(seen.count("P0(x) & Q0(x)"));
    CHECK(seen.count("P0(x) | Q0(x)"));
    CHECK(seen.count("x = x & (P0(x) | Q0(x))"));
    CHECK(seen.count("x = x | P0(x) & Q0(x)"));
}

TEST_CASE("quantifier-free fragments add negations")
{
    Fragment frag;
    frag.cls = FragmentClass::QuantifierFree;
    frag.max_quantifier_depth = 0;
    frag.max_connective_width = 2;
    frag.free_variables = {{"x", 0}};
    frag.allowed_relations = {"P0"};
    frag.allowed_locality = {"d0"};

    // units: x = x, P0(x) and their negations; 6 pairs per orientation plus
    // 2 * (C(10,2) - 6) mixed-layer formulas on top of the 6 atoms
    auto got = prints(enumerate_fragment(sig(), frag));
    CHECK(got.size() == 96);
    for (const auto & f : enumerate_fragment(sig(), frag))
        CHECK(quantifier_depth(f) == 0);
}

TEST_CASE("enumeration is deterministic and self-contained")
{
    Fragment frag;
    frag.cls = FragmentClass::Positive;
    frag.max_quantifier_depth = 1;
    frag.max_connective_width = 2;
    frag.max_body_width = 1;
    frag.free_variables = {{"x", 0}};
    frag.allowed_relations = {"P0", "Q1"};
    frag.allowed_locality = {"d1"};

    auto first = enumerate_fragment(sig(), frag);
    auto second = enumerate_fragment(sig(), frag);
    CHECK(prints(first) == prints(second));

    // every emitted formula belongs to its own fragment
    for (const auto & f : first)
        CHECK(fragment_contains(sig(), frag, f));

    // emitted formulas stay within the declared whitelists
    std::set<int> allowed_rels{rel("P0"), rel("Q1")};
    for (const auto & f : first) {
        for (int r : relations_used(f))
            CHECK(allowed_rels.count(r));
        for (const auto & [s, d] : locality_used(f)) {
            CHECK(s == 0);
            CHECK(d == 1);
        }
    }
}

TEST_CASE("counts grow with the depth and width budgets")
{
    Fragment frag;
    frag.cls = FragmentClass::PrimitivePositive;
    frag.max_quantifier_depth = 0;
    frag.max_connective_width = 1;
    frag.free_variables = {{"x", 0}};
    frag.allowed_relations = {"P0"};
    frag.allowed_locality = {"d1"};

    auto count = [&](int depth, int width) {
        auto f = frag;
        f.max_quantifier_depth = depth;
        f.max_connective_width = width;
        return enumerate_fragment(sig(), f).size();
    };

    CHECK(count(0, 1) < count(1, 1));
    CHECK(count(1, 1) < count(2, 1));
    CHECK(count(0, 1) < count(0, 2));
    CHECK(count(0, 2) <= count(0, 3));
    CHECK(count(1, 1) < count(1, 2));
}

TEST_CASE("containment checks shape, measures, and whitelists")
{
    Fragment frag;
    frag.cls = FragmentClass::Positive;
    frag.max_quantifier_depth = 1;
    frag.max_connective_width = 2;
    frag.free_variables = {{"x", 0}};
    frag.allowed_relations = {"P0", "Q0"};
    frag.allowed_locality = {"d1"};

    auto p = atom(rel("P0"), {x()});
    auto q = atom(rel("Q0"), {x()});
    CHECK(fragment_contains(sig(), frag, p));
    CHECK(fragment_contains(sig(), frag, exists("y", 0, atom(rel("Q0"), {make_var("y", 0)}))));

    // deeper connective nesting than the enumerator emits still fits the measures
    auto braided = conj({disj({conj({p, q}), p}), q});
    CHECK(connective_width(braided) == 2);
    CHECK(fragment_contains(sig(), frag, braided));

    CHECK(! fragment_contains(sig(), frag, neg(p)));                      // not positive
    CHECK(! fragment_contains(sig(), frag, conj({p, q, disj({p, q})}))); // width 3
    auto deep = exists("y", 0, exists("z", 0,
        conj({atom(rel("P0"), {make_var("y", 0)}), atom(rel("Q0"), {make_var("z", 0)})})));
    CHECK(! fragment_contains(sig(), frag, deep));                        // depth 2
    CHECK(! fragment_contains(sig(), frag, atom(rel("P0"), {make_var("y", 0)}))); // foreign free var
    CHECK(! fragment_contains(sig(), frag, atom(rel("P1"), {x()})));      // relation not allowed
    CHECK(! fragment_contains(sig(), frag, loc_atom(0, 2, x(), x())));    // d2 not allowed
    CHECK(fragment_contains(sig(), frag, loc_atom(0, 0, x(), x())));      // identity is exempt
    CHECK(fragment_contains(sig(), frag, local_exists("y", 0, 1, x(),
        atom(rel("P0"), {make_var("y", 0)}))));
    CHECK(! fragment_contains(sig(), frag, local_exists("y", 0, 2, x(),
        atom(rel("P0"), {make_var("y", 0)}))));
}

TEST_CASE("the body width budget constrains only quantified scopes")
{
    Fragment frag;
    frag.cls = FragmentClass::Positive;
    frag.max_quantifier_depth = 1;
    frag.max_connective_width = 2;
    frag.max_body_width = 0;
    frag.free_variables = {{"x", 0}};
    frag.allowed_relations = {"P0", "Q0"};

    auto ex = [&](const std::string & r) {
        return exists("y", 0, atom(rel(r), {make_var("y", 0)}));
    };
    CHECK(fragment_contains(sig(), frag, ex("P0")));
    CHECK(fragment_contains(sig(), frag, conj({ex("P0"), ex("Q0")})));
    CHECK(! fragment_contains(sig(), frag, exists("y", 0,
        conj({atom(rel("P0"), {make_var("y", 0)}), atom(rel("Q0"), {make_var("y", 0)})}))));

    // the enumerator respects the same cut
    for (const auto & f : enumerate_fragment(sig(), frag))
        CHECK(fragment_contains(sig(), frag, f));
}

TEST_CASE("symbol usage reports cover atoms and binders")
{
    auto f = conj({
        atom(rel("P0"), {x()}),
        local_exists("y", 0, 2, x(),
            conj({atom(rel("Q1"), {make_var("y", 0)}), loc_atom(0, 1, x(), make_var("y", 0))})),
    });

    CHECK(relations_used(f) == std::set<int>{rel("P0"), rel("Q1")});
    CHECK(locality_used(f) == std::set<std::pair<int, int>>{{0, 1}, {0, 2}});
}

TEST_CASE("class names round-trip")
{
    for (auto cls : {FragmentClass::Positive, FragmentClass::PrimitivePositive,
             FragmentClass::LocalPositive, FragmentClass::LocalPrimitivePositive,
             FragmentClass::Local, FragmentClass::QuantifierFree})
        CHECK(fragment_class_from_string(to_string(cls)) == cls);
    CHECK_THROWS_AS(fragment_class_from_string("negative"), BadInput);
}

TEST_CASE("bad fragment descriptions are rejected")
{
    Fragment frag;
    frag.cls = FragmentClass::Positive;

    auto bad_depth = frag;
    bad_depth.max_quantifier_depth = -1;
    CHECK_THROWS_AS(enumerate_fragment(sig(), bad_depth), BadInput);

    auto bad_width = frag;
    bad_width.max_connective_width = 0;
    CHECK_THROWS_AS(enumerate_fragment(sig(), bad_width), BadInput);

    auto bad_rel = frag;
    bad_rel.allowed_relations = {"R9"};
    CHECK_THROWS_AS(enumerate_fragment(sig(), bad_rel), UnknownSymbol);

    auto bad_loc = frag;
    bad_loc.allowed_locality = {"zz"};
    CHECK_THROWS_AS(enumerate_fragment(sig(), bad_loc), UnknownSymbol);

    auto bad_var = frag;
    bad_var.free_variables = {{"x", 7}};
    CHECK_THROWS_AS(enumerate_fragment(sig(), bad_var), BadInput);
}

TEST_CASE("locality whitelists resolve per sort in many-sorted signatures")
{
    auto two = std::make_shared<SignatureSpec>();
    two->sorts = {"left", "right"};
    two->relations = {{"P", {0}}, {"R", {1}}};
    two->locality = {LocalityMonoid::saturating_chain(2), LocalityMonoid::saturating_chain(1, "e")};
    require_valid(*two);

    Fragment frag;
    frag.cls = FragmentClass::Positive;
    frag.max_quantifier_depth = 1;
    frag.max_connective_width = 1;
    frag.allowed_locality = {"d1"}; // absent from the right sort's monoid

    // true, three bodies over the left sort, two over the right
    auto got = enumerate_fragment(*two, frag);
    CHECK(got.size() == 7);
    for (const auto & f : got) {
        for (const auto & [s, d] : locality_used(f)) {
            CHECK(s == 0);
            CHECK(d == 1);
        }
        CHECK(fragment_contains(*two, frag, f));
    }
}
