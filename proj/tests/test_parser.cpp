#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <locus/corpus.hpp>
#include <locus/fragment.hpp>
#include <locus/parser.hpp>

#include <map>
#include <memory>
#include <string>
#include <vector>

using namespace locus;

namespace
{
    auto sig() -> const SignatureSpec &
    {
        static auto m = corpus_z(1);
        return *m.sig;
    }

    // two sorts with disjoint locality vocabularies and a cross-sort relation
    auto two() -> const SignatureSpec &
    {
        static auto made = [] {
            SignatureSpec s;
            s.sorts = {"left", "right"};
            s.relations = {{"P", {0}}, {"R", {1}}, {"E", {0, 1}}};
            s.constants = {{"c", 1}};
            s.locality = {LocalityMonoid::saturating_chain(2), LocalityMonoid::saturating_chain(1, "e")};
            s.set_bound(0, 0, 0);
            require_valid(s);
            return s;
        }();
        return made;
    }

    auto roundtrip(const SignatureSpec & s, const std::string & text,
        const std::map<std::string, int> & free_sorts = {}) -> std::string
    {
        return print(s, parse(s, text, free_sorts));
    }
}

TEST_CASE("printing and reparsing is the identity on enumerated fragments")
{
    Fragment frag;
    frag.max_quantifier_depth = 1;
    frag.max_connective_width = 2;
    frag.max_body_width = 1;
    frag.free_variables = {{"x", 0}};
    frag.allowed_relations = {"P0", "Q1"};
    frag.allowed_locality = {"d1"};

    for (auto cls : {FragmentClass::Positive, FragmentClass::PrimitivePositive,
             FragmentClass::Local, FragmentClass::QuantifierFree}) {
        frag.cls = cls;
        for (const auto & f : enumerate_fragment(sig(), frag)) {
            auto text = print(sig(), f);
            CHECK(roundtrip(sig(), text) == text);
        }
    }
}

TEST_CASE("bound variables with primed names survive the trip")
{
    Fragment frag;
    frag.cls = FragmentClass::PrimitivePositive;
    frag.max_quantifier_depth = 1;
    frag.max_connective_width = 1;
    frag.free_variables = {{"x0", 0}};
    frag.allowed_relations = {"P0"};
    frag.allowed_locality = {"d1"};

    bool saw_primed = false;
    for (const auto & f : enumerate_fragment(sig(), frag)) {
        auto text = print(sig(), f);
        saw_primed = saw_primed || text.find("x0'") != std::string::npos;
        CHECK(roundtrip(sig(), text) == text);
    }
    CHECK(saw_primed);
}

TEST_CASE("constants parse as anchors and arguments")
{
    auto m = corpus_pointed_z(2);
    const auto & s = *m.sig;

    Fragment frag;
    frag.cls = FragmentClass::PrimitivePositive;
    frag.max_quantifier_depth = 1;
    frag.max_connective_width = 1;
    frag.allowed_relations = {"P0"};
    frag.allowed_locality = {"d1"};

    bool saw_anchor = false;
    for (const auto & f : enumerate_fragment(s, frag)) {
        auto text = print(s, f);
        saw_anchor = saw_anchor || text.find("in d1(zero)") != std::string::npos;
        CHECK(roundtrip(s, text) == text);
    }
    CHECK(saw_anchor);

    auto f = parse(s, "exists y in d1(zero). Q1(y) & zero = zero");
    CHECK(f->kind == Formula::Kind::LocalExists);
    CHECK(f->anchor.kind == Term::Kind::Constant);
    CHECK(free_variables(f).empty());
}

TEST_CASE("operator precedence and grouping")
{
    CHECK(roundtrip(sig(), "P0(x) & Q0(x) | P1(x)") == "P0(x) & Q0(x) | P1(x)");
    CHECK(roundtrip(sig(), "P0(x) & (Q0(x) | P1(x))") == "P0(x) & (Q0(x) | P1(x))");
    CHECK(roundtrip(sig(), "!P0(x) & Q0(x)") == "!P0(x) & Q0(x)");
    CHECK(roundtrip(sig(), "!(P0(x) | Q0(x))") == "!(P0(x) | Q0(x))");
    CHECK(roundtrip(sig(), "!x = y") == "!x = y");

    auto chained = parse(sig(), "P0(x) & Q0(x) & P1(x)");
    REQUIRE(chained->kind == Formula::Kind::And);
    CHECK(chained->children.size() == 3);
}

TEST_CASE("quantifier bodies extend as far right as possible")
{
    auto wide = parse(sig(), "exists y. P0(y) | Q0(x)");
    REQUIRE(wide->kind == Formula::Kind::Exists);
    CHECK(print(sig(), wide) == "exists y. P0(y) | Q0(x)");

    auto narrow = parse(sig(), "(exists y. P0(y)) | Q0(x)");
    REQUIRE(narrow->kind == Formula::Kind::Or);
    CHECK(print(sig(), narrow) == "(exists y. P0(y)) | Q0(x)");

    // whitespace is free-form
    CHECK(roundtrip(sig(), "  exists   y.P0( y )|Q0(x) ") == "exists y. P0(y) | Q0(x)");
}

TEST_CASE("one-sorted languages default every undetermined variable")
{
    auto f = parse(sig(), "x = y");
    auto fv = free_variables(f);
    REQUIRE(fv.size() == 2);
    CHECK(fv.at("x") == 0);
    CHECK(fv.at("y") == 0);

    CHECK(parse(sig(), "exists v. true")->var_sort == 0);
}

TEST_CASE("sorts propagate from relation profiles")
{
    auto f = parse(two(), "P(x) & E(x, y)");
    auto fv = free_variables(f);
    CHECK(fv.at("x") == 0);
    CHECK(fv.at("y") == 1);

    auto q = parse(two(), "exists v. R(v)");
    CHECK(q->var_sort == 1);
    auto annotated = parse(two(), "exists v : right . R(v)");
    CHECK(annotated->var_sort == 1);
    CHECK(print(two(), annotated) == "exists v:right. R(v)");
}

TEST_CASE("sorts propagate from locality vocabularies")
{
    auto f = parse(two(), "d1(x, y)");
    auto fv = free_variables(f);
    CHECK(fv.at("x") == 0);
    CHECK(fv.at("y") == 0);

    // the binder's sort follows the bound, and the anchor is constrained too
    auto q = parse(two(), "exists w in e1(z). R(w)");
    CHECK(q->var_sort == 1);
    CHECK(free_variables(q).at("z") == 1);

    // equality alone transfers a declared sort
    auto e = parse(two(), "x = y", {{"x", 1}});
    CHECK(free_variables(e).at("y") == 1);
}

TEST_CASE("sort conflicts and gaps are reported")
{
    CHECK_THROWS_AS(parse(two(), "x = y"), SortError);              // undetermined
    CHECK_THROWS_AS(parse(two(), "e1(x, y) & P(x)"), SortError);    // 1 vs 0
    CHECK_THROWS_AS(parse(two(), "R(x)", {{"x", 0}}), SortError);   // declaration conflicts
    CHECK_THROWS_AS(parse(two(), "P(c)"), SortError);               // constant at wrong sort
    CHECK_THROWS_AS(parse(two(), "e1(x, y) & d1(x, y)"), SortError);
    CHECK_THROWS_AS(parse(two(), "P(x, y)"), SortError);            // arity
    CHECK_THROWS_AS(parse(two(), "d1(x, y, z)"), SortError);
    CHECK_THROWS_AS(parse(two(), "exists v. v = v"), SortError);    // binder undetermined
}

TEST_CASE("unknown names are distinguished from sort errors")
{
    CHECK_THROWS_AS(parse(sig(), "Foo(x)"), UnknownSymbol);
    CHECK_THROWS_AS(parse(sig(), "exists y in qq(x). true"), UnknownSymbol);
}

TEST_CASE("malformed input is a syntax error")
{
    CHECK_THROWS_AS(parse(sig(), "P0(x"), SyntaxError);
    CHECK_THROWS_AS(parse(sig(), "P0(x) Q0(x)"), SyntaxError);
    CHECK_THROWS_AS(parse(sig(), "P0(x) &"), SyntaxError);
    CHECK_THROWS_AS(parse(sig(), "@"), SyntaxError);
    CHECK_THROWS_AS(parse(sig(), "exists . P0(x)"), SyntaxError);
    CHECK_THROWS_AS(parse(sig(), "forall y in d1(x). true"), SyntaxError);
    CHECK_THROWS_AS(parse(sig(), ""), SyntaxError);
}

TEST_CASE("the anchor may not be the variable it scopes")
{
    CHECK_THROWS_AS(parse(sig(), "exists y in d1(y). P0(y)"), AnchorContainsBoundVar);
}
