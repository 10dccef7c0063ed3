#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <locus/corpus.hpp>
#include <locus/eval.hpp>
#include <locus/normalize.hpp>

#include <functional>
#include <memory>
#include <string>
#include <vector>

using namespace locus;

namespace
{
    auto z3() -> const FiniteStructure &
    {
        static auto m = corpus_z(3);
        return m;
    }

    auto rel(const std::string & name) -> int
    {
        return *z3().sig->relation_index(name);
    }

    auto x() -> Term { return make_var("x", 0); }
    auto px(const std::string & r, const std::string & v) -> FormulaPtr
    {
        return atom(rel(r), {make_var(v, 0)});
    }

    auto contains_kind(const FormulaPtr & f, Formula::Kind kind) -> bool
    {
        if (f->kind == kind)
            return true;
        for (const auto & child : f->children)
            if (contains_kind(child, kind))
                return true;
        return false;
    }

    // leading unrestricted or bounded existential binders
    auto strip_prefix(FormulaPtr f) -> FormulaPtr
    {
        while (f->kind == Formula::Kind::Exists || f->kind == Formula::Kind::LocalExists)
            f = f->children[0];
        return f;
    }
}

TEST_CASE("desugaring renders bounded binders as guarded ones")
{
    const auto & sig = *z3().sig;
    auto f = local_exists("y", 0, 2, x(), px("Q1", "y"));
    auto g = desugar(sig, f);

    CHECK(print(sig, g) == "exists y. d2(y, x) & Q1(y)");
    CHECK(! contains_kind(g, Formula::Kind::LocalExists));
    CHECK(semantically_equivalent(z3(), f, g));

    auto nested = local_exists("y", 0, 1, x(),
        local_exists("z", 0, 1, make_var("y", 0), px("P1", "z")));
    auto flat = desugar(sig, nested);
    CHECK(! contains_kind(flat, Formula::Kind::LocalExists));
    CHECK(semantically_equivalent(z3(), nested, flat));

    // formulas without bounded binders come back unchanged
    auto plain = exists("y", 0, conj({px("P0", "y"), px("Q0", "x")}));
    CHECK(print(sig, desugar(sig, plain)) == print(sig, plain));
}

TEST_CASE("renaming apart separates clashing binders")
{
    const auto & sig = *z3().sig;

    auto twice = conj({exists("y", 0, px("P0", "y")), exists("y", 0, px("Q0", "y"))});
    CHECK(print(sig, rename_apart(twice)) == "(exists v0. P0(v0)) & (exists v1. Q0(v1))");

    auto shadow = exists("y", 0, conj({px("P0", "y"), exists("y", 0, px("Q0", "y"))}));
    CHECK(print(sig, rename_apart(shadow)) == "exists v0. P0(v0) & (exists v1. Q0(v1))");
    CHECK(semantically_equivalent(z3(), shadow, rename_apart(shadow)));

    // fresh names dodge everything already present, free or bound
    auto crowded = exists("v0", 0, conj({px("P0", "v0"), px("Q0", "v1")}));
    auto renamed = rename_apart(crowded);
    CHECK(renamed->var != "v0");
    CHECK(renamed->var != "v1");
    CHECK(free_variables(renamed).count("v1"));
    CHECK(semantically_equivalent(z3(), crowded, renamed));

    // anchors are occurrences, not binding positions
    auto anchored = exists("y", 0, local_exists("z", 0, 1, make_var("y", 0), px("P0", "z")));
    auto apart = rename_apart(anchored);
    CHECK(apart->children[0]->anchor.name == apart->var);
    CHECK(semantically_equivalent(z3(), anchored, apart));
}

TEST_CASE("positive formulas split into primitive positive disjuncts")
{
    auto f = disj({px("P0", "x"), conj({px("Q0", "x"), disj({px("P1", "x"), px("Q1", "x")})})});
    auto parts = to_pp_disjunction(*z3().sig, f);
    REQUIRE(parts.size() == 3);
    for (const auto & d : parts)
        CHECK(classify(d).primitive_positive);
    CHECK(semantically_equivalent(z3(), f, disj(parts)));

    // conjunction of disjunctions multiplies out
    auto grid = conj({disj({px("P0", "x"), px("P1", "x")}), disj({px("Q0", "x"), px("Q1", "x")})});
    CHECK(to_pp_disjunction(*z3().sig, grid).size() == 4);

    // binders distribute over the split
    auto under = exists("y", 0, disj({px("P0", "y"), px("Q0", "y")}));
    auto split = to_pp_disjunction(*z3().sig, under);
    REQUIRE(split.size() == 2);
    for (const auto & d : split) {
        CHECK(d->kind == Formula::Kind::Exists);
        CHECK(classify(d).primitive_positive);
    }
    CHECK(semantically_equivalent(z3(), under, disj(split)));

    auto local_under = local_exists("y", 0, 1, x(), disj({px("P0", "y"), px("Q0", "y")}));
    auto local_split = to_pp_disjunction(*z3().sig, local_under);
    REQUIRE(local_split.size() == 2);
    for (const auto & d : local_split)
        CHECK(d->kind == Formula::Kind::LocalExists);
    CHECK(semantically_equivalent(z3(), local_under, disj(local_split)));

    CHECK_THROWS_AS(to_pp_disjunction(*z3().sig, neg(px("P0", "x"))), ClassMismatch);
    CHECK_THROWS_AS(to_pp_disjunction(*z3().sig, forall("y", 0, px("P0", "y"))), ClassMismatch);
}

TEST_CASE("exists-prenex lifts every binder over a flat matrix")
{
    const auto & sig = *z3().sig;

    auto f = conj({exists("y", 0, px("P1", "y")), exists("z", 0, px("Q1", "z"))});
    auto p = to_exists_prenex(sig, f);
    CHECK(p->kind == Formula::Kind::Exists);
    auto matrix = strip_prefix(p);
    CHECK(quantifier_depth(matrix) == 0);
    CHECK(classify(p).positive);
    CHECK(semantically_equivalent(z3(), f, p));

    // bounded binders are desugared on the way
    auto bounded = local_exists("y", 0, 1, x(), px("P0", "y"));
    auto q = to_exists_prenex(sig, bounded);
    CHECK(! contains_kind(q, Formula::Kind::LocalExists));
    CHECK(q->kind == Formula::Kind::Exists);
    CHECK(semantically_equivalent(z3(), bounded, q));

    // pulling out of a disjunct relies on nonempty sorts, which finite
    // structures of this corpus always provide
    auto skew = disj({exists("y", 0, px("P0", "y")), px("Q0", "x")});
    CHECK(semantically_equivalent(z3(), skew, to_exists_prenex(sig, skew)));

    auto clash = disj({exists("y", 0, px("P0", "y")), exists("y", 0, px("Q0", "y"))});
    auto lifted = to_exists_prenex(sig, clash);
    CHECK(strip_prefix(lifted)->kind == Formula::Kind::Or);
    CHECK(semantically_equivalent(z3(), clash, lifted));

    CHECK_THROWS_AS(to_exists_prenex(sig, neg(px("P0", "x"))), ClassMismatch);
}

TEST_CASE("local prenex pulls bounded binders forward")
{
    const auto & sig = *z3().sig;

    auto f = conj({
        local_exists("y", 0, 1, x(), px("P0", "y")),
        local_exists("z", 0, 2, x(), px("Q0", "z")),
    });
    auto p = to_local_prenex(sig, f);
    CHECK(p->kind == Formula::Kind::LocalExists);
    CHECK(p->children[0]->kind == Formula::Kind::LocalExists);
    CHECK(strip_prefix(p)->kind == Formula::Kind::And);
    CHECK(classify(p).local);
    CHECK(semantically_equivalent(z3(), f, p));

    auto mixed = disj({local_exists("y", 0, 1, x(), px("P0", "y")), px("Q0", "x")});
    auto q = to_local_prenex(sig, mixed);
    CHECK(q->kind == Formula::Kind::LocalExists);
    CHECK(semantically_equivalent(z3(), mixed, q));

    // unrestricted binders disqualify the input, as do negations
    CHECK_THROWS_AS(to_local_prenex(sig, exists("y", 0, px("P0", "y"))), ClassMismatch);
    CHECK_THROWS_AS(to_local_prenex(sig, neg(px("P0", "x"))), ClassMismatch);
}

TEST_CASE("pulling a bounded binder out of a disjunction needs centred balls")
{
    // an empty d1 ball: the disjunction rescues the original formula but not
    // the prenex form, whose outer binder finds no witnesses
    auto sig = std::make_shared<SignatureSpec>();
    sig->sorts = {"elem"};
    sig->relations = {{"P", {0}}, {"Q", {0}}};
    sig->locality = {LocalityMonoid::saturating_chain(2)};
    auto m = make_structure(sig, {{"a", "b"}});
    m.relations[1].insert({0}); // Q(a)

    auto f = disj({
        local_exists("y", 0, 1, x(), atom(0, {make_var("y", 0)})),
        atom(1, {x()}),
    });
    auto p = to_local_prenex(*sig, f);

    CHECK(evaluate(m, f, {{"x", 0}}));
    CHECK(! evaluate(m, p, {{"x", 0}}));
    CHECK(! semantically_equivalent(m, f, p));

    // the corpus structures satisfy the locality axioms, so the forms agree
    CHECK(semantically_equivalent(z3(), f, to_local_prenex(*z3().sig, f)));
}

TEST_CASE("semantic equivalence joins the free variable sets")
{
    auto f = px("P0", "x");
    auto padded = conj({px("P0", "x"), equal(make_var("y", 0), make_var("y", 0))});
    CHECK(semantically_equivalent(z3(), f, padded));

    CHECK(! semantically_equivalent(z3(), px("P0", "x"), px("P0", "y")));
    CHECK(! semantically_equivalent(z3(), px("P0", "x"), px("P1", "x")));
    CHECK(semantically_equivalent(z3(), px("P3", "x"), px("P3", "x")));
}
