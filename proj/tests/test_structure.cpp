#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <locus/corpus.hpp>
#include <locus/structure.hpp>

#include <memory>
#include <set>
#include <string>
#include <vector>

using namespace locus;

namespace
{
    // A2 pushes the identity diagonal up to every level, so handmade
    // structures start from the reflexive closure.
    auto reflexive(FiniteStructure m) -> FiniteStructure
    {
        for (int s = 0; s < int(m.sig->sorts.size()); ++s)
            for (int d = 0; d < m.sig->locality[std::size_t(s)].size(); ++d)
                for (int a = 0; a < m.size(s); ++a)
                    m.set_loc(s, d, a, a);
        return m;
    }

    // Two elements, chain d0..d2, no relations: a blank canvas for axiom
    // mutations.
    auto blank_pair() -> FiniteStructure
    {
        auto sig = std::make_shared<SignatureSpec>();
        sig->sorts = {"elem"};
        sig->locality = {LocalityMonoid::saturating_chain(2)};
        return reflexive(make_structure(sig, {{"a", "b"}}));
    }

    // Relate a and b at every level from `from` upwards, both directions.
    auto relate_up(FiniteStructure & m, int a, int b, int from) -> void
    {
        for (int d = from; d < m.sig->locality[0].size(); ++d) {
            m.set_loc(0, d, a, b);
            m.set_loc(0, d, b, a);
        }
    }

    auto names_of(const FiniteStructure & m, int sort, const std::vector<int> & elems)
        -> std::set<std::string>
    {
        std::set<std::string> out;
        for (int e : elems)
            out.insert(m.universe[std::size_t(sort)][std::size_t(e)]);
        return out;
    }
}

TEST_CASE("fresh structures carry the forced identity diagonal and nothing else")
{
    auto sig = std::make_shared<SignatureSpec>();
    sig->sorts = {"elem"};
    sig->locality = {LocalityMonoid::saturating_chain(2)};
    auto m = make_structure(sig, {{"a", "b"}});
    CHECK(m.size(0) == 2);
    CHECK(m.total_size() == 2);
    CHECK(m.loc_has(0, 0, 0, 0));
    CHECK(m.loc_has(0, 0, 1, 1));
    CHECK(! m.loc_has(0, 0, 0, 1));
    CHECK(! m.loc_has(0, 1, 0, 1));
    CHECK(! m.loc_has(0, 1, 1, 1)); // levels above the identity start empty
    CHECK(m.element_index(0, "b") == 1);
    CHECK_THROWS_AS(m.element_index(0, "c"), UnknownSymbol);
}

TEST_CASE("corpus structures pass every locality axiom")
{
    for (const char * id : {"Z(5)", "pointedZ(4)", "hamming(4)", "hammingComp(5,2,00000)",
             "tree(4)", "zdist(5)", "C(2)"}) {
        auto item = build_corpus(id);
        const auto & m = std::get<FiniteStructure>(item);
        auto rep = check_locality_axioms(m);
        INFO(id);
        CHECK(rep.all());
        CHECK(is_local(m));
    }
}

TEST_CASE("axiom violations are pinned with re-checkable witnesses")
{
    SUBCASE("A1 symmetry")
    {
        auto m = blank_pair();
        m.set_loc(0, 1, 0, 1);
        m.set_loc(0, 2, 0, 1);
        m.set_loc(0, 2, 1, 0); // keep A2 upward closure one-sided
        auto rep = check_locality_axioms(m);
        CHECK(! rep.pass(0));
        auto w = rep.first_failure();
        REQUIRE(w);
        CHECK(w->axiom == "A1");
        REQUIRE(w->elems.size() == 2);
        REQUIRE(w->locality_elems.size() == 1);
        int d = w->locality_elems[0];
        CHECK(m.loc_has(0, d, w->elems[0], w->elems[1]));
        CHECK(! m.loc_has(0, d, w->elems[1], w->elems[0]));
    }

    SUBCASE("A2 order monotonicity")
    {
        auto m = blank_pair();
        m.set_loc(0, 1, 0, 1);
        m.set_loc(0, 1, 1, 0); // related at d1 but not above
        auto rep = check_locality_axioms(m);
        CHECK(rep.pass(0));
        CHECK(! rep.pass(1));
        auto w = rep.first_failure();
        REQUIRE(w);
        CHECK(w->axiom == "A2");
        REQUIRE(w->locality_elems.size() == 2);
        CHECK(m.sig->locality[0].below(w->locality_elems[0], w->locality_elems[1]));
    }

    SUBCASE("A3 composition")
    {
        auto sig = std::make_shared<SignatureSpec>();
        sig->sorts = {"elem"};
        sig->locality = {LocalityMonoid::saturating_chain(4)};
        auto m = reflexive(make_structure(sig, {{"a", "b", "c"}}));
        relate_up(m, 0, 1, 1); // a-b at d1
        relate_up(m, 1, 2, 1); // b-c at d1, but a-c never related
        auto rep = check_locality_axioms(m);
        CHECK(rep.pass(0));
        CHECK(rep.pass(1));
        CHECK(! rep.pass(2));
        auto w = rep.first_failure();
        REQUIRE(w);
        CHECK(w->axiom == "A3");
        REQUIRE(w->elems.size() == 3);
        REQUIRE(w->locality_elems.size() == 3);
        // the composed level fails to relate the outer pair
        CHECK(! m.loc_has(0, w->locality_elems[2], w->elems[0], w->elems[2]));
    }

    SUBCASE("A4 constant bounds")
    {
        auto base = corpus_pointed_z(3);
        auto expanded = expand_with_constants(*base.sig, {{"c", 0, {{"zero", 2}}}});
        auto sig = std::make_shared<SignatureSpec>(expanded.spec);
        auto m = base;
        m.sig = sig;
        m.constants.push_back(m.element_index(0, "3")); // distance 3 > declared d2
        auto rep = check_locality_axioms(m);
        CHECK(rep.pass(0));
        CHECK(rep.pass(1));
        CHECK(rep.pass(2));
        CHECK(! rep.pass(3));
        auto w = rep.first_failure();
        REQUIRE(w);
        CHECK(w->axiom == "A4");
        CHECK(w->constants.size() == 2);

        // placing c within the declared bound repairs A4
        m.constants.back() = m.element_index(0, "-2");
        CHECK(check_locality_axioms(m).all());
    }

    SUBCASE("A5 totality")
    {
        auto m = blank_pair(); // a and b never related
        auto rep = check_locality_axioms(m);
        CHECK(rep.pass(0));
        CHECK(rep.pass(1));
        CHECK(rep.pass(2));
        CHECK(rep.pass(3));
        CHECK(! rep.pass(4));
        auto w = rep.first_failure();
        REQUIRE(w);
        CHECK(w->axiom == "A5");
        CHECK(! is_local(m));

        relate_up(m, 0, 1, 2);
        CHECK(check_locality_axioms(m).all());
        CHECK(is_local(m));
    }
}

TEST_CASE("balls collect exactly the elements within the level")
{
    auto z = corpus_z(4);
    int centre = z.element_index(0, "0");
    CHECK(names_of(z, 0, ball(z, 0, 0, centre)) == std::set<std::string>{"0"});
    CHECK(names_of(z, 0, ball(z, 0, 2, centre)) ==
        std::set<std::string>{"-2", "-1", "0", "1", "2"});
    CHECK(int(ball(z, 0, 8, centre).size()) == z.size(0));

    int edge = z.element_index(0, "-4");
    CHECK(names_of(z, 0, ball(z, 0, 1, edge)) == std::set<std::string>{"-4", "-3"});
}

TEST_CASE("min_locality reads the least relating level")
{
    auto z = corpus_z(4);
    int a = z.element_index(0, "-1");
    int b = z.element_index(0, "2");
    auto d = z.min_locality(0, a, b);
    REQUIRE(d);
    CHECK(*d == 3);
    CHECK(z.min_locality(0, a, a) == 0);

    auto m = blank_pair();
    CHECK(! m.min_locality(0, 0, 1));
}

TEST_CASE("the component universe is the union of the base point's balls")
{
    // two islands: {a, b} related, {c} apart
    auto sig = std::make_shared<SignatureSpec>();
    sig->sorts = {"elem"};
    sig->locality = {LocalityMonoid::saturating_chain(2)};
    auto m = reflexive(make_structure(sig, {{"a", "b", "c"}}));
    relate_up(m, 0, 1, 1);

    auto at_a = component_universe(m, {0});
    CHECK(names_of(m, 0, at_a[0]) == std::set<std::string>{"a", "b"});
    auto at_c = component_universe(m, {2});
    CHECK(names_of(m, 0, at_c[0]) == std::set<std::string>{"c"});
}

TEST_CASE("induced substructures restrict everything and protect constants")
{
    auto z = corpus_z(3); // universe -3..3, P0..P4, Q0..Q4
    std::vector<int> keep;
    for (const char * name : {"-1", "0", "1", "2"})
        keep.push_back(z.element_index(0, name));

    auto sub = induced_substructure(z, {keep});
    CHECK(sub.structure.size(0) == 4);
    CHECK(sub.embedding[0] == keep);
    // P1 = {1, 2, 3} in z restricts to {1, 2}
    int p1 = *z.sig->relation_index("P1");
    CHECK(sub.structure.relations[std::size_t(p1)].size() == 2);
    // locality restricts with it
    int i1 = sub.structure.element_index(0, "-1");
    int i2 = sub.structure.element_index(0, "2");
    CHECK(sub.structure.min_locality(0, i1, i2) == 3);
    CHECK(check_locality_axioms(sub.structure).all());

    CHECK_THROWS_AS(induced_substructure(z, {std::vector<int>{}}), EmptySort);

    auto pz = corpus_pointed_z(3);
    std::vector<int> off_centre = {pz.element_index(0, "2"), pz.element_index(0, "3")};
    CHECK_THROWS_AS(induced_substructure(pz, {off_centre}), ConstantsNotContained);
}

TEST_CASE("local components cut out the island around the base point")
{
    auto sig = std::make_shared<SignatureSpec>();
    sig->sorts = {"elem"};
    sig->locality = {LocalityMonoid::saturating_chain(2)};
    auto m = reflexive(make_structure(sig, {{"a", "b", "c", "d"}}));
    relate_up(m, 0, 1, 1);
    relate_up(m, 2, 3, 1);

    auto comp = local_component(m, {0});
    CHECK(names_of(m, 0, comp.embedding[0]) == std::set<std::string>{"a", "b"});
    CHECK(check_locality_axioms(comp.structure).all());
    CHECK(is_local(comp.structure)); // components are local even when m is not

    // a constant stranded on the other island blocks the cut
    auto csig = std::make_shared<SignatureSpec>(*sig);
    csig->constants = {{"k", 0}};
    csig->set_bound(0, 0, 0);
    auto with_const = m;
    with_const.sig = csig;
    with_const.constants = {2};
    CHECK_THROWS_AS(local_component(with_const, {0}), ConstantOutsideComponent);
}

TEST_CASE("local components refuse structures breaking A1..A4")
{
    auto m = blank_pair();
    m.set_loc(0, 1, 0, 1); // asymmetric
    CHECK_THROWS_AS(local_component(m, {0}), NotLocal);
}

TEST_CASE("covering balls prefer low centres and least levels")
{
    auto c3 = corpus_c(3); // interval -3..3 inside the ambient chain d0..d8
    auto cover = covering_ball(c3, 0);
    REQUIRE(cover);
    CHECK(cover->first == 0);  // centre "-3"
    CHECK(cover->second == 6); // the far end sits at distance 6

    auto sig = std::make_shared<SignatureSpec>();
    sig->sorts = {"elem"};
    sig->locality = {LocalityMonoid::saturating_chain(2)};
    auto split = reflexive(make_structure(sig, {{"a", "b"}}));
    CHECK(! covering_ball(split, 0));
}
