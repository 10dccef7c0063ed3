#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <locus/corpus.hpp>
#include <locus/eval.hpp>
#include <locus/morphism.hpp>

#include <algorithm>
#include <memory>
#include <set>
#include <string>
#include <vector>

using namespace locus;

namespace
{
    auto reflexive(FiniteStructure m) -> FiniteStructure
    {
        for (int s = 0; s < int(m.sig->sorts.size()); ++s)
            for (int d = 0; d < m.sig->locality[std::size_t(s)].size(); ++d)
                for (int a = 0; a < m.size(s); ++a)
                    m.set_loc(s, d, a, a);
        return m;
    }

    auto relate_up(FiniteStructure & m, int a, int b, int from) -> void
    {
        for (int d = from; d < m.sig->locality[0].size(); ++d) {
            m.set_loc(0, d, a, b);
            m.set_loc(0, d, b, a);
        }
    }

    auto chain_sig(int n, std::vector<RelationDecl> rels) -> std::shared_ptr<SignatureSpec>
    {
        auto sig = std::make_shared<SignatureSpec>();
        sig->sorts = {"elem"};
        sig->relations = std::move(rels);
        sig->locality = {LocalityMonoid::saturating_chain(n)};
        require_valid(*sig);
        return sig;
    }

    // an edge at d1, a third element only d2-close: five endomorphism images
    // for a d1-pair
    auto bare_pair() -> FiniteStructure
    {
        static auto sig = chain_sig(2, {});
        auto m = reflexive(make_structure(sig, {{"a0", "a1"}}));
        relate_up(m, 0, 1, 1);
        return m;
    }

    auto bare_triple() -> FiniteStructure
    {
        static auto sig = chain_sig(2, {});
        auto m = reflexive(make_structure(sig, {{"b0", "b1", "b2"}}));
        relate_up(m, 0, 1, 1);
        relate_up(m, 0, 2, 2);
        relate_up(m, 1, 2, 2);
        return m;
    }

    // exhaustive one-sorted map enumeration, validated per map
    auto all_homs_brute(const FiniteStructure & a, const FiniteStructure & b)
        -> std::vector<Homomorphism>
    {
        std::vector<Homomorphism> out;
        std::vector<int> map(std::size_t(a.size(0)), 0);
        while (true) {
            Homomorphism h{{map}};
            if (is_homomorphism(a, b, h))
                out.push_back(h);
            std::size_t k = 0;
            for (; k < map.size(); ++k) {
                if (++map[k] < b.size(0))
                    break;
                map[k] = 0;
            }
            if (k == map.size())
                break;
        }
        return out;
    }

    auto as_set(const std::vector<Homomorphism> & hs) -> std::set<std::vector<std::vector<int>>>
    {
        std::set<std::vector<std::vector<int>>> out;
        for (const auto & h : hs)
            out.insert(h.map);
        return out;
    }
}

TEST_CASE("the backtracking search agrees with brute-force enumeration")
{
    auto a = bare_pair();
    auto b = bare_triple();

    auto found = find_homomorphisms(a, b);
    CHECK(found.size() == 5); // three collapses onto a point, the d1 edge both ways
    CHECK(as_set(found) == as_set(all_homs_brute(a, b)));
    for (const auto & h : found)
        CHECK(is_homomorphism(a, b, h));

    // not every map qualifies: the d1 edge cannot stretch to a d2-only pair
    CHECK(! is_homomorphism(a, b, Homomorphism{{{0, 2}}}));
    CHECK(all_homs_brute(a, b).size() == 5);
}

TEST_CASE("search options prune the result set")
{
    auto a = bare_pair();
    auto b = bare_triple();

    HomOptions injective;
    injective.injective = true;
    CHECK(find_homomorphisms(a, b, injective).size() == 2);

    HomOptions limited;
    limited.limit = 2;
    CHECK(find_homomorphisms(a, b, limited).size() == 2);

    HomOptions pinned;
    pinned.fixed[{0, 0}] = 2; // a0 onto the d2-only element
    auto stranded = find_homomorphisms(a, b, pinned);
    REQUIRE(stranded.size() == 1);
    CHECK(stranded[0].map == std::vector<std::vector<int>>{{2, 2}});

    pinned.fixed[{0, 0}] = 1;
    CHECK(find_homomorphisms(a, b, pinned).size() == 2);
}

TEST_CASE("relations, constants and signatures constrain the search")
{
    // within the window, the endpoint relations pin every element
    auto z = corpus_z(2);
    auto rigid = find_homomorphisms(z, z);
    REQUIRE(rigid.size() == 1);
    CHECK(rigid[0] == identity_homomorphism(z));

    auto pz = corpus_pointed_z(2);
    auto pointed = find_homomorphisms(pz, pz);
    REQUIRE(pointed.size() == 1);
    CHECK(pointed[0] == identity_homomorphism(pz));

    // no map can satisfy an empty target relation
    CHECK(find_homomorphisms(z, corpus_i(2)).empty());
    CHECK(find_homomorphisms(corpus_i(2), z).empty());

    CHECK_THROWS_AS(find_homomorphisms(corpus_z(1), corpus_z(2)), SignatureMismatch);
}

TEST_CASE("composition and identities behave like a category")
{
    auto a = bare_pair();
    auto b = bare_triple();
    auto homs = find_homomorphisms(a, b);
    REQUIRE(! homs.empty());

    for (const auto & h : homs) {
        CHECK(compose(identity_homomorphism(a), h) == h);
        CHECK(compose(h, identity_homomorphism(b)) == h);
        for (const auto & g : find_homomorphisms(b, b)) {
            auto gh = compose(h, g);
            CHECK(is_homomorphism(a, b, gh));
        }
    }
}

TEST_CASE("isomorphism search inverts its candidates")
{
    auto z = corpus_z(2);
    auto iso = are_isomorphic(z, z);
    REQUIRE(iso.has_value());
    CHECK(*iso == identity_homomorphism(z));

    // the same edge-plus-point shape at permuted indices
    static auto sig = chain_sig(2, {});
    auto rotated = reflexive(make_structure(sig, {{"c0", "c1", "c2"}}));
    relate_up(rotated, 1, 2, 1);
    relate_up(rotated, 0, 1, 2);
    relate_up(rotated, 0, 2, 2);
    auto spin = are_isomorphic(bare_triple(), rotated);
    REQUIRE(spin.has_value());
    CHECK(is_homomorphism(bare_triple(), rotated, *spin));
    CHECK((*spin)(0, 2) == 0); // the isolated points match up

    // a triangle has the same size but more adjacency
    auto triangle = reflexive(make_structure(sig, {{"t0", "t1", "t2"}}));
    relate_up(triangle, 0, 1, 1);
    relate_up(triangle, 0, 2, 1);
    relate_up(triangle, 1, 2, 1);
    CHECK(! are_isomorphic(bare_triple(), triangle).has_value());

    // bit predicates pin each coordinate, so shifted components are
    // positively alike yet not isomorphic
    auto left = corpus_hamming_component(3, 1, "000");
    auto right = corpus_hamming_component(3, 1, "111");
    CHECK(! are_isomorphic(left, right).has_value());

    CHECK(! are_isomorphic(bare_pair(), bare_triple()).has_value());
    CHECK(! are_isomorphic(z, corpus_i(2)).has_value());
}

TEST_CASE("a saturated point absorbs its neighbours")
{
    auto sig = chain_sig(1, {{"P", {0}}});
    auto a = reflexive(make_structure(sig, {{"a"}}));
    a.relations[0].insert({0});
    auto b = reflexive(make_structure(sig, {{"b0", "b1"}}));
    b.relations[0].insert({0});
    b.relations[0].insert({1});
    relate_up(b, 0, 1, 1);

    auto homs = find_homomorphisms(a, b);
    REQUIRE(homs.size() == 2);
    for (const auto & h : homs) {
        auto via_retraction = is_positive_embedding(a, b, h, EmbeddingMode::Retraction);
        REQUIRE(via_retraction.is_embedding);
        REQUIRE(via_retraction.retraction.has_value());
        CHECK(is_homomorphism(b, a, *via_retraction.retraction));
        CHECK(compose(h, *via_retraction.retraction) == identity_homomorphism(a));

        auto via_diagram = is_positive_embedding(a, b, h, EmbeddingMode::DiagramFormula);
        CHECK(via_diagram.is_embedding);
        CHECK(via_diagram.diagram != nullptr);

        Fragment frag;
        frag.cls = FragmentClass::Positive;
        frag.max_quantifier_depth = 1;
        frag.max_connective_width = 2;
        frag.max_body_width = 1; // keeps the sweep's layer blowup in check
        frag.free_variables = {{"x", 0}};
        auto via_sweep = is_positive_embedding(a, b, h, EmbeddingMode::FragmentSweep, &frag);
        CHECK(via_sweep.is_embedding);
    }

    auto pc = check_locally_positively_closed(a, {b});
    CHECK(pc.closed);
    CHECK(pc.homs_checked == 2);
}

TEST_CASE("a window inclusion reflects no witness for the larger endpoint")
{
    auto small = corpus_c(1);
    auto large = corpus_c(2);
    auto homs = find_homomorphisms(small, large);
    REQUIRE(homs.size() == 1);
    const auto & inclusion = homs[0];
    CHECK(inclusion.map == std::vector<std::vector<int>>{{1, 2, 3}});

    CHECK(! is_positive_embedding(small, large, inclusion, EmbeddingMode::Retraction).is_embedding);
    CHECK(! is_positive_embedding(small, large, inclusion, EmbeddingMode::DiagramFormula).is_embedding);

    Fragment frag;
    frag.cls = FragmentClass::PrimitivePositive;
    frag.max_quantifier_depth = 1;
    frag.max_connective_width = 1;
    frag.free_variables = {{"x", 0}};
    frag.allowed_relations = {"P2"};
    frag.allowed_locality = {"d0"};
    auto swept = is_positive_embedding(small, large, inclusion, EmbeddingMode::FragmentSweep, &frag);
    CHECK(! swept.is_embedding);
    REQUIRE(swept.failing_formula != nullptr);
    CHECK(print(*small.sig, swept.failing_formula) == "exists x0. P2(x0)");
    CHECK(swept.failing_tuple == std::vector<int>{0});

    auto pc = check_locally_positively_closed(small, {large});
    CHECK(! pc.closed);
    REQUIRE(pc.counterexample.has_value());
    CHECK(pc.counterexample->member == 0);
    CHECK(pc.counterexample->hom == inclusion);
    CHECK(pc.homs_checked == 1);
}

TEST_CASE("merging two points leaves no way back")
{
    auto pair = bare_pair();
    static auto sig = chain_sig(2, {});
    auto point = reflexive(make_structure(sig, {{"b"}}));

    auto homs = find_homomorphisms(pair, point);
    REQUIRE(homs.size() == 1);
    auto collapse = homs[0];

    CHECK(! is_positive_embedding(pair, point, collapse, EmbeddingMode::Retraction).is_embedding);
    auto via_diagram = is_positive_embedding(pair, point, collapse, EmbeddingMode::DiagramFormula);
    CHECK(! via_diagram.is_embedding);

    // the diagram records the merge as an equality between both preimages
    auto [formula, assignment] = reflection_diagram(pair, point, collapse);
    CHECK(assignment.size() == 2);
    CHECK(! evaluate(pair, formula, assignment));
}

TEST_CASE("the two closure routes agree hom by hom")
{
    auto z = corpus_z(2);
    std::vector<std::pair<FiniteStructure, FiniteStructure>> cases;
    cases.emplace_back(corpus_c(1), corpus_c(2));
    cases.emplace_back(bare_pair(), bare_triple());
    cases.emplace_back(z, z);

    for (const auto & [a, b] : cases)
        for (const auto & h : find_homomorphisms(a, b)) {
            auto one = is_positive_embedding(a, b, h, EmbeddingMode::Retraction).is_embedding;
            auto two = is_positive_embedding(a, b, h, EmbeddingMode::DiagramFormula).is_embedding;
            CHECK(one == two);
        }
}

TEST_CASE("pointwise membership of the Z family is closed for its own catalogue")
{
    std::vector<FiniteStructure> catalogue;
    catalogue.push_back(corpus_z(2));
    catalogue.push_back(corpus_i(2));
    catalogue.push_back(corpus_j(2));

    for (const auto & m : catalogue) {
        auto report = check_locally_positively_closed(m, catalogue);
        CHECK(report.closed);
        CHECK(report.homs_checked == 1); // only the identity ever arrives
    }
}

TEST_CASE("isolation certificates name definable singletons")
{
    auto z = corpus_z(2);
    Fragment frag;
    frag.cls = FragmentClass::Positive;
    frag.max_quantifier_depth = 0;
    frag.max_connective_width = 2;
    frag.free_variables = {{"x", 0}};

    auto top_cert = isolation_certificate(z, 0, z.element_index(0, "2"), frag);
    REQUIRE(top_cert.has_value());
    CHECK(print(*z.sig, *top_cert) == "P2(x)");

    auto mid_cert = isolation_certificate(z, 0, z.element_index(0, "0"), frag);
    REQUIRE(mid_cert.has_value());
    CHECK(print(*z.sig, *mid_cert) == "P0(x) & Q0(x)");

    // every positive set containing 1 also contains 2
    CHECK(! isolation_certificate(z, 0, z.element_index(0, "1"), frag).has_value());

    auto pz = corpus_pointed_z(2);
    auto named = isolation_certificate(pz, 0, pz.element_index(0, "0"), frag);
    REQUIRE(named.has_value());
    CHECK(print(*pz.sig, *named) == "x = zero");

    auto widened = frag;
    widened.free_variables = {{"x", 0}, {"y", 0}};
    CHECK_THROWS_AS(isolation_certificate(z, 0, 0, widened), BadInput);
    auto negative = frag;
    negative.cls = FragmentClass::QuantifierFree;
    CHECK_THROWS_AS(isolation_certificate(z, 0, 0, negative), ClassMismatch);
}
