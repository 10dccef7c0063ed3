#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <locus/corpus.hpp>
#include <locus/errors.hpp>
#include <locus/limits.hpp>
#include <locus/parser.hpp>

#include <string>
#include <vector>

using namespace locus;

namespace
{
    auto hom1(std::vector<int> image) -> Homomorphism
    {
        Homomorphism h;
        h.map.push_back(std::move(image));
        return h;
    }

    auto shift_into(int shift, int from_size) -> Homomorphism
    {
        std::vector<int> image;
        for (int i = 0; i < from_size; ++i)
            image.push_back(i + shift);
        return hom1(std::move(image));
    }

    // C(1) -> C(2) -> C(3) under value-preserving inclusions
    auto window_chain() -> DirectSystem
    {
        DirectSystem sys;
        sys.structures = theory_c_family().catalogue;
        sys.maps[{1, 0}] = shift_into(1, 3);
        sys.maps[{2, 1}] = shift_into(1, 5);
        sys.maps[{2, 0}] = shift_into(2, 3);
        return sys;
    }

    auto pq_sig() -> std::shared_ptr<const SignatureSpec>
    {
        static auto shared = [] {
            SignatureSpec sig;
            sig.sorts = {"elem"};
            sig.relations = {{"P", {0}}, {"Q", {0}}};
            sig.locality = {LocalityMonoid::saturating_chain(2)};
            require_valid(sig);
            return std::make_shared<SignatureSpec>(std::move(sig));
        }();
        return shared;
    }

    // {a, b} with P = {a}, Q = {b}, the pair exactly d1 apart
    auto pq_pair() -> FiniteStructure
    {
        auto m = make_structure(pq_sig(), {{"a", "b"}});
        m.relations[0].insert({0});
        m.relations[1].insert({1});
        for (int e = 0; e < 3; ++e)
            for (int v = 0; v < 2; ++v)
                m.set_loc(0, e, v, v);
        for (int e = 1; e < 3; ++e) {
            m.set_loc(0, e, 0, 1);
            m.set_loc(0, e, 1, 0);
        }
        m.name = "pq-pair";
        return m;
    }

    // single point carrying both predicates
    auto pq_point() -> FiniteStructure
    {
        auto m = make_structure(pq_sig(), {{"c"}});
        m.relations[0].insert({0});
        m.relations[1].insert({0});
        for (int e = 0; e < 3; ++e)
            m.set_loc(0, e, 0, 0);
        m.name = "pq-point";
        return m;
    }

    // collapses the pair onto the point
    auto merge_system() -> DirectSystem
    {
        DirectSystem sys;
        sys.structures = {pq_pair(), pq_point()};
        sys.maps[{1, 0}] = hom1({0, 0});
        return sys;
    }

    auto message_of(const DirectSystem & sys) -> std::string
    {
        try {
            validate_direct_system(sys);
        } catch (const IncoherentSystem & e) {
            return e.what();
        }
        return "";
    }
}

TEST_CASE("direct system validation accepts the window chain")
{
    auto sys = window_chain();
    CHECK_NOTHROW(validate_direct_system(sys));

    // explicit identity self maps are allowed
    sys.maps[{1, 1}] = identity_homomorphism(sys.structures[1]);
    CHECK_NOTHROW(validate_direct_system(sys));
}

TEST_CASE("direct system validation names the first defect")
{
    CHECK_THROWS_AS(validate_direct_system({}), BadInput &);

    DirectSystem mixed;
    mixed.structures = {corpus_z(1), corpus_z(2)};
    CHECK_THROWS_AS(validate_direct_system(mixed), SignatureMismatch &);

    auto stray = window_chain();
    stray.maps[{0, 5}] = hom1({0});
    CHECK(message_of(stray).find("out of range") != std::string::npos);

    auto skewed = window_chain();
    skewed.maps[{0, 0}] = hom1({0, 0, 0});
    CHECK(message_of(skewed).find("self map is not the identity") != std::string::npos);

    // shifting by zero sends value 0 onto value -1 and loses P0
    auto crooked = window_chain();
    crooked.maps[{1, 0}] = shift_into(0, 3);
    CHECK(message_of(crooked).find("not a homomorphism") != std::string::npos);

    auto gappy = window_chain();
    gappy.maps.erase({2, 0});
    CHECK(message_of(gappy).find("missing composite map at (2, 1, 0)") != std::string::npos);

    // a bare point maps into the pair both ways, so the shortcut map can
    // disagree with the two-step route without failing the hom check
    auto bare = make_structure(pq_sig(), {{"p"}});
    for (int e = 0; e < 3; ++e)
        bare.set_loc(0, e, 0, 0);
    DirectSystem twisted;
    twisted.structures = {bare, pq_pair(), pq_pair()};
    twisted.maps[{1, 0}] = hom1({0});
    twisted.maps[{2, 1}] = hom1({0, 1});
    twisted.maps[{2, 0}] = hom1({1});
    CHECK(message_of(twisted).find("incoherent composite at (2, 1, 0)") != std::string::npos);

    DirectSystem undirected;
    undirected.structures = {corpus_c(1), corpus_c(1)};
    CHECK(message_of(undirected).find("no upper bound for pair at (0, 1)") != std::string::npos);

    CHECK_THROWS_AS(direct_limit(undirected), IncoherentSystem &);
}

TEST_CASE("the window chain limit is the widest window")
{
    auto sys = window_chain();
    auto lim = direct_limit(sys);

    CHECK(lim.limit.name == "limit(C(3))");
    CHECK(lim.limit.total_size() == 7);
    CHECK(lim.limit.universe[0] == sys.structures[2].universe[0]);
    REQUIRE(are_isomorphic(lim.limit, sys.structures[2]).has_value());

    REQUIRE(lim.coprojections.size() == 3);
    CHECK(lim.coprojections[0].map[0] == std::vector<int>{2, 3, 4});
    CHECK(lim.coprojections[1].map[0] == std::vector<int>{1, 2, 3, 4, 5});
    CHECK(lim.coprojections[2].map[0] == std::vector<int>{0, 1, 2, 3, 4, 5, 6});
    for (std::size_t i = 0; i < sys.structures.size(); ++i)
        CHECK(is_homomorphism(sys.structures[i], lim.limit, lim.coprojections[i]));

    // coprojections commute with the connecting maps
    for (const auto & [key, f] : sys.maps) {
        auto [i, j] = key;
        CHECK(compose(f, lim.coprojections[std::size_t(i)]) ==
            lim.coprojections[std::size_t(j)]);
    }
}

TEST_CASE("the merge system quotients the pair onto the point")
{
    auto sys = merge_system();
    CHECK_NOTHROW(validate_direct_system(sys));
    auto lim = direct_limit(sys);

    CHECK(lim.limit.total_size() == 1);
    CHECK(lim.limit.name == "limit(pq-point)");
    CHECK(lim.coprojections[0].map[0] == std::vector<int>{0, 0});
    CHECK(evaluate(lim.limit, parse(*pq_sig(), "exists x. P(x) & Q(x)")));
}

TEST_CASE("limit lemma clauses on the window chain")
{
    auto sys = window_chain();
    auto lim = direct_limit(sys);
    const auto & sig = *lim.limit.sig;

    // true positive fact realized only at the top
    auto top_only = verify_limit_lemma(sys, lim, parse(sig, "P3(x)"), {{"x", 6}});
    CHECK(top_only.clause1_checked);
    CHECK(top_only.clause1_holds);
    REQUIRE(top_only.clause1_witness.has_value());
    CHECK(*top_only.clause1_witness == 2);
    CHECK(top_only.clause2_holds);
    CHECK(top_only.all());

    // realized already by the smallest member
    auto shared = verify_limit_lemma(sys, lim, parse(sig, "P1(x)"), {{"x", 4}});
    CHECK(shared.clause1_holds);
    REQUIRE(shared.clause1_witness.has_value());
    CHECK(*shared.clause1_witness == 0);

    // false in the limit with no realizing preimage anywhere
    auto absent = verify_limit_lemma(sys, lim, parse(sig, "P3(x)"), {{"x", 1}});
    CHECK(absent.clause1_checked);
    CHECK(absent.clause1_holds);
    CHECK(! absent.clause1_witness.has_value());

    // closed positive sentence first realized in the middle member
    auto closed = verify_limit_lemma(sys, lim, parse(sig, "exists x. P2(x)"));
    CHECK(closed.clause1_holds);
    REQUIRE(closed.clause1_witness.has_value());
    CHECK(*closed.clause1_witness == 1);

    // existential but not positive: only the transfer clause is checked
    auto guarded = verify_limit_lemma(sys, lim, parse(sig, "exists x. P0(x) & !Q1(x)"));
    CHECK(! guarded.clause1_checked);
    CHECK(guarded.clause2_checked);
    CHECK(guarded.clause2_holds);
    CHECK(guarded.all());

    CHECK_THROWS_AS(
        verify_limit_lemma(sys, lim, parse(sig, "forall x. P0(x) | Q0(x)")), ClassMismatch &);
    CHECK_THROWS_AS(verify_limit_lemma(sys, lim, parse(sig, "P0(x)"), {}), BadInput &);
}

TEST_CASE("negative matrices break the realization biconditional but not transfer")
{
    auto sys = merge_system();
    auto lim = direct_limit(sys);

    // !Q holds at a preimage of the merged point yet fails in the limit
    auto flipped = verify_limit_lemma(sys, lim, parse(*pq_sig(), "!Q(x)"), {{"x", 0}});
    CHECK(! flipped.clause1_checked);
    CHECK(flipped.clause2_checked);
    CHECK(flipped.clause2_holds);
    REQUIRE(flipped.clause2_witness.has_value());
    CHECK(*flipped.clause2_witness == 0);
    CHECK(flipped.all());

    // the positive joint fact is realized only above the merge
    auto joint = verify_limit_lemma(sys, lim, parse(*pq_sig(), "P(x) & Q(x)"), {{"x", 0}});
    CHECK(joint.clause1_checked);
    CHECK(joint.clause1_holds);
    REQUIRE(joint.clause1_witness.has_value());
    CHECK(*joint.clause1_witness == 1);
}

TEST_CASE("universal sentences true in every member survive into the limit")
{
    auto sys = window_chain();
    auto lim = direct_limit(sys);

    Fragment frag;
    frag.cls = FragmentClass::QuantifierFree;
    frag.max_connective_width = 2;
    frag.free_variables = {{"x", 0}};
    frag.allowed_relations = {"P0", "P1", "Q0", "Q1"};
    frag.allowed_locality = {"d0"};

    auto report =
        verify_limit_lemma(sys, lim, parse(*lim.limit.sig, "exists x. P0(x)"), {}, &frag);
    CHECK(report.universal_holds);
    CHECK(report.universal_checked >= 3);
    CHECK(report.universal_failure == nullptr);
    CHECK(report.all());
}
