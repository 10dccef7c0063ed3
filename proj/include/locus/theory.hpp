#ifndef LOCUS_THEORY_HPP
#define LOCUS_THEORY_HPP

#include <locus/eval.hpp>
#include <locus/formula.hpp>
#include <locus/fragment.hpp>
#include <locus/morphism.hpp>
#include <locus/structure.hpp>

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace locus
{
    enum class TheoryMode
    {
        ExplicitSentences, // finite list of negative sentences
        ModelClass         // the negative theory of a catalogue of local structures
    };

    // A negative local theory at desk scale. Closure under local implication
    // is never materialized; membership questions go through locally_entails.
    // In ModelClass mode every finite model of the theory maps
    // homomorphically into some catalogue member, which makes the member
    // scans below exhaustive rather than one-sided.
    struct TheorySpec
    {
        TheoryMode mode = TheoryMode::ModelClass;
        std::shared_ptr<const SignatureSpec> sig;
        std::vector<FormulaPtr> sentences;      // ExplicitSentences mode
        std::vector<FiniteStructure> catalogue; // ModelClass mode
        Fragment fragment;    // ambient fragment, handed to operations that take one
        int search_bound = 4; // max universe size per sort for model search
        std::string name;
    };

    // Validating constructors: explicit sentences must classify negative;
    // catalogue members must agree on the signature and pass A1..A5.
    auto make_explicit_theory(std::shared_ptr<const SignatureSpec> sig,
        std::vector<FormulaPtr> sentences, int search_bound, std::string name = "") -> TheorySpec;
    auto make_model_class_theory(std::vector<FiniteStructure> catalogue, int search_bound,
        std::string name = "") -> TheorySpec;

    // Existential closure over the formula's free variables, bound in name
    // order. Used to turn fragment formulas into sentences.
    auto exists_closure(const FormulaPtr & f) -> FormulaPtr;

    struct EntailmentResult
    {
        bool entailed = false;
        int bound = 0;          // size bound the verdict was computed at
        bool definitive = false; // exhaustive rather than one-sided
        std::optional<FiniteStructure> countermodel;
        std::optional<int> counter_member;       // catalogue member it maps into
        std::optional<Homomorphism> counter_hom; // the certifying map
    };

    // Bounded local entailment. A countermodel is a local model of the
    // theory satisfying the negation of the sentence; it is re-verified by
    // axiom check and evaluation before being returned. In ModelClass mode
    // positive and negative sentences get exhaustive answers; other shapes
    // throw ClassMismatch there. ExplicitSentences mode searches raw
    // structures up to the bound and its Entailed answers are one-sided.
    auto locally_entails(const TheorySpec & t, const FormulaPtr & phi, int size_bound = 0)
        -> EntailmentResult;

    struct MembershipResult
    {
        bool member = false; // the sentence lies in the positive part
        int bound = 0;
        bool definitive = false;
        std::optional<int> witness_member;      // ModelClass witness
        std::optional<FiniteStructure> witness; // ExplicitSentences witness
    };

    // Positive part membership: some local model of the theory satisfies the
    // positive sentence.
    auto positive_part_membership(const TheorySpec & t, const FormulaPtr & phi) -> MembershipResult;

    struct Denial
    {
        FormulaPtr psi;
        int bound = 0;
        bool definitive = false;
    };

    // Every fragment formula psi over the fragment's variable context with
    // locally_entails(t, not exists (phi and psi)) entailed. The fragment
    // context must cover phi's free variables.
    auto find_denials(const TheorySpec & t, const FormulaPtr & phi, const Fragment & frag)
        -> std::vector<Denial>;

    enum class ApproxMode
    {
        Approximates, // phi <= psi: every fragment denial of psi denies phi
        Complementary // phi T psi: every fragment denial of psi is approximated by phi
    };

    struct ApproxReport
    {
        bool holds = true;
        int bound = 0;
        bool definitive = false;
        int denials_checked = 0;
        std::optional<FormulaPtr> violating_denial; // denial of psi that fails
        std::optional<FormulaPtr> violating_inner;  // Complementary: denial of phi missing it
    };

    auto check_approx_complementary(const TheorySpec & t, const FormulaPtr & phi,
        const FormulaPtr & psi, ApproxMode mode, const Fragment & frag) -> ApproxReport;

    enum class IrreducibilityMode
    {
        Plain,        // jointly satisfiable pairs, no distance constraint
        Uniform,      // one fixed locality element between the two witnesses
        UniformSearch // try every element of the sort's monoid
    };

    struct PairCertificate
    {
        FormulaPtr phi, psi; // both satisfiable alone, jointly refused
    };

    struct ElementVerdict
    {
        int elem = -1; // locality element index in the variable sort's monoid
        bool holds = false;
        std::optional<PairCertificate> certificate;
    };

    struct IrreducibilityReport
    {
        bool holds = false;
        int bound = 0;
        bool definitive = false;
        std::optional<PairCertificate> certificate; // failing pair, Plain/Uniform
        std::optional<int> witness_elem;            // UniformSearch: first element that works
        std::vector<ElementVerdict> per_element;    // UniformSearch only
    };

    // The fragment must have exactly one free variable; pairs are formed by
    // renaming its variable apart in the second formula. Uniform mode needs
    // loc_elem; UniformSearch reports a verdict for every monoid element of
    // the variable's sort.
    auto check_irreducibility(const TheorySpec & t, IrreducibilityMode mode, const Fragment & frag,
        std::optional<int> loc_elem = std::nullopt) -> IrreducibilityReport;

    struct Continuation
    {
        int a = -1, b = -1; // catalogue pair
        int member = -1;    // common continuation found here
        Homomorphism hom_a, hom_b;
    };

    struct LjcpReport
    {
        bool holds = true;
        int bound = 0;
        bool definitive = false;
        std::vector<Continuation> continuations;
        std::optional<std::pair<int, int>> failing_pair;
    };

    // Local joint continuation at catalogue scale: every pair of members
    // maps jointly into some member. ModelClass mode only.
    auto check_ljcp(const TheorySpec & t, int size_bound = 0) -> LjcpReport;

    struct TheoryComparison
    {
        bool equal = true;
        FormulaPtr witness; // negative sentence separating the two
        int side = -1;      // 0: holds in the first only, 1: in the second only
    };

    // Fragment-scale comparison of negative theories of two structures.
    auto compare_negative_theories(const FiniteStructure & m, const FiniteStructure & n,
        const Fragment & frag) -> TheoryComparison;

    struct CompletenessReport
    {
        bool holds = true;
        int bound = 0;
        bool definitive = false;
        std::vector<int> pc_members; // locally positively closed members
        std::optional<std::pair<int, int>> differing_pair;
        FormulaPtr witness;                // separating sentence
        std::optional<int> matching_member; // weak completeness witness
    };

    // Catalogue completeness: all locally positively closed members share
    // the fragment negative theory. Weak completeness: some closed member's
    // fragment negative theory equals the theory's own.
    auto check_catalogue_completeness(const TheorySpec & t, const Fragment & frag)
        -> CompletenessReport;
    auto check_weak_completeness(const TheorySpec & t, const Fragment & frag) -> CompletenessReport;

    // A partial quantifier-free positive type read off a witness: an
    // optional constant anchor per variable and a locality element per
    // same-sort variable pair.
    struct BoundType
    {
        struct VarAnchor
        {
            int var = -1;      // index into variables
            int constant = -1; // signature constant index
            int loc_elem = -1;
        };
        struct PairBound
        {
            int var1 = -1, var2 = -1;
            int loc_elem = -1;
        };

        std::vector<std::pair<std::string, int>> variables; // name, sort
        std::vector<VarAnchor> anchors;
        std::vector<PairBound> pairs;
    };

    auto bound_to_formula(const SignatureSpec & sig, const BoundType & b) -> FormulaPtr;

    // Reads a bound off a witness of the positive formula: the anchor is the
    // constant closest to the witness value, the pair elements are the least
    // locality elements relating witness values. Throws NoWitness when the
    // existential closure is outside the positive part. The optional
    // arguments pin a particular witness instead of the first one found.
    auto synthesize_bound(const TheorySpec & t, const FormulaPtr & phi,
        std::optional<int> witness_member = std::nullopt,
        const std::optional<Assignment> & witness_assignment = std::nullopt) -> BoundType;

    struct ProbeReport
    {
        bool gap = false;
        int bound = 0;
        bool definitive = false;          // the gap side is exhaustive at catalogue scale
        std::vector<FormulaPtr> gap_set;  // the grown set witnessing the gap
        std::optional<FormulaPtr> seed;   // seed that grew into it
        int seeds_tried = 0;
    };

    // Greedily grows pairwise jointly satisfiable subsets of the fragment
    // (two free variables of one sort) from every seed and looks for a set
    // whose full conjunction is satisfiable in a model of the theory but
    // only with the witness pair at a saturated top locality level. Such a
    // set is the desk-scale rendering of a type that is finitely locally
    // satisfiable yet has no bounded realization. ModelClass mode only.
    auto inherent_locality_probe(const TheorySpec & t, const Fragment & frag, int size_bound = 0)
        -> ProbeReport;
}

#endif
