#ifndef LOCUS_CORPUS_HPP
#define LOCUS_CORPUS_HPP

#include <locus/fragment.hpp>
#include <locus/structure.hpp>
#include <locus/theory.hpp>

#include <string>
#include <variant>
#include <vector>

namespace locus
{
    // ---- structure builders ----
    //
    // Every builder returns a structure passing the locality axioms at all
    // accepted parameters. Predicate families are truncated at the structure
    // parameter and the locality chains saturate at the structure diameter,
    // so composition and totality hold exactly on the finite window.

    // Integer window [-n, n] with P_k(x) iff x >= k and Q_k(x) iff x <= -k
    // for k = 0..n+1, locality chain d_0..d_{2n} with d_k(x, y) iff
    // |x - y| <= k. The index n+1 gives each window an empty predicate on
    // both sides; without it the all-P singleton maps into the window and
    // the positively-closed checks degenerate.
    auto corpus_z(int n) -> FiniteStructure;

    // One-element structures in the Z(n) signature: all P true, all Q false
    // (I), and the mirror image (J).
    auto corpus_i(int n) -> FiniteStructure;
    auto corpus_j(int n) -> FiniteStructure;

    // Z(n) expanded with a constant "zero" naming 0; the bound of the pair
    // (zero, zero) is the identity.
    auto corpus_pointed_z(int n) -> FiniteStructure;

    // Hamming cube: elements are the 2^n bitstrings, P_k iff bit k is 1,
    // Q_k iff bit k is 0 (k = 0..n-1), chain d_0..d_n with d_k iff Hamming
    // distance <= k.
    auto corpus_hamming(int n) -> FiniteStructure;

    // Ball of Hamming radius cap around centre inside the cube 2^n, in its
    // own signature with chain d_0..d_{2 cap} (pairwise distances inside the
    // ball reach 2 cap).
    auto corpus_hamming_component(int n, int cap, const std::string & centre) -> FiniteStructure;

    // Tree of paths truncated at height n: vertices (v1, v2) with
    // |v1| <= v2 <= n, edges within a row and along the spine, locality =
    // graph distance with chain d_0..d_{2n}, P_k iff v1 >= k and Q_k iff
    // v1 <= -k for k = 0..n, S iff |v1| = v2. Element names are "(v1,v2)".
    // Distances are of the truncated graph, which can exceed those of the
    // full tree near the boundary.
    auto corpus_tree(int n) -> FiniteStructure;

    // Integer window [-n, n] with exact-distance relations e_k(x, y) iff
    // |x - y| = k for k = 0..2n, the Z-style chain d_0..d_{2n}, and no unary
    // predicates.
    auto corpus_zdist(int n) -> FiniteStructure;

    // Induced substructure of Z(n) on the interval [a, b], in the Z(n)
    // signature.
    auto corpus_interval(int a, int b, int n) -> FiniteStructure;

    // Centred interval [-k, k] in the fixed Z(4) ambient signature
    // (chain d_0..d_8, predicates up to index 5), for k = 1..4. Keeping the
    // ambient wider than the catalogue {C(1), C(2), C(3)} leaves chain
    // headroom above the members' own diameters, which the
    // uniform-irreducibility checks need.
    auto corpus_c(int k) -> FiniteStructure;

    // ---- theory builders ----

    auto theory_singleton(FiniteStructure m, int search_bound = 8) -> TheorySpec;
    // {Z(n), I(n), J(n)}
    auto theory_z_family(int n, int search_bound = 8) -> TheorySpec;
    // {C(1), C(2), C(3)}
    auto theory_c_family(int search_bound = 8) -> TheorySpec;
    // Two Hamming components around distinct centres in one signature.
    auto theory_hamming_pair(int n, int cap, const std::string & centre1,
        const std::string & centre2, int search_bound = 8) -> TheorySpec;

    // ---- ids ----

    // Parsed "name(arg, ...)" form; args keep nested parentheses intact, so
    // "theory(Z(6))" has the single argument "Z(6)".
    struct CorpusId
    {
        std::string name;
        std::vector<std::string> args;
    };

    auto parse_corpus_id(const std::string & text) -> CorpusId;
    auto format_corpus_id(const CorpusId & id) -> std::string;

    using CorpusItem = std::variant<FiniteStructure, TheorySpec>;

    // Builds the structure or theory an id denotes. Structure ids: Z(n),
    // I(n), J(n), pointedZ(n), hamming(n), hammingComp(n,cap,centre),
    // tree(n), zdist(n), C(k), interval(a,b,n). Theory ids: theory(<id>)
    // for a one-member catalogue, Zfamily(n), Cfamily,
    // hammingCompPair(n,cap,centre1,centre2). Throws ParameterOutOfRange
    // outside the documented ranges and UnknownSymbol for unknown names.
    auto build_corpus(const CorpusId & id) -> CorpusItem;
    auto build_corpus(const std::string & text) -> CorpusItem;

    // One line per id family: pattern, parameter ranges, short description.
    auto corpus_grammar() -> std::vector<std::string>;

    // ---- example-specific checks ----

    // Decomposition of a positive formula over a zdist window into a
    // disjunction of full-distance formulas /\_{i<j} e_{n_ij}(x_i, x_j) on
    // the variable context of frag. The disjunction collects every distance
    // profile the formula's definable set touches; `exact` says whether the
    // two sets coincide, and `residual` lists the tuples (as element names)
    // where they differ. Truncation can break exactness near the window
    // boundary even for formulas that decompose exactly on the full line.
    struct DistanceDecomposition
    {
        bool exact = false;
        FormulaPtr disjunction;
        // one profile per disjunct: e-indices for variable pairs i < j in
        // row-major order
        std::vector<std::vector<int>> profiles;
        std::vector<std::vector<std::string>> residual;
    };

    auto full_distance_decomposition(const FormulaPtr & phi, const FiniteStructure & m,
        const Fragment & frag) -> DistanceDecomposition;

    // ---- bundled example checks ----

    struct PaperCheck
    {
        std::string id;
        bool passed = false;
        std::string detail; // certificate or failure description
    };

    struct PaperReport
    {
        std::vector<PaperCheck> checks;

        auto all_passed() const -> bool;
    };

    // Runs the per-example check bundles. Known scopes: "Z-family", "tree",
    // "hamming", "zdist", "C", "pointedZ"; an empty list yields an empty
    // report. Unknown scopes throw BadInput.
    auto run_paper_checks(const std::vector<std::string> & scope) -> PaperReport;
}

#endif
