#ifndef LOCUS_MORPHISM_HPP
#define LOCUS_MORPHISM_HPP

#include <locus/formula.hpp>
#include <locus/fragment.hpp>
#include <locus/structure.hpp>

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace locus
{
    // Maps element indices per sort. Homomorphisms preserve relations,
    // constants and every locality relation.
    struct Homomorphism
    {
        std::vector<std::vector<int>> map;

        auto operator()(int sort, int elem) const -> int { return map[std::size_t(sort)][std::size_t(elem)]; }
        auto operator==(const Homomorphism & other) const -> bool = default;
    };

    struct HomOptions
    {
        int limit = 0;   // stop after this many, 0 for all
        bool injective = false;
        std::map<std::pair<int, int>, int> fixed; // (sort, elem) -> image
    };

    // Backtracking search over a static variable order with incremental
    // constraint checks. Deterministic output order.
    auto find_homomorphisms(const FiniteStructure & a, const FiniteStructure & b,
        const HomOptions & options = {}) -> std::vector<Homomorphism>;

    auto is_homomorphism(const FiniteStructure & a, const FiniteStructure & b, const Homomorphism & h)
        -> bool;

    auto compose(const Homomorphism & inner, const Homomorphism & outer) -> Homomorphism;
    auto identity_homomorphism(const FiniteStructure & m) -> Homomorphism;

    auto are_isomorphic(const FiniteStructure & a, const FiniteStructure & b)
        -> std::optional<Homomorphism>;

    enum class EmbeddingMode
    {
        Retraction,     // search for r with r after h the identity
        DiagramFormula, // reflection of the codomain's positive diagram
        FragmentSweep   // reflection of every fragment formula, all tuples
    };

    struct EmbeddingReport
    {
        bool is_embedding = false;
        std::optional<Homomorphism> retraction;    // Retraction mode, on success
        FormulaPtr diagram;                        // DiagramFormula mode: formula checked
        FormulaPtr failing_formula;                // FragmentSweep mode, on failure
        std::vector<int> failing_tuple;            // values for the fragment's variables
    };

    // The three modes agree on whether h is a positive embedding whenever the
    // sweep fragment is rich enough; Retraction and DiagramFormula agree
    // unconditionally. FragmentSweep needs `fragment`.
    auto is_positive_embedding(const FiniteStructure & a, const FiniteStructure & b,
        const Homomorphism & h, EmbeddingMode mode, const Fragment * fragment = nullptr)
        -> EmbeddingReport;

    // The codomain's positive diagram arranged for reflection along h: one
    // free variable per h-image representative, equalities for merged
    // preimages, existentials for elements outside the image, atoms placed
    // directly under the binder of their last-bound variable.
    auto reflection_diagram(const FiniteStructure & a, const FiniteStructure & b,
        const Homomorphism & h) -> std::pair<FormulaPtr, std::map<std::string, int>>;

    struct PcCounterexample
    {
        int member;       // catalogue index
        Homomorphism hom; // not a positive embedding
    };

    struct PcReport
    {
        bool closed = true;
        std::optional<PcCounterexample> counterexample;
        long homs_checked = 0;
    };

    // m is locally positively closed for the catalogue when every
    // homomorphism into a member is a positive embedding.
    auto check_locally_positively_closed(const FiniteStructure & m,
        const std::vector<FiniteStructure> & catalogue) -> PcReport;

    // Positive fragment formula whose definable set in m is exactly the one
    // element, if the fragment holds one. Single free variable taken from the
    // fragment context.
    auto isolation_certificate(const FiniteStructure & m, int sort, int elem, const Fragment & fragment)
        -> std::optional<FormulaPtr>;
}

#endif
