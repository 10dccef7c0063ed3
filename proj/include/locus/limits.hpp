#ifndef LOCUS_LIMITS_HPP
#define LOCUS_LIMITS_HPP

#include <locus/eval.hpp>
#include <locus/fragment.hpp>
#include <locus/morphism.hpp>
#include <locus/structure.hpp>

#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace locus
{
    // Finite direct system: structures indexed 0..n-1 with connecting
    // homomorphisms f_{i,j}: M_j -> M_i keyed by (i, j) for i above j. The
    // key set defines the order; identity maps may be omitted.
    struct DirectSystem
    {
        std::vector<FiniteStructure> structures;
        std::map<std::pair<int, int>, Homomorphism> maps;

        auto above(int i, int j) const -> bool
        {
            return i == j || maps.count({i, j}) > 0;
        }
    };

    // Order sanity (indices in range, shared signature), every connecting map
    // a homomorphism, explicit identities equal to the identity, composites
    // present and coherent (f_{i,j} o f_{j,k} = f_{i,k}), and directedness.
    // Throws IncoherentSystem naming the first witnessing triple or pair.
    auto validate_direct_system(const DirectSystem & sys) -> void;

    struct LimitResult
    {
        FiniteStructure limit;
        std::vector<Homomorphism> coprojections; // per index, into the limit
    };

    // Quotient of the disjoint union by eventual equality: two elements merge
    // when connecting maps send them to one element at some upper index.
    // Union-find seeded with every connecting-map edge realizes the relation
    // for finite systems. Relations and locality are the pushed unions.
    auto direct_limit(const DirectSystem & sys) -> LimitResult;

    struct LimitLemmaReport
    {
        // positive formulas hold in the limit exactly when some member
        // realizes a preimage of the tuple
        bool clause1_checked = false;
        bool clause1_holds = false;
        std::optional<int> clause1_witness;
        // existential formulas transfer from the limit back to some member
        bool clause2_checked = false;
        bool clause2_holds = false;
        std::optional<int> clause2_witness;
        // forall-closures of fragment formulas true in every member stay
        // true in the limit
        int universal_checked = 0;
        bool universal_holds = true;
        FormulaPtr universal_failure;

        auto all() const -> bool
        {
            return (! clause1_checked || clause1_holds) && (! clause2_checked || clause2_holds) &&
                universal_holds;
        }
    };

    // phi positive: both clauses. phi existential after desugaring (a prefix
    // of plain existentials over a quantifier-free matrix): clause 2 only.
    // Anything else throws ClassMismatch. `a` assigns limit elements to the
    // free variables of phi.
    auto verify_limit_lemma(const DirectSystem & sys, const LimitResult & lim,
        const FormulaPtr & phi, const Assignment & a = {},
        const Fragment * universal_fragment = nullptr) -> LimitLemmaReport;
}

#endif
