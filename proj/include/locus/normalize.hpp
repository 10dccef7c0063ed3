#ifndef LOCUS_NORMALIZE_HPP
#define LOCUS_NORMALIZE_HPP

#include <locus/formula.hpp>
#include <locus/signature.hpp>
#include <locus/structure.hpp>

#include <vector>

namespace locus
{
    // Replaces every bounded quantifier exists x in d(t). phi by
    // exists x. (d(x, t) & phi).
    auto desugar(const SignatureSpec & sig, const FormulaPtr & f) -> FormulaPtr;

    // Renames bound variables so they are pairwise distinct and disjoint
    // from the free variables.
    auto rename_apart(const FormulaPtr & f) -> FormulaPtr;

    // Positive formulas as a disjunction of primitive positive formulas.
    // Throws ClassMismatch on non-positive input.
    auto to_pp_disjunction(const SignatureSpec & sig, const FormulaPtr & f) -> std::vector<FormulaPtr>;

    // Positive formulas in exists-prenex form: unrestricted existential
    // prefix over a quantifier-free positive matrix. Bounded quantifiers are
    // desugared first. Equivalence relies on every sort being nonempty.
    auto to_exists_prenex(const SignatureSpec & sig, const FormulaPtr & f) -> FormulaPtr;

    // Local positive formulas with every bounded quantifier pulled to the
    // front. Pulling a bounded quantifier out of a disjunct is only an
    // equivalence over structures where balls contain their centres, which
    // the locality axioms guarantee; over arbitrary structures the result may
    // differ. Throws ClassMismatch unless the input is local positive.
    auto to_local_prenex(const SignatureSpec & sig, const FormulaPtr & f) -> FormulaPtr;

    // Definable sets over the shared free variables coincide on m.
    auto semantically_equivalent(const FiniteStructure & m, const FormulaPtr & f, const FormulaPtr & g)
        -> bool;
}

#endif
