#ifndef LOCUS_FRAGMENT_HPP
#define LOCUS_FRAGMENT_HPP

#include <locus/formula.hpp>
#include <locus/signature.hpp>

#include <set>
#include <string>
#include <utility>
#include <vector>

namespace locus
{
    enum class FragmentClass
    {
        Positive,               // atoms, and, or, exists
        PrimitivePositive,      // atoms, and, exists
        LocalPositive,          // atoms, and, or, bounded exists
        LocalPrimitivePositive, // atoms, and, bounded exists
        Local,                  // literals, and, or, bounded exists and its dual
        QuantifierFree          // literals, and, or
    };

    auto to_string(FragmentClass cls) -> std::string;
    auto fragment_class_from_string(const std::string & name) -> FragmentClass;

    // A finitely enumerable slice of a formula class. Empty whitelists mean
    // every symbol of the signature is allowed; the identity locality element
    // is always admissible in membership checks but never enumerated (its
    // atom is equality).
    struct Fragment
    {
        FragmentClass cls = FragmentClass::Positive;
        int max_quantifier_depth = 0;
        int max_connective_width = 1;
        int max_body_width = -1; // width limit inside quantifier bodies; -1 inherits max_connective_width
        std::vector<std::pair<std::string, int>> free_variables; // name, sort
        std::vector<std::string> allowed_relations;
        std::vector<std::string> allowed_locality;
    };

    // All fragment formulas, deterministically ordered by (quantifier depth,
    // connective width) buckets; inside a bucket, atoms come first (true,
    // false, equalities, relation atoms, locality atoms), then negated atoms,
    // then quantified formulas, then conjunctions and disjunctions.
    // Connectives are nested at most two layers deep; a bound variable must
    // occur in its body; results are deduplicated structurally.
    auto enumerate_fragment(const SignatureSpec & sig, const Fragment & fragment)
        -> std::vector<FormulaPtr>;

    // Measure-based membership: class shape, depth and width bounds, free
    // variable context, and symbol whitelists. Accepts formulas the
    // enumeration would never emit (deeper connective nesting, unused bound
    // variables) as long as the measures fit.
    auto fragment_contains(const SignatureSpec & sig, const Fragment & fragment, const FormulaPtr & f)
        -> bool;

    auto relations_used(const FormulaPtr & f) -> std::set<int>;
    auto locality_used(const FormulaPtr & f) -> std::set<std::pair<int, int>>; // sort, element
}

#endif
