#ifndef LOCUS_EVAL_HPP
#define LOCUS_EVAL_HPP

#include <locus/formula.hpp>
#include <locus/structure.hpp>

#include <map>
#include <set>
#include <string>
#include <vector>

namespace locus
{
    using Assignment = std::map<std::string, int>;

    // Recursive evaluator with per-node memoization keyed on the assignment
    // restricted to the node's free variables. One instance serves one
    // structure; reuse it across queries to keep the cache warm.
    class Evaluator
    {
    public:
        explicit Evaluator(const FiniteStructure & m);

        // Throws UnboundVariable if the formula has a free variable missing
        // from the assignment, SortMismatch on arity or sort violations.
        auto evaluate(const FormulaPtr & f, const Assignment & assignment = {}) -> bool;

    private:
        const FiniteStructure & _m;
        // Keyed by owning pointer: a raw key could be reused by a later
        // allocation after the formula dies, silently aliasing entries.
        std::map<FormulaPtr, std::map<std::string, int>> _free_vars;
        std::map<std::pair<FormulaPtr, std::vector<int>>, bool> _cache;

        auto free_vars_of(const FormulaPtr & f) -> const std::map<std::string, int> &;
        auto eval_rec(const FormulaPtr & f, Assignment & env) -> bool;
        auto term_value(const Term & t, const Assignment & env) const -> int;
    };

    auto evaluate(const FiniteStructure & m, const FormulaPtr & f, const Assignment & assignment = {}) -> bool;

    // All assignments to the given variables (in order) satisfying f. Other
    // free variables of f must not exist.
    auto definable_set(const FiniteStructure & m, const FormulaPtr & f,
        const std::vector<std::pair<std::string, int>> & variables) -> std::set<std::vector<int>>;

    // Negated fragment sentences true in m: one entry !phi for every positive
    // sentence phi of the fragment that m does not satisfy.
    struct Fragment;
    auto negative_theory_fragment(const FiniteStructure & m, const Fragment & fragment)
        -> std::vector<FormulaPtr>;
}

#endif
