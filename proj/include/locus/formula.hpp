#ifndef LOCUS_FORMULA_HPP
#define LOCUS_FORMULA_HPP

#include <locus/signature.hpp>

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace locus
{
    struct Term
    {
        enum class Kind
        {
            Variable,
            Constant
        };
        Kind kind = Kind::Variable;
        std::string name;
        int sort = -1;
        int constant = -1; // constant index when kind == Constant

        auto operator==(const Term & other) const -> bool
        {
            return kind == other.kind && name == other.name && sort == other.sort;
        }
    };

    auto make_var(std::string name, int sort) -> Term;
    auto make_const(const SignatureSpec & sig, int constant) -> Term;

    struct Formula;
    using FormulaPtr = std::shared_ptr<const Formula>;

    // Immutable formula node. Atoms over user relations use `rel`; locality
    // atoms d(t1,t2) use loc_sort/loc_elem with rel == -1. LocalExists keeps
    // its bound as loc_sort/loc_elem and the anchor term.
    struct Formula
    {
        enum class Kind
        {
            Top,
            Bot,
            Equal,
            Atom,
            LocAtom,
            And,
            Or,
            Not,
            Exists,
            Forall,
            LocalExists
        };

        Kind kind = Kind::Top;
        int rel = -1;
        int loc_sort = -1;
        int loc_elem = -1;
        std::vector<Term> terms;
        std::vector<FormulaPtr> children;
        std::string var;
        int var_sort = -1;
        Term anchor;
    };

    auto top() -> FormulaPtr;
    auto bot() -> FormulaPtr;
    auto equal(Term a, Term b) -> FormulaPtr;
    auto atom(int rel, std::vector<Term> terms) -> FormulaPtr;
    auto loc_atom(int sort, int elem, Term a, Term b) -> FormulaPtr;
    // And/Or flatten nested nodes of the same kind; singleton lists collapse.
    auto conj(std::vector<FormulaPtr> children) -> FormulaPtr;
    auto disj(std::vector<FormulaPtr> children) -> FormulaPtr;
    auto neg(FormulaPtr f) -> FormulaPtr;
    auto exists(std::string var, int sort, FormulaPtr body) -> FormulaPtr;
    auto forall(std::string var, int sort, FormulaPtr body) -> FormulaPtr;
    // exists var in d(anchor). body; throws AnchorContainsBoundVar when the
    // anchor is the bound variable itself.
    auto local_exists(std::string var, int sort, int elem, Term anchor, FormulaPtr body) -> FormulaPtr;

    // Canonical concrete syntax; parse(print(f)) reproduces f structurally.
    auto print(const SignatureSpec & sig, const FormulaPtr & f) -> std::string;

    auto free_variables(const FormulaPtr & f) -> std::map<std::string, int>; // name -> sort

    struct FormulaClass
    {
        bool quantifier_free = false;
        bool positive = false;
        bool primitive_positive = false;
        bool negative = false;
        bool local = false;
        bool local_positive = false;
        bool local_primitive_positive = false;
        bool pi1_local = false;
    };

    // Syntactic classification.  positive: no Not/Forall and no unguarded
    // use of negation; primitive positive additionally bans Or; local: every
    // quantifier is a local one (or its Not-dual); pi1-local: a Forall prefix
    // (allowing the Not-Exists spelling) over a local matrix.
    auto classify(const FormulaPtr & f) -> FormulaClass;

    // Quantifier nesting depth and maximum connective width.
    auto quantifier_depth(const FormulaPtr & f) -> int;
    auto connective_width(const FormulaPtr & f) -> int;

    // Capture-avoiding substitution of a term for a free variable.
    auto substitute(const FormulaPtr & f, const std::string & var, const Term & value) -> FormulaPtr;

    // Children sorted by canonical print, duplicates removed; applied
    // recursively. Enumeration and comparison work on this form.
    auto canonicalize(const SignatureSpec & sig, const FormulaPtr & f) -> FormulaPtr;
}

#endif
