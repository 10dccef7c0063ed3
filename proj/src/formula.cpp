#include <locus/formula.hpp>

#include <algorithm>

using std::string;
using std::vector;

namespace locus
{
    auto make_var(string name, int sort) -> Term
    {
        Term t;
        t.kind = Term::Kind::Variable;
        t.name = std::move(name);
        t.sort = sort;
        return t;
    }

    auto make_const(const SignatureSpec & sig, int constant) -> Term
    {
        Term t;
        t.kind = Term::Kind::Constant;
        t.name = sig.constants.at(constant).name;
        t.sort = sig.constants.at(constant).sort;
        t.constant = constant;
        return t;
    }

    namespace
    {
        auto node(Formula::Kind k) -> std::shared_ptr<Formula>
        {
            auto f = std::make_shared<Formula>();
            f->kind = k;
            return f;
        }
    }

    auto top() -> FormulaPtr { return node(Formula::Kind::Top); }
    auto bot() -> FormulaPtr { return node(Formula::Kind::Bot); }

    auto equal(Term a, Term b) -> FormulaPtr
    {
        if (a.sort != b.sort)
            throw SortError("equality over terms of different sorts: " + a.name + ", " + b.name);
        auto f = node(Formula::Kind::Equal);
        f->terms = {std::move(a), std::move(b)};
        return f;
    }

    auto atom(int rel, vector<Term> terms) -> FormulaPtr
    {
        auto f = node(Formula::Kind::Atom);
        f->rel = rel;
        f->terms = std::move(terms);
        return f;
    }

    auto loc_atom(int sort, int elem, Term a, Term b) -> FormulaPtr
    {
        if (a.sort != sort || b.sort != sort)
            throw SortError("locality atom over terms of the wrong sort");
        auto f = node(Formula::Kind::LocAtom);
        f->loc_sort = sort;
        f->loc_elem = elem;
        f->terms = {std::move(a), std::move(b)};
        return f;
    }

    auto conj(vector<FormulaPtr> children) -> FormulaPtr
    {
        vector<FormulaPtr> flat;
        for (auto & c : children) {
            if (c->kind == Formula::Kind::And)
                flat.insert(flat.end(), c->children.begin(), c->children.end());
            else
                flat.push_back(c);
        }
        if (flat.empty())
            return top();
        if (flat.size() == 1)
            return flat.front();
        auto f = node(Formula::Kind::And);
        f->children = std::move(flat);
        return f;
    }

    auto disj(vector<FormulaPtr> children) -> FormulaPtr
    {
        vector<FormulaPtr> flat;
        for (auto & c : children) {
            if (c->kind == Formula::Kind::Or)
                flat.insert(flat.end(), c->children.begin(), c->children.end());
            else
                flat.push_back(c);
        }
        if (flat.empty())
            return bot();
        if (flat.size() == 1)
            return flat.front();
        auto f = node(Formula::Kind::Or);
        f->children = std::move(flat);
        return f;
    }

    auto neg(FormulaPtr f) -> FormulaPtr
    {
        auto g = node(Formula::Kind::Not);
        g->children = {std::move(f)};
        return g;
    }

    auto exists(string var, int sort, FormulaPtr body) -> FormulaPtr
    {
        auto f = node(Formula::Kind::Exists);
        f->var = std::move(var);
        f->var_sort = sort;
        f->children = {std::move(body)};
        return f;
    }

    auto forall(string var, int sort, FormulaPtr body) -> FormulaPtr
    {
        auto f = node(Formula::Kind::Forall);
        f->var = std::move(var);
        f->var_sort = sort;
        f->children = {std::move(body)};
        return f;
    }

    auto local_exists(string var, int sort, int elem, Term anchor, FormulaPtr body) -> FormulaPtr
    {
        if (anchor.kind == Term::Kind::Variable && anchor.name == var)
            throw AnchorContainsBoundVar("anchor of local quantifier mentions its own bound variable '" + var + "'");
        if (anchor.sort != sort)
            throw SortError("local quantifier over sort mismatching its anchor");
        auto f = node(Formula::Kind::LocalExists);
        f->var = std::move(var);
        f->var_sort = sort;
        f->loc_sort = sort;
        f->loc_elem = elem;
        f->anchor = std::move(anchor);
        f->children = {std::move(body)};
        return f;
    }

    namespace
    {
        // context precedence: 0 = anywhere, 1 = operand of |, 2 = operand of &,
        // 3 = operand of !
        auto print_rec(const SignatureSpec & sig, const FormulaPtr & f, int ctx, string & out) -> void
        {
            auto term_str = [&] (const Term & t) { return t.name; };
            auto wrap = [&] (int level, auto && body) {
                bool parens = ctx > level;
                if (parens)
                    out += "(";
                body();
                if (parens)
                    out += ")";
            };

            switch (f->kind) {
            case Formula::Kind::Top: out += "true"; break;
            case Formula::Kind::Bot: out += "false"; break;
            case Formula::Kind::Equal:
                out += term_str(f->terms[0]) + " = " + term_str(f->terms[1]);
                break;
            case Formula::Kind::Atom: {
                out += sig.relations.at(f->rel).name + "(";
                for (std::size_t i = 0; i < f->terms.size(); ++i) {
                    if (i)
                        out += ", ";
                    out += term_str(f->terms[i]);
                }
                out += ")";
                break;
            }
            case Formula::Kind::LocAtom:
                out += sig.locality.at(f->loc_sort).elements.at(f->loc_elem) + "(" + term_str(f->terms[0]) + ", " +
                       term_str(f->terms[1]) + ")";
                break;
            case Formula::Kind::And:
                wrap(1, [&] {
                    for (std::size_t i = 0; i < f->children.size(); ++i) {
                        if (i)
                            out += " & ";
                        print_rec(sig, f->children[i], 2, out);
                    }
                });
                break;
            case Formula::Kind::Or:
                wrap(0, [&] {
                    for (std::size_t i = 0; i < f->children.size(); ++i) {
                        if (i)
                            out += " | ";
                        print_rec(sig, f->children[i], 1, out);
                    }
                });
                break;
            case Formula::Kind::Not:
                out += "!";
                print_rec(sig, f->children[0], 3, out);
                break;
            case Formula::Kind::Exists:
            case Formula::Kind::Forall:
            case Formula::Kind::LocalExists:
                wrap(0, [&] {
                    out += (f->kind == Formula::Kind::Forall) ? "forall " : "exists ";
                    out += f->var;
                    if (sig.sorts.size() > 1)
                        out += ":" + sig.sorts.at(f->var_sort);
                    if (f->kind == Formula::Kind::LocalExists)
                        out += " in " + sig.locality.at(f->loc_sort).elements.at(f->loc_elem) + "(" +
                               term_str(f->anchor) + ")";
                    out += ". ";
                    print_rec(sig, f->children[0], 0, out);
                });
                break;
            }
        }
    }

    auto print(const SignatureSpec & sig, const FormulaPtr & f) -> string
    {
        string out;
        print_rec(sig, f, 0, out);
        return out;
    }

    namespace
    {
        auto free_rec(const FormulaPtr & f, std::map<string, int> & acc, vector<string> & bound) -> void
        {
            auto is_bound = [&] (const string & n) {
                return std::find(bound.begin(), bound.end(), n) != bound.end();
            };
            for (const auto & t : f->terms)
                if (t.kind == Term::Kind::Variable && ! is_bound(t.name))
                    acc.emplace(t.name, t.sort);
            if (f->kind == Formula::Kind::LocalExists && f->anchor.kind == Term::Kind::Variable &&
                ! is_bound(f->anchor.name))
                acc.emplace(f->anchor.name, f->anchor.sort);
            bool binder = f->kind == Formula::Kind::Exists || f->kind == Formula::Kind::Forall ||
                f->kind == Formula::Kind::LocalExists;
            if (binder)
                bound.push_back(f->var);
            for (const auto & c : f->children)
                free_rec(c, acc, bound);
            if (binder)
                bound.pop_back();
        }
    }

    auto free_variables(const FormulaPtr & f) -> std::map<string, int>
    {
        std::map<string, int> acc;
        vector<string> bound;
        free_rec(f, acc, bound);
        return acc;
    }

    namespace
    {
        auto count_unrestricted_quantifiers(const FormulaPtr & f) -> int
        {
            int n = (f->kind == Formula::Kind::Exists || f->kind == Formula::Kind::Forall) ? 1 : 0;
            for (const auto & c : f->children)
                n += count_unrestricted_quantifiers(c);
            return n;
        }

        auto has_kind(const FormulaPtr & f, Formula::Kind k) -> bool
        {
            if (f->kind == k)
                return true;
            for (const auto & c : f->children)
                if (has_kind(c, k))
                    return true;
            return false;
        }

        // Peels a Forall prefix, reading !exists x. g as forall x. !g.
        auto strip_universal_prefix(FormulaPtr f) -> FormulaPtr
        {
            while (true) {
                if (f->kind == Formula::Kind::Forall) {
                    f = f->children[0];
                    continue;
                }
                if (f->kind == Formula::Kind::Not && f->children[0]->kind == Formula::Kind::Not) {
                    f = f->children[0]->children[0];
                    continue;
                }
                if (f->kind == Formula::Kind::Not && f->children[0]->kind == Formula::Kind::Exists) {
                    f = neg(f->children[0]->children[0]);
                    continue;
                }
                return f;
            }
        }
    }

    auto classify(const FormulaPtr & f) -> FormulaClass
    {
        FormulaClass c;
        bool has_not = has_kind(f, Formula::Kind::Not);
        bool has_forall = has_kind(f, Formula::Kind::Forall);
        bool has_or = has_kind(f, Formula::Kind::Or);
        bool has_exists = has_kind(f, Formula::Kind::Exists);
        bool has_local = has_kind(f, Formula::Kind::LocalExists);

        c.quantifier_free = ! has_exists && ! has_forall && ! has_local;
        c.positive = ! has_not && ! has_forall;
        c.primitive_positive = c.positive && ! has_or;
        c.negative = f->kind == Formula::Kind::Not && classify(f->children[0]).positive;
        c.local = count_unrestricted_quantifiers(f) == 0;
        c.local_positive = c.positive && c.local;
        c.local_primitive_positive = c.primitive_positive && c.local;
        auto matrix = strip_universal_prefix(f);
        c.pi1_local = count_unrestricted_quantifiers(matrix) == 0;
        return c;
    }

    auto quantifier_depth(const FormulaPtr & f) -> int
    {
        int sub = 0;
        for (const auto & c : f->children)
            sub = std::max(sub, quantifier_depth(c));
        bool binder = f->kind == Formula::Kind::Exists || f->kind == Formula::Kind::Forall ||
            f->kind == Formula::Kind::LocalExists;
        return sub + (binder ? 1 : 0);
    }

    auto connective_width(const FormulaPtr & f) -> int
    {
        int w = 1;
        if (f->kind == Formula::Kind::And || f->kind == Formula::Kind::Or)
            w = int(f->children.size());
        for (const auto & c : f->children)
            w = std::max(w, connective_width(c));
        return w;
    }

    auto substitute(const FormulaPtr & f, const string & var, const Term & value) -> FormulaPtr
    {
        auto sub_term = [&] (const Term & t) -> Term {
            if (t.kind == Term::Kind::Variable && t.name == var)
                return value;
            return t;
        };

        bool binder = f->kind == Formula::Kind::Exists || f->kind == Formula::Kind::Forall ||
            f->kind == Formula::Kind::LocalExists;

        auto g = std::make_shared<Formula>(*f);
        for (auto & t : g->terms)
            t = sub_term(t);
        if (f->kind == Formula::Kind::LocalExists)
            g->anchor = sub_term(f->anchor);

        if (binder && f->var == var)
            return g; // shadowed inside, only the anchor could mention it

        if (binder && value.kind == Term::Kind::Variable && value.name == f->var) {
            // rename the binder away from the incoming variable
            string fresh = f->var;
            auto used = free_variables(f->children[0]);
            do
                fresh += "'";
            while (used.count(fresh) || fresh == var);
            g->var = fresh;
            auto renamed = substitute(f->children[0], f->var, make_var(fresh, f->var_sort));
            g->children = {substitute(renamed, var, value)};
            return g;
        }

        vector<FormulaPtr> kids;
        for (const auto & c : f->children)
            kids.push_back(substitute(c, var, value));
        g->children = std::move(kids);
        return g;
    }

    auto canonicalize(const SignatureSpec & sig, const FormulaPtr & f) -> FormulaPtr
    {
        if (f->kind == Formula::Kind::And || f->kind == Formula::Kind::Or) {
            vector<FormulaPtr> kids;
            for (const auto & c : f->children)
                kids.push_back(canonicalize(sig, c));
            vector<std::pair<string, FormulaPtr>> keyed;
            for (auto & k : kids)
                keyed.emplace_back(print(sig, k), k);
            std::sort(keyed.begin(), keyed.end(), [] (const auto & a, const auto & b) { return a.first < b.first; });
            keyed.erase(std::unique(keyed.begin(), keyed.end(),
                                    [] (const auto & a, const auto & b) { return a.first == b.first; }),
                        keyed.end());
            vector<FormulaPtr> out;
            for (auto & [_, k] : keyed)
                out.push_back(k);
            return f->kind == Formula::Kind::And ? conj(std::move(out)) : disj(std::move(out));
        }
        if (f->children.empty())
            return f;
        auto g = std::make_shared<Formula>(*f);
        vector<FormulaPtr> kids;
        for (const auto & c : f->children)
            kids.push_back(canonicalize(sig, c));
        g->children = std::move(kids);
        return g;
    }
}
