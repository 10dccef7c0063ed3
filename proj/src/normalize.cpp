#include <locus/errors.hpp>
#include <locus/eval.hpp>
#include <locus/normalize.hpp>

#include <functional>
#include <set>

namespace locus
{
    namespace
    {
        auto collect_all_variables(const FormulaPtr & f, std::set<std::string> & out) -> void
        {
            for (const auto & t : f->terms)
                if (t.kind == Term::Kind::Variable)
                    out.insert(t.name);
            if (f->kind == Formula::Kind::Exists || f->kind == Formula::Kind::Forall ||
                f->kind == Formula::Kind::LocalExists) {
                out.insert(f->var);
                if (f->kind == Formula::Kind::LocalExists && f->anchor.kind == Term::Kind::Variable)
                    out.insert(f->anchor.name);
            }
            for (const auto & child : f->children)
                collect_all_variables(child, out);
        }

        struct Renamer
        {
            std::set<std::string> used;
            int counter = 0;

            auto fresh() -> std::string
            {
                while (true) {
                    auto name = "v" + std::to_string(counter++);
                    if (used.insert(name).second)
                        return name;
                }
            }

            auto walk(const FormulaPtr & f, std::map<std::string, std::string> renaming) -> FormulaPtr
            {
                auto rename_term = [&](const Term & t) -> Term {
                    if (t.kind == Term::Kind::Variable && renaming.count(t.name)) {
                        auto renamed = t;
                        renamed.name = renaming.at(t.name);
                        return renamed;
                    }
                    return t;
                };

                auto g = std::make_shared<Formula>(*f);
                for (auto & t : g->terms)
                    t = rename_term(t);

                if (f->kind == Formula::Kind::Exists || f->kind == Formula::Kind::Forall ||
                    f->kind == Formula::Kind::LocalExists) {
                    if (f->kind == Formula::Kind::LocalExists)
                        g->anchor = rename_term(f->anchor);
                    auto name = fresh();
                    renaming[f->var] = name;
                    g->var = name;
                }

                for (auto & child : g->children)
                    child = walk(child, renaming);
                return g;
            }
        };

        struct PrenexStep
        {
            std::string var;
            int sort;
            bool local;
            int loc_elem = -1;
            Term anchor; // meaningful when local
        };

        // assumes bound variables already renamed apart
        auto pull_prefix(const FormulaPtr & f, std::vector<PrenexStep> & prefix) -> FormulaPtr
        {
            switch (f->kind) {
            case Formula::Kind::Exists: {
                prefix.push_back({f->var, f->var_sort, false, -1, {}});
                return pull_prefix(f->children[0], prefix);
            }
            case Formula::Kind::LocalExists: {
                prefix.push_back({f->var, f->var_sort, true, f->loc_elem, f->anchor});
                return pull_prefix(f->children[0], prefix);
            }
            case Formula::Kind::And:
            case Formula::Kind::Or: {
                std::vector<FormulaPtr> matrices;
                for (const auto & child : f->children)
                    matrices.push_back(pull_prefix(child, prefix));
                return f->kind == Formula::Kind::And ? conj(std::move(matrices)) : disj(std::move(matrices));
            }
            default:
                return f;
            }
        }

        auto rebuild_prefix(const std::vector<PrenexStep> & prefix, FormulaPtr matrix)
            -> FormulaPtr
        {
            for (auto it = prefix.rbegin(); it != prefix.rend(); ++it) {
                if (it->local)
                    matrix = local_exists(it->var, it->sort, it->loc_elem, it->anchor, matrix);
                else
                    matrix = exists(it->var, it->sort, matrix);
            }
            return matrix;
        }
    }

    auto desugar(const SignatureSpec & sig, const FormulaPtr & f) -> FormulaPtr
    {
        auto g = std::make_shared<Formula>(*f);
        for (auto & child : g->children)
            child = desugar(sig, child);
        if (f->kind == Formula::Kind::LocalExists) {
            auto bound = loc_atom(f->var_sort, f->loc_elem, make_var(f->var, f->var_sort), f->anchor);
            auto body = conj({bound, g->children[0]});
            return exists(f->var, f->var_sort, body);
        }
        return g;
    }

    auto rename_apart(const FormulaPtr & f) -> FormulaPtr
    {
        Renamer renamer;
        collect_all_variables(f, renamer.used);
        return renamer.walk(f, {});
    }

    auto to_pp_disjunction([[maybe_unused]] const SignatureSpec & sig, const FormulaPtr & f) -> std::vector<FormulaPtr>
    {
        if (! classify(f).positive)
            throw ClassMismatch("pp-disjunction form needs a positive formula");

        std::function<auto(const FormulaPtr &)->std::vector<FormulaPtr>> rec =
            [&](const FormulaPtr & g) -> std::vector<FormulaPtr> {
            switch (g->kind) {
            case Formula::Kind::Or: {
                std::vector<FormulaPtr> out;
                for (const auto & child : g->children)
                    for (auto & d : rec(child))
                        out.push_back(std::move(d));
                return out;
            }
            case Formula::Kind::And: {
                std::vector<std::vector<FormulaPtr>> parts;
                for (const auto & child : g->children)
                    parts.push_back(rec(child));
                std::vector<FormulaPtr> out;
                std::vector<std::size_t> pick(parts.size(), 0);
                while (true) {
                    std::vector<FormulaPtr> conjuncts;
                    for (std::size_t k = 0; k < parts.size(); ++k)
                        conjuncts.push_back(parts[k][pick[k]]);
                    out.push_back(conj(std::move(conjuncts)));
                    std::size_t k = 0;
                    for (; k < parts.size(); ++k) {
                        if (++pick[k] < parts[k].size())
                            break;
                        pick[k] = 0;
                    }
                    if (k == parts.size())
                        break;
                }
                return out;
            }
            case Formula::Kind::Exists: {
                std::vector<FormulaPtr> out;
                for (const auto & d : rec(g->children[0]))
                    out.push_back(exists(g->var, g->var_sort, d));
                return out;
            }
            case Formula::Kind::LocalExists: {
                std::vector<FormulaPtr> out;
                for (const auto & d : rec(g->children[0]))
                    out.push_back(local_exists(g->var, g->var_sort, g->loc_elem, g->anchor, d));
                return out;
            }
            default:
                return {g};
            }
        };

        return rec(f);
    }

    auto to_exists_prenex(const SignatureSpec & sig, const FormulaPtr & f) -> FormulaPtr
    {
        if (! classify(f).positive)
            throw ClassMismatch("exists-prenex form needs a positive formula");
        auto renamed = rename_apart(desugar(sig, f));
        std::vector<PrenexStep> prefix;
        auto matrix = pull_prefix(renamed, prefix);
        return rebuild_prefix(prefix, matrix);
    }

    auto to_local_prenex([[maybe_unused]] const SignatureSpec & sig, const FormulaPtr & f) -> FormulaPtr
    {
        auto cls = classify(f);
        if (! cls.positive || ! cls.local)
            throw ClassMismatch("local prenex form needs a local positive formula");
        auto renamed = rename_apart(f);
        std::vector<PrenexStep> prefix;
        auto matrix = pull_prefix(renamed, prefix);
        return rebuild_prefix(prefix, matrix);
    }

    auto semantically_equivalent(const FiniteStructure & m, const FormulaPtr & f, const FormulaPtr & g)
        -> bool
    {
        auto fv = free_variables(f);
        for (const auto & [name, sort] : free_variables(g))
            if (! fv.count(name))
                fv[name] = sort;
        std::vector<std::pair<std::string, int>> vars(fv.begin(), fv.end());
        return definable_set(m, f, vars) == definable_set(m, g, vars);
    }
}
