#include <locus/errors.hpp>
#include <locus/eval.hpp>
#include <locus/fragment.hpp>

namespace locus
{
    Evaluator::Evaluator(const FiniteStructure & m) :
        _m(m)
    {
    }

    auto Evaluator::free_vars_of(const FormulaPtr & f) -> const std::map<std::string, int> &
    {
        auto it = _free_vars.find(f);
        if (it == _free_vars.end())
            it = _free_vars.emplace(f, free_variables(f)).first;
        return it->second;
    }

    auto Evaluator::term_value(const Term & t, const Assignment & env) const -> int
    {
        if (t.kind == Term::Kind::Constant)
            return _m.constants.at(std::size_t(t.constant));
        auto it = env.find(t.name);
        if (it == env.end())
            throw UnboundVariable("variable '" + t.name + "' has no value");
        return it->second;
    }

    auto Evaluator::eval_rec(const FormulaPtr & f, Assignment & env) -> bool
    {
        switch (f->kind) {
        case Formula::Kind::Top: return true;
        case Formula::Kind::Bot: return false;

        case Formula::Kind::Equal: {
            const auto & lhs = f->terms[0], & rhs = f->terms[1];
            if (lhs.sort != rhs.sort)
                throw SortMismatch("equality between distinct sorts");
            return term_value(lhs, env) == term_value(rhs, env);
        }

        case Formula::Kind::Atom: {
            const auto & profile = _m.sig->relations.at(std::size_t(f->rel)).profile;
            if (profile.size() != f->terms.size())
                throw SortMismatch("arity mismatch for relation '" + _m.sig->relations[std::size_t(f->rel)].name + "'");
            std::vector<int> tuple(f->terms.size());
            for (std::size_t k = 0; k < f->terms.size(); ++k) {
                if (f->terms[k].sort != profile[k])
                    throw SortMismatch("argument sort mismatch for relation '" +
                        _m.sig->relations[std::size_t(f->rel)].name + "'");
                tuple[k] = term_value(f->terms[k], env);
            }
            return _m.rel_has(f->rel, tuple);
        }

        case Formula::Kind::LocAtom: {
            if (f->terms[0].sort != f->loc_sort || f->terms[1].sort != f->loc_sort)
                throw SortMismatch("locality atom operands must live in the monoid's sort");
            return _m.loc_has(f->loc_sort, f->loc_elem, term_value(f->terms[0], env),
                term_value(f->terms[1], env));
        }

        case Formula::Kind::And:
            for (const auto & child : f->children)
                if (! eval_rec(child, env))
                    return false;
            return true;

        case Formula::Kind::Or:
            for (const auto & child : f->children)
                if (eval_rec(child, env))
                    return true;
            return false;

        case Formula::Kind::Not:
            return ! eval_rec(f->children[0], env);

        case Formula::Kind::Exists:
        case Formula::Kind::Forall:
        case Formula::Kind::LocalExists: {
            std::vector<int> key;
            const auto & free = free_vars_of(f);
            key.reserve(free.size());
            for (const auto & [name, sort] : free) {
                auto it = env.find(name);
                if (it == env.end())
                    throw UnboundVariable("variable '" + name + "' has no value");
                key.push_back(it->second);
            }
            auto cached = _cache.find({f, key});
            if (cached != _cache.end())
                return cached->second;

            std::vector<int> domain;
            if (f->kind == Formula::Kind::LocalExists)
                domain = ball(_m, f->var_sort, f->loc_elem, term_value(f->anchor, env));
            else {
                domain.resize(std::size_t(_m.size(f->var_sort)));
                for (int e = 0; e < _m.size(f->var_sort); ++e)
                    domain[std::size_t(e)] = e;
            }

            auto shadowed = env.find(f->var);
            std::optional<int> saved;
            if (shadowed != env.end())
                saved = shadowed->second;

            bool result = f->kind == Formula::Kind::Forall;
            for (int e : domain) {
                env[f->var] = e;
                bool child = eval_rec(f->children[0], env);
                if (f->kind == Formula::Kind::Forall ? ! child : child) {
                    result = ! result;
                    break;
                }
            }

            if (saved)
                env[f->var] = *saved;
            else
                env.erase(f->var);

            _cache.emplace(std::make_pair(f, key), result);
            return result;
        }
        }
        throw BadInput("unreachable formula kind");
    }

    auto Evaluator::evaluate(const FormulaPtr & f, const Assignment & assignment) -> bool
    {
        for (const auto & [name, sort] : free_vars_of(f)) {
            auto it = assignment.find(name);
            if (it == assignment.end())
                throw UnboundVariable("free variable '" + name + "' needs a value");
            if (it->second < 0 || it->second >= _m.size(sort))
                throw BadInput("assignment for '" + name + "' is out of range");
        }
        Assignment env = assignment;
        return eval_rec(f, env);
    }

    auto evaluate(const FiniteStructure & m, const FormulaPtr & f, const Assignment & assignment) -> bool
    {
        Evaluator ev{m};
        return ev.evaluate(f, assignment);
    }

    auto definable_set(const FiniteStructure & m, const FormulaPtr & f,
        const std::vector<std::pair<std::string, int>> & variables) -> std::set<std::vector<int>>
    {
        auto free = free_variables(f);
        for (const auto & [name, sort] : free) {
            bool found = false;
            for (const auto & [vname, vsort] : variables)
                if (vname == name) {
                    if (vsort != sort)
                        throw SortMismatch("variable '" + name + "' used at a different sort");
                    found = true;
                }
            if (! found)
                throw UnboundVariable("free variable '" + name + "' not among the tuple variables");
        }

        std::set<std::vector<int>> result;
        Evaluator ev{m};
        std::vector<int> tuple(variables.size(), 0);
        while (true) {
            Assignment assignment;
            for (std::size_t k = 0; k < variables.size(); ++k)
                assignment[variables[k].first] = tuple[k];
            if (ev.evaluate(f, assignment))
                result.insert(tuple);

            std::size_t k = 0;
            for (; k < tuple.size(); ++k) {
                if (++tuple[k] < m.size(variables[k].second))
                    break;
                tuple[k] = 0;
            }
            if (k == tuple.size())
                break;
        }
        return result;
    }

    auto negative_theory_fragment(const FiniteStructure & m, const Fragment & fragment)
        -> std::vector<FormulaPtr>
    {
        std::vector<FormulaPtr> result;
        Evaluator ev{m};
        for (const auto & sentence : enumerate_fragment(*m.sig, fragment))
            if (! ev.evaluate(sentence))
                result.push_back(neg(sentence));
        return result;
    }
}
