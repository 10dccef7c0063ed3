#include <locus/errors.hpp>
#include <locus/fragment.hpp>

#include <algorithm>
#include <functional>
#include <map>

namespace locus
{
    auto to_string(FragmentClass cls) -> std::string
    {
        switch (cls) {
        case FragmentClass::Positive: return "positive";
        case FragmentClass::PrimitivePositive: return "pp";
        case FragmentClass::LocalPositive: return "local-positive";
        case FragmentClass::LocalPrimitivePositive: return "local-pp";
        case FragmentClass::Local: return "local";
        case FragmentClass::QuantifierFree: return "quantifier-free";
        }
        return "?";
    }

    auto fragment_class_from_string(const std::string & name) -> FragmentClass
    {
        for (auto cls : {FragmentClass::Positive, FragmentClass::PrimitivePositive,
                 FragmentClass::LocalPositive, FragmentClass::LocalPrimitivePositive,
                 FragmentClass::Local, FragmentClass::QuantifierFree})
            if (to_string(cls) == name)
                return cls;
        throw BadInput("unknown fragment class '" + name + "'");
    }

    namespace
    {
        struct ClassShape
        {
            bool allow_or, allow_not, allow_exists, allow_local_exists, allow_local_dual;
        };

        auto shape_of(FragmentClass cls) -> ClassShape
        {
            switch (cls) {
            case FragmentClass::Positive: return {true, false, true, true, false};
            case FragmentClass::PrimitivePositive: return {false, false, true, true, false};
            case FragmentClass::LocalPositive: return {true, false, false, true, false};
            case FragmentClass::LocalPrimitivePositive: return {false, false, false, true, false};
            case FragmentClass::Local: return {true, true, false, true, true};
            case FragmentClass::QuantifierFree: return {true, true, false, false, false};
            }
            throw BadInput("unknown fragment class");
        }

        using VarContext = std::vector<std::pair<std::string, int>>;

        // -1 when absent; element_index throws, which would abort the scan
        // over sorts whose monoid simply lacks the name
        auto loc_index_of(const LocalityMonoid & monoid, const std::string & name) -> int
        {
            for (int i = 0; i < monoid.size(); ++i)
                if (monoid.elements[std::size_t(i)] == name)
                    return i;
            return -1;
        }

        // largest connective width occurring strictly inside a quantifier scope
        auto body_connective_width(const FormulaPtr & f) -> int
        {
            std::function<auto(const FormulaPtr &, bool)->int> walk =
                [&](const FormulaPtr & g, bool inside) -> int {
                int w = 0;
                if (inside && (g->kind == Formula::Kind::And || g->kind == Formula::Kind::Or))
                    w = int(g->children.size());
                bool now = inside || g->kind == Formula::Kind::Exists ||
                    g->kind == Formula::Kind::Forall || g->kind == Formula::Kind::LocalExists;
                for (const auto & child : g->children)
                    w = std::max(w, walk(child, now));
                return w;
            };
            return walk(f, false);
        }

        struct Generator
        {
            const SignatureSpec & sig;
            const Fragment & frag;
            ClassShape shape;
            std::vector<char> rel_ok;
            std::vector<std::vector<char>> loc_ok;
            std::vector<std::string> bound_names;

            Generator(const SignatureSpec & sig_, const Fragment & frag_) :
                sig(sig_),
                frag(frag_),
                shape(shape_of(frag_.cls))
            {
                rel_ok.assign(sig.relations.size(), frag.allowed_relations.empty() ? 1 : 0);
                for (const auto & name : frag.allowed_relations) {
                    auto r = sig.relation_index(name);
                    if (! r)
                        throw UnknownSymbol("fragment allows unknown relation '" + name + "'");
                    rel_ok[std::size_t(*r)] = 1;
                }

                loc_ok.resize(sig.sorts.size());
                for (std::size_t s = 0; s < sig.sorts.size(); ++s)
                    loc_ok[s].assign(sig.locality[s].elements.size(), frag.allowed_locality.empty() ? 1 : 0);
                for (const auto & name : frag.allowed_locality) {
                    bool found = false;
                    for (std::size_t s = 0; s < sig.sorts.size(); ++s) {
                        int e = loc_index_of(sig.locality[s], name);
                        if (e >= 0) {
                            loc_ok[s][std::size_t(e)] = 1;
                            found = true;
                        }
                    }
                    if (! found)
                        throw UnknownSymbol("fragment allows unknown locality element '" + name + "'");
                }

                // canonical bound variable names, one per nesting level,
                // dodging the free variable context
                for (int level = 0; level < std::max(0, frag.max_quantifier_depth); ++level) {
                    auto name = "x" + std::to_string(level);
                    while (std::any_of(frag.free_variables.begin(), frag.free_variables.end(),
                        [&](const auto & fv) { return fv.first == name; }))
                        name += "'";
                    bound_names.push_back(name);
                }
            }

            auto terms_of_sort(const VarContext & vars, int sort) const -> std::vector<Term>
            {
                std::vector<Term> terms;
                for (const auto & [name, vsort] : vars)
                    if (vsort == sort)
                        terms.push_back(make_var(name, sort));
                for (int c = 0; c < int(sig.constants.size()); ++c)
                    if (sig.constants[std::size_t(c)].sort == sort)
                        terms.push_back(make_const(sig, c));
                return terms;
            }

            auto atoms(const VarContext & vars) const -> std::vector<FormulaPtr>
            {
                std::vector<FormulaPtr> out;
                out.push_back(top());
                if (shape.allow_or)
                    out.push_back(bot());

                for (int s = 0; s < int(sig.sorts.size()); ++s) {
                    auto terms = terms_of_sort(vars, s);
                    for (std::size_t i = 0; i < terms.size(); ++i)
                        for (std::size_t j = i; j < terms.size(); ++j)
                            out.push_back(equal(terms[i], terms[j]));
                }

                for (int r = 0; r < int(sig.relations.size()); ++r) {
                    if (! rel_ok[std::size_t(r)])
                        continue;
                    const auto & profile = sig.relations[std::size_t(r)].profile;
                    std::vector<std::vector<Term>> pools;
                    bool feasible = true;
                    for (int s : profile) {
                        pools.push_back(terms_of_sort(vars, s));
                        feasible = feasible && ! pools.back().empty();
                    }
                    if (! feasible)
                        continue;
                    std::vector<std::size_t> pick(profile.size(), 0);
                    while (true) {
                        std::vector<Term> args;
                        for (std::size_t k = 0; k < pick.size(); ++k)
                            args.push_back(pools[k][pick[k]]);
                        out.push_back(atom(r, args));
                        std::size_t k = 0;
                        for (; k < pick.size(); ++k) {
                            if (++pick[k] < pools[k].size())
                                break;
                            pick[k] = 0;
                        }
                        if (k == pick.size())
                            break;
                    }
                }

                for (int s = 0; s < int(sig.sorts.size()); ++s) {
                    const auto & monoid = sig.locality[std::size_t(s)];
                    auto terms = terms_of_sort(vars, s);
                    for (int d = 0; d < int(monoid.elements.size()); ++d) {
                        if (d == monoid.identity || ! loc_ok[std::size_t(s)][std::size_t(d)])
                            continue;
                        for (std::size_t i = 0; i < terms.size(); ++i)
                            for (std::size_t j = i; j < terms.size(); ++j)
                                out.push_back(loc_atom(s, d, terms[i], terms[j]));
                    }
                }

                return out;
            }

            auto combos(const std::vector<FormulaPtr> & pool, int arity_max,
                const std::function<auto(std::vector<FormulaPtr>)->FormulaPtr> & build,
                std::vector<FormulaPtr> & out) const -> void
            {
                std::vector<int> pick;
                std::function<auto(int, int)->void> rec = [&](int start, int remaining) {
                    if (int(pick.size()) >= 2) {
                        std::vector<FormulaPtr> children;
                        for (int i : pick)
                            children.push_back(pool[std::size_t(i)]);
                        out.push_back(build(children));
                    }
                    if (remaining == 0)
                        return;
                    for (int i = start; i < int(pool.size()); ++i) {
                        pick.push_back(i);
                        rec(i + 1, remaining - 1);
                        pick.pop_back();
                    }
                };
                rec(0, std::min(arity_max, int(pool.size())));
            }

            auto generate(const VarContext & vars, int depth, int level) const -> std::vector<FormulaPtr>
            {
                std::vector<FormulaPtr> pool = atoms(vars);
                if (shape.allow_not) {
                    auto n = pool.size();
                    for (std::size_t i = 0; i < n; ++i)
                        if (pool[i]->kind != Formula::Kind::Top && pool[i]->kind != Formula::Kind::Bot)
                            pool.push_back(neg(pool[i]));
                }

                if (depth > 0 && (shape.allow_exists || shape.allow_local_exists)) {
                    const auto & bound = bound_names[std::size_t(level)];
                    for (int s = 0; s < int(sig.sorts.size()); ++s) {
                        auto inner = vars;
                        inner.emplace_back(bound, s);
                        auto bodies = generate(inner, depth - 1, level + 1);
                        auto anchors = terms_of_sort(vars, s);
                        const auto & monoid = sig.locality[std::size_t(s)];
                        for (const auto & body : bodies) {
                            if (! free_variables(body).count(bound))
                                continue;
                            if (shape.allow_exists)
                                pool.push_back(exists(bound, s, body));
                            if (shape.allow_local_exists || shape.allow_local_dual)
                                for (int d = 0; d < int(monoid.elements.size()); ++d) {
                                    if (d == monoid.identity || ! loc_ok[std::size_t(s)][std::size_t(d)])
                                        continue;
                                    for (const auto & anchor : anchors) {
                                        if (shape.allow_local_exists)
                                            pool.push_back(local_exists(bound, s, d, anchor, body));
                                        if (shape.allow_local_dual)
                                            pool.push_back(
                                                neg(local_exists(bound, s, d, anchor, neg(body))));
                                    }
                                }
                        }
                    }
                }

                int width = level == 0 || frag.max_body_width < 0
                    ? frag.max_connective_width
                    : std::min(frag.max_connective_width, frag.max_body_width);
                if (width >= 2) {
                    std::vector<FormulaPtr> plain;
                    for (const auto & f : pool)
                        if (f->kind != Formula::Kind::Top && f->kind != Formula::Kind::Bot)
                            plain.push_back(f);

                    std::vector<FormulaPtr> ands, ors;
                    combos(plain, width,
                        [](std::vector<FormulaPtr> cs) { return conj(std::move(cs)); }, ands);
                    if (shape.allow_or)
                        combos(plain, width,
                            [](std::vector<FormulaPtr> cs) { return disj(std::move(cs)); }, ors);

                    // second connective layer: mix the first layer's opposite
                    // connective back in
                    std::vector<FormulaPtr> layer2;
                    if (shape.allow_or && ! ors.empty()) {
                        auto mixed = plain;
                        mixed.insert(mixed.end(), ors.begin(), ors.end());
                        std::vector<FormulaPtr> deep;
                        combos(mixed, width,
                            [](std::vector<FormulaPtr> cs) { return conj(std::move(cs)); }, deep);
                        for (auto & f : deep)
                            layer2.push_back(std::move(f));
                    }
                    if (shape.allow_or && ! ands.empty()) {
                        auto mixed = plain;
                        mixed.insert(mixed.end(), ands.begin(), ands.end());
                        std::vector<FormulaPtr> deep;
                        combos(mixed, width,
                            [](std::vector<FormulaPtr> cs) { return disj(std::move(cs)); }, deep);
                        for (auto & f : deep)
                            layer2.push_back(std::move(f));
                    }

                    for (auto & f : ands)
                        pool.push_back(std::move(f));
                    for (auto & f : ors)
                        pool.push_back(std::move(f));
                    for (auto & f : layer2)
                        pool.push_back(std::move(f));
                }

                return pool;
            }
        };
    }

    auto enumerate_fragment(const SignatureSpec & sig, const Fragment & fragment)
        -> std::vector<FormulaPtr>
    {
        if (fragment.max_quantifier_depth < 0 || fragment.max_connective_width < 1)
            throw BadInput("fragment measures must be nonnegative");
        for (const auto & [name, sort] : fragment.free_variables)
            if (sort < 0 || sort >= int(sig.sorts.size()))
                throw BadInput("fragment free variable '" + name + "' has an invalid sort");

        Generator gen{sig, fragment};
        auto raw = gen.generate(fragment.free_variables, fragment.max_quantifier_depth, 0);

        std::vector<FormulaPtr> out;
        std::set<std::string> seen;
        for (const auto & f : raw) {
            if (quantifier_depth(f) > fragment.max_quantifier_depth ||
                connective_width(f) > fragment.max_connective_width)
                continue;
            if (fragment.max_body_width >= 0 && body_connective_width(f) > fragment.max_body_width)
                continue;
            auto key = print(sig, f);
            if (seen.insert(key).second)
                out.push_back(f);
        }

        std::stable_sort(out.begin(), out.end(), [](const FormulaPtr & a, const FormulaPtr & b) {
            auto da = quantifier_depth(a), db = quantifier_depth(b);
            if (da != db)
                return da < db;
            return connective_width(a) < connective_width(b);
        });
        return out;
    }

    auto relations_used(const FormulaPtr & f) -> std::set<int>
    {
        std::set<int> out;
        std::function<auto(const FormulaPtr &)->void> walk = [&](const FormulaPtr & g) {
            if (g->kind == Formula::Kind::Atom)
                out.insert(g->rel);
            for (const auto & child : g->children)
                walk(child);
        };
        walk(f);
        return out;
    }

    auto locality_used(const FormulaPtr & f) -> std::set<std::pair<int, int>>
    {
        std::set<std::pair<int, int>> out;
        std::function<auto(const FormulaPtr &)->void> walk = [&](const FormulaPtr & g) {
            if (g->kind == Formula::Kind::LocAtom)
                out.emplace(g->loc_sort, g->loc_elem);
            if (g->kind == Formula::Kind::LocalExists)
                out.emplace(g->var_sort, g->loc_elem);
            for (const auto & child : g->children)
                walk(child);
        };
        walk(f);
        return out;
    }

    auto fragment_contains(const SignatureSpec & sig, const Fragment & fragment, const FormulaPtr & f)
        -> bool
    {
        auto cls = classify(f);
        bool shape_ok = false;
        switch (fragment.cls) {
        case FragmentClass::Positive: shape_ok = cls.positive; break;
        case FragmentClass::PrimitivePositive: shape_ok = cls.primitive_positive; break;
        case FragmentClass::LocalPositive: shape_ok = cls.positive && cls.local; break;
        case FragmentClass::LocalPrimitivePositive: shape_ok = cls.primitive_positive && cls.local; break;
        case FragmentClass::Local: shape_ok = cls.local; break;
        case FragmentClass::QuantifierFree: shape_ok = cls.quantifier_free; break;
        }
        if (! shape_ok)
            return false;

        if (quantifier_depth(f) > fragment.max_quantifier_depth)
            return false;
        if (connective_width(f) > fragment.max_connective_width)
            return false;
        if (fragment.max_body_width >= 0 && body_connective_width(f) > fragment.max_body_width)
            return false;

        for (const auto & [name, sort] : free_variables(f)) {
            bool found = false;
            for (const auto & [vname, vsort] : fragment.free_variables)
                if (vname == name && vsort == sort)
                    found = true;
            if (! found)
                return false;
        }

        if (! fragment.allowed_relations.empty()) {
            std::set<int> allowed;
            for (const auto & name : fragment.allowed_relations)
                if (auto r = sig.relation_index(name))
                    allowed.insert(*r);
            for (int r : relations_used(f))
                if (! allowed.count(r))
                    return false;
        }

        if (! fragment.allowed_locality.empty()) {
            std::set<std::pair<int, int>> allowed;
            for (const auto & name : fragment.allowed_locality)
                for (int s = 0; s < int(sig.sorts.size()); ++s) {
                    int e = loc_index_of(sig.locality[std::size_t(s)], name);
                    if (e >= 0)
                        allowed.emplace(s, e);
                }
            for (const auto & use : locality_used(f)) {
                if (use.second == sig.locality[std::size_t(use.first)].identity)
                    continue;
                if (! allowed.count(use))
                    return false;
            }
        }

        return true;
    }
}
