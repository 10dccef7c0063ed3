#include <locus/errors.hpp>
#include <locus/eval.hpp>
#include <locus/morphism.hpp>

#include <algorithm>

namespace locus
{
    namespace
    {
        struct HomSearch
        {
            const FiniteStructure & a;
            const FiniteStructure & b;
            const HomOptions & options;

            // flattened variable order: (sort, elem) by sort then index
            std::vector<std::pair<int, int>> order;
            std::vector<std::vector<int>> image;       // -1 = unassigned
            std::vector<std::vector<std::vector<std::pair<int, std::size_t>>>> occurs;
            std::vector<std::vector<std::vector<int>>> tuples; // per relation, materialized
            std::vector<Homomorphism> results;

            HomSearch(const FiniteStructure & a_, const FiniteStructure & b_, const HomOptions & options_) :
                a(a_),
                b(b_),
                options(options_)
            {
                if (a.sig->sorts.size() != b.sig->sorts.size() ||
                    a.sig->relations.size() != b.sig->relations.size())
                    throw SignatureMismatch("homomorphism search needs structures over the same signature");

                for (int s = 0; s < int(a.universe.size()); ++s) {
                    image.emplace_back(std::size_t(a.size(s)), -1);
                    for (int e = 0; e < a.size(s); ++e)
                        order.emplace_back(s, e);
                }

                occurs.resize(a.universe.size());
                for (int s = 0; s < int(a.universe.size()); ++s)
                    occurs[std::size_t(s)].resize(std::size_t(a.size(s)));
                tuples.resize(a.sig->relations.size());
                for (int r = 0; r < int(a.sig->relations.size()); ++r) {
                    const auto & profile = a.sig->relations[std::size_t(r)].profile;
                    for (const auto & tuple : a.relations[std::size_t(r)]) {
                        auto index = tuples[std::size_t(r)].size();
                        tuples[std::size_t(r)].push_back(tuple);
                        for (std::size_t k = 0; k < tuple.size(); ++k)
                            occurs[std::size_t(profile[k])][std::size_t(tuple[k])].emplace_back(r, index);
                    }
                }
            }

            auto consistent(int s, int e, int v) const -> bool
            {
                for (int c = 0; c < int(a.sig->constants.size()); ++c)
                    if (a.sig->constants[std::size_t(c)].sort == s && a.constants[std::size_t(c)] == e &&
                        b.constants[std::size_t(c)] != v)
                        return false;

                if (options.injective)
                    for (int e2 = 0; e2 < a.size(s); ++e2)
                        if (e2 != e && image[std::size_t(s)][std::size_t(e2)] == v)
                            return false;

                int nd = int(a.sig->locality[std::size_t(s)].elements.size());
                for (int e2 = 0; e2 < a.size(s); ++e2) {
                    int v2 = e2 == e ? v : image[std::size_t(s)][std::size_t(e2)];
                    if (v2 < 0)
                        continue;
                    for (int d = 0; d < nd; ++d) {
                        if (a.loc_has(s, d, e, e2) && ! b.loc_has(s, d, v, v2))
                            return false;
                        if (e2 != e && a.loc_has(s, d, e2, e) && ! b.loc_has(s, d, v2, v))
                            return false;
                    }
                }

                const auto & profiles = a.sig->relations;
                for (const auto & [r, index] : occurs[std::size_t(s)][std::size_t(e)]) {
                    const auto & tuple = tuples[std::size_t(r)][index];
                    std::vector<int> mapped(tuple.size());
                    bool complete = true;
                    for (std::size_t k = 0; k < tuple.size() && complete; ++k) {
                        int ts = profiles[std::size_t(r)].profile[k];
                        mapped[k] = tuple[k] == e && ts == s ? v : image[std::size_t(ts)][std::size_t(tuple[k])];
                        complete = mapped[k] >= 0;
                    }
                    if (complete && ! b.rel_has(r, mapped))
                        return false;
                }

                return true;
            }

            auto run(std::size_t at) -> bool // true = stop early
            {
                if (at == order.size()) {
                    results.push_back(Homomorphism{image});
                    return options.limit > 0 && int(results.size()) >= options.limit;
                }
                auto [s, e] = order[at];
                auto fixed = options.fixed.find({s, e});
                for (int v = 0; v < b.size(s); ++v) {
                    if (fixed != options.fixed.end() && fixed->second != v)
                        continue;
                    if (! consistent(s, e, v))
                        continue;
                    image[std::size_t(s)][std::size_t(e)] = v;
                    if (run(at + 1))
                        return true;
                    image[std::size_t(s)][std::size_t(e)] = -1;
                }
                return false;
            }
        };
    }

    auto find_homomorphisms(const FiniteStructure & a, const FiniteStructure & b,
        const HomOptions & options) -> std::vector<Homomorphism>
    {
        HomSearch search{a, b, options};
        search.run(0);
        return std::move(search.results);
    }

    auto is_homomorphism(const FiniteStructure & a, const FiniteStructure & b, const Homomorphism & h)
        -> bool
    {
        if (h.map.size() != a.universe.size())
            return false;
        for (int s = 0; s < int(a.universe.size()); ++s) {
            if (int(h.map[std::size_t(s)].size()) != a.size(s))
                return false;
            for (int v : h.map[std::size_t(s)])
                if (v < 0 || v >= b.size(s))
                    return false;
            int nd = int(a.sig->locality[std::size_t(s)].elements.size());
            for (int d = 0; d < nd; ++d)
                for (int x = 0; x < a.size(s); ++x)
                    for (int y = 0; y < a.size(s); ++y)
                        if (a.loc_has(s, d, x, y) && ! b.loc_has(s, d, h(s, x), h(s, y)))
                            return false;
        }
        for (int c = 0; c < int(a.sig->constants.size()); ++c)
            if (h(a.sig->constants[std::size_t(c)].sort, a.constants[std::size_t(c)]) != b.constants[std::size_t(c)])
                return false;
        for (int r = 0; r < int(a.sig->relations.size()); ++r) {
            const auto & profile = a.sig->relations[std::size_t(r)].profile;
            for (const auto & tuple : a.relations[std::size_t(r)]) {
                std::vector<int> mapped(tuple.size());
                for (std::size_t k = 0; k < tuple.size(); ++k)
                    mapped[k] = h(profile[k], tuple[k]);
                if (! b.rel_has(r, mapped))
                    return false;
            }
        }
        return true;
    }

    auto compose(const Homomorphism & inner, const Homomorphism & outer) -> Homomorphism
    {
        Homomorphism h;
        h.map.resize(inner.map.size());
        for (std::size_t s = 0; s < inner.map.size(); ++s)
            for (int v : inner.map[s])
                h.map[s].push_back(outer.map[s][std::size_t(v)]);
        return h;
    }

    auto identity_homomorphism(const FiniteStructure & m) -> Homomorphism
    {
        Homomorphism h;
        h.map.resize(m.universe.size());
        for (int s = 0; s < int(m.universe.size()); ++s)
            for (int e = 0; e < m.size(s); ++e)
                h.map[std::size_t(s)].push_back(e);
        return h;
    }

    auto are_isomorphic(const FiniteStructure & a, const FiniteStructure & b)
        -> std::optional<Homomorphism>
    {
        for (std::size_t s = 0; s < a.universe.size(); ++s)
            if (a.universe[s].size() != b.universe[s].size())
                return std::nullopt;
        HomOptions options;
        options.injective = true;
        for (const auto & h : find_homomorphisms(a, b, options)) {
            Homomorphism inverse;
            inverse.map.resize(b.universe.size());
            for (int s = 0; s < int(b.universe.size()); ++s) {
                inverse.map[std::size_t(s)].assign(std::size_t(b.size(s)), -1);
                for (int e = 0; e < a.size(s); ++e)
                    inverse.map[std::size_t(s)][std::size_t(h(s, e))] = e;
            }
            if (is_homomorphism(b, a, inverse))
                return h;
        }
        return std::nullopt;
    }

    auto reflection_diagram(const FiniteStructure & a, const FiniteStructure & b,
        const Homomorphism & h) -> std::pair<FormulaPtr, std::map<std::string, int>>
    {
        const auto & sig = *b.sig;

        // binding levels: 0 for free variables (image representatives and
        // merged preimages), then one per existential in universe order
        std::vector<std::vector<std::string>> var_of(sig.sorts.size());
        std::vector<std::vector<int>> level_of(sig.sorts.size());
        std::map<std::string, int> assignment;
        std::vector<std::pair<std::string, int>> existentials; // name, sort

        std::vector<FormulaPtr> merged_equalities;
        for (int s = 0; s < int(sig.sorts.size()); ++s) {
            var_of[std::size_t(s)].resize(std::size_t(b.size(s)));
            level_of[std::size_t(s)].assign(std::size_t(b.size(s)), 0);
            std::vector<std::vector<int>> preimages(std::size_t(b.size(s)));
            for (int e = 0; e < a.size(s); ++e)
                preimages[std::size_t(h(s, e))].push_back(e);
            for (int v = 0; v < b.size(s); ++v) {
                if (preimages[std::size_t(v)].empty())
                    continue;
                int rep = preimages[std::size_t(v)][0];
                auto rep_name = "u" + std::to_string(s) + "_" + std::to_string(rep);
                var_of[std::size_t(s)][std::size_t(v)] = rep_name;
                assignment[rep_name] = rep;
                for (std::size_t k = 1; k < preimages[std::size_t(v)].size(); ++k) {
                    int other = preimages[std::size_t(v)][k];
                    auto other_name = "u" + std::to_string(s) + "_" + std::to_string(other);
                    assignment[other_name] = other;
                    merged_equalities.push_back(
                        equal(make_var(rep_name, s), make_var(other_name, s)));
                }
            }
        }
        for (int s = 0; s < int(sig.sorts.size()); ++s)
            for (int v = 0; v < b.size(s); ++v)
                if (var_of[std::size_t(s)][std::size_t(v)].empty()) {
                    auto name = "z" + std::to_string(s) + "_" + std::to_string(v);
                    var_of[std::size_t(s)][std::size_t(v)] = name;
                    existentials.emplace_back(name, s);
                    level_of[std::size_t(s)][std::size_t(v)] = int(existentials.size());
                }

        // bucket the codomain's atomic facts by the last-bound variable
        std::vector<std::vector<FormulaPtr>> buckets(existentials.size() + 1);
        auto term_for = [&](int s, int v) { return make_var(var_of[std::size_t(s)][std::size_t(v)], s); };
        auto place = [&](FormulaPtr atom_f, int level) { buckets[std::size_t(level)].push_back(std::move(atom_f)); };

        for (const auto & eq : merged_equalities)
            place(eq, 0);

        for (int c = 0; c < int(sig.constants.size()); ++c) {
            int s = sig.constants[std::size_t(c)].sort;
            int v = b.constants[std::size_t(c)];
            place(equal(term_for(s, v), make_const(sig, c)), level_of[std::size_t(s)][std::size_t(v)]);
        }

        for (int r = 0; r < int(sig.relations.size()); ++r) {
            const auto & profile = sig.relations[std::size_t(r)].profile;
            for (const auto & tuple : b.relations[std::size_t(r)]) {
                std::vector<Term> args;
                int level = 0;
                for (std::size_t k = 0; k < tuple.size(); ++k) {
                    args.push_back(term_for(profile[k], tuple[k]));
                    level = std::max(level, level_of[std::size_t(profile[k])][std::size_t(tuple[k])]);
                }
                place(atom(r, args), level);
            }
        }

        for (int s = 0; s < int(sig.sorts.size()); ++s) {
            const auto & monoid = sig.locality[std::size_t(s)];
            for (int d = 0; d < int(monoid.elements.size()); ++d) {
                if (d == monoid.identity)
                    continue;
                for (int x = 0; x < b.size(s); ++x)
                    for (int y = 0; y < b.size(s); ++y)
                        if (b.loc_has(s, d, x, y))
                            place(loc_atom(s, d, term_for(s, x), term_for(s, y)),
                                std::max(level_of[std::size_t(s)][std::size_t(x)],
                                    level_of[std::size_t(s)][std::size_t(y)]));
            }
        }

        auto body = conj(std::move(buckets.back()));
        for (int level = int(existentials.size()) - 1; level >= 0; --level) {
            const auto & [name, s] = existentials[std::size_t(level)];
            auto inner = exists(name, s, body);
            auto conjuncts = std::move(buckets[std::size_t(level)]);
            conjuncts.push_back(std::move(inner));
            body = conj(std::move(conjuncts));
        }

        return {body, assignment};
    }

    auto is_positive_embedding(const FiniteStructure & a, const FiniteStructure & b,
        const Homomorphism & h, EmbeddingMode mode, const Fragment * fragment) -> EmbeddingReport
    {
        EmbeddingReport report;

        switch (mode) {
        case EmbeddingMode::Retraction: {
            HomOptions options;
            options.limit = 1;
            bool merged = false;
            for (int s = 0; s < int(a.universe.size()); ++s)
                for (int e = 0; e < a.size(s); ++e) {
                    auto [it, inserted] = options.fixed.emplace(std::make_pair(s, h(s, e)), e);
                    merged = merged || (! inserted && it->second != e);
                }
            if (merged)
                return report; // merged elements admit no retraction
            auto retractions = find_homomorphisms(b, a, options);
            if (! retractions.empty()) {
                report.is_embedding = true;
                report.retraction = retractions.front();
            }
            return report;
        }

        case EmbeddingMode::DiagramFormula: {
            auto [formula, assignment] = reflection_diagram(a, b, h);
            report.diagram = formula;
            report.is_embedding = evaluate(a, formula, assignment);
            return report;
        }

        case EmbeddingMode::FragmentSweep: {
            if (! fragment)
                throw BadInput("fragment sweep needs a fragment");
            const auto & vars = fragment->free_variables;
            auto formulas = enumerate_fragment(*a.sig, *fragment);
            Evaluator eval_a{a}, eval_b{b};

            std::vector<int> tuple(vars.size(), 0);
            while (true) {
                Assignment asg_a, asg_b;
                for (std::size_t k = 0; k < vars.size(); ++k) {
                    asg_a[vars[k].first] = tuple[k];
                    asg_b[vars[k].first] = h(vars[k].second, tuple[k]);
                }
                for (const auto & f : formulas)
                    if (eval_b.evaluate(f, asg_b) && ! eval_a.evaluate(f, asg_a)) {
                        report.failing_formula = f;
                        report.failing_tuple = tuple;
                        return report;
                    }
                std::size_t k = 0;
                for (; k < tuple.size(); ++k) {
                    if (++tuple[k] < a.size(vars[k].second))
                        break;
                    tuple[k] = 0;
                }
                if (k == tuple.size())
                    break;
            }
            report.is_embedding = true;
            return report;
        }
        }
        throw BadInput("unreachable embedding mode");
    }

    auto check_locally_positively_closed(const FiniteStructure & m,
        const std::vector<FiniteStructure> & catalogue) -> PcReport
    {
        PcReport report;
        for (int n = 0; n < int(catalogue.size()); ++n) {
            for (const auto & h : find_homomorphisms(m, catalogue[std::size_t(n)])) {
                ++report.homs_checked;
                if (! is_positive_embedding(m, catalogue[std::size_t(n)], h, EmbeddingMode::Retraction)
                          .is_embedding) {
                    report.closed = false;
                    report.counterexample = PcCounterexample{n, h};
                    return report;
                }
            }
        }
        return report;
    }

    auto isolation_certificate(const FiniteStructure & m, int sort, int elem, const Fragment & fragment)
        -> std::optional<FormulaPtr>
    {
        if (fragment.free_variables.size() != 1 || fragment.free_variables[0].second != sort)
            throw BadInput("isolation needs a fragment with one free variable of the element's sort");
        if (fragment.cls != FragmentClass::Positive && fragment.cls != FragmentClass::PrimitivePositive &&
            fragment.cls != FragmentClass::LocalPositive &&
            fragment.cls != FragmentClass::LocalPrimitivePositive)
            throw ClassMismatch("isolation certificates must be positive");

        const auto & var = fragment.free_variables[0].first;
        Evaluator eval{m};
        for (const auto & f : enumerate_fragment(*m.sig, fragment)) {
            if (! free_variables(f).count(var))
                continue;
            bool unique = true;
            for (int e = 0; e < m.size(sort) && unique; ++e) {
                bool holds = eval.evaluate(f, {{var, e}});
                unique = holds == (e == elem);
            }
            if (unique)
                return f;
        }
        return std::nullopt;
    }
}
