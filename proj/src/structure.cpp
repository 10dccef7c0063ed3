#include <locus/errors.hpp>
#include <locus/structure.hpp>

#include <algorithm>

namespace locus
{
    auto FiniteStructure::total_size() const -> int
    {
        int n = 0;
        for (const auto & u : universe)
            n += int(u.size());
        return n;
    }

    auto FiniteStructure::element_index(int sort, const std::string & elem_name) const -> int
    {
        const auto & u = universe.at(std::size_t(sort));
        auto it = std::find(u.begin(), u.end(), elem_name);
        if (it == u.end())
            throw UnknownSymbol("no element '" + elem_name + "' in sort '" + sig->sorts.at(std::size_t(sort)) + "'");
        return int(it - u.begin());
    }

    auto FiniteStructure::min_locality(int sort, int a, int b) const -> std::optional<int>
    {
        const auto & monoid = sig->locality.at(std::size_t(sort));
        std::optional<int> best;
        for (int d = 0; d < int(monoid.elements.size()); ++d) {
            if (! loc_has(sort, d, a, b))
                continue;
            if (! best || monoid.below(d, *best))
                best = d;
        }
        return best;
    }

    auto make_structure(std::shared_ptr<const SignatureSpec> sig,
        const std::vector<std::vector<std::string>> & universe) -> FiniteStructure
    {
        if (universe.size() != sig->sorts.size())
            throw BadInput("universe must list elements for every sort");
        FiniteStructure m;
        m.sig = sig;
        m.universe = universe;
        m.relations.resize(sig->relations.size());
        m.constants.assign(sig->constants.size(), -1);
        m.locality.resize(sig->sorts.size());
        for (std::size_t s = 0; s < sig->sorts.size(); ++s) {
            auto n = universe[s].size();
            m.locality[s].assign(sig->locality[s].elements.size(), std::vector<char>(n * n, 0));
            for (std::size_t a = 0; a < n; ++a)
                m.locality[s][std::size_t(sig->locality[s].identity)][a * n + a] = 1;
        }
        return m;
    }

    namespace
    {
        auto fail(AxiomReport & report, int which, AxiomWitness witness) -> void
        {
            auto & slot = report.axioms[std::size_t(which)];
            if (slot.first) {
                slot.first = false;
                slot.second = std::move(witness);
            }
        }
    }

    auto AxiomReport::all() const -> bool
    {
        for (const auto & [ok, w] : axioms)
            if (! ok)
                return false;
        return true;
    }

    auto AxiomReport::first_failure() const -> std::optional<AxiomWitness>
    {
        for (const auto & [ok, w] : axioms)
            if (! ok)
                return w;
        return std::nullopt;
    }

    auto check_locality_axioms(const FiniteStructure & m) -> AxiomReport
    {
        AxiomReport report;
        const auto & sig = *m.sig;

        for (int s = 0; s < int(sig.sorts.size()); ++s) {
            const auto & monoid = sig.locality[std::size_t(s)];
            int n = m.size(s), nd = int(monoid.elements.size());

            // A1: each locality relation is symmetric.
            for (int d = 0; d < nd && report.pass(0); ++d)
                for (int a = 0; a < n && report.pass(0); ++a)
                    for (int b = 0; b < n; ++b)
                        if (m.loc_has(s, d, a, b) && ! m.loc_has(s, d, b, a)) {
                            fail(report, 0, {"A1", s, {a, b}, {d}, {},
                                monoid.elements[std::size_t(d)] + " holds one way only"});
                            break;
                        }

            // A2: d1 below d2 implies containment of interpretations.
            for (int d1 = 0; d1 < nd && report.pass(1); ++d1)
                for (int d2 = 0; d2 < nd && report.pass(1); ++d2) {
                    if (d1 == d2 || ! monoid.below(d1, d2))
                        continue;
                    for (int a = 0; a < n && report.pass(1); ++a)
                        for (int b = 0; b < n; ++b)
                            if (m.loc_has(s, d1, a, b) && ! m.loc_has(s, d2, a, b)) {
                                fail(report, 1, {"A2", s, {a, b}, {d1, d2}, {},
                                    monoid.elements[std::size_t(d1)] + " not contained in " +
                                        monoid.elements[std::size_t(d2)]});
                                break;
                            }
                }

            // A3: composing along a middle element lands in the monoid product.
            for (int d1 = 0; d1 < nd && report.pass(2); ++d1)
                for (int d2 = 0; d2 < nd && report.pass(2); ++d2) {
                    int d12 = monoid.compose(d1, d2);
                    for (int a = 0; a < n && report.pass(2); ++a)
                        for (int b = 0; b < n && report.pass(2); ++b) {
                            if (! m.loc_has(s, d1, a, b))
                                continue;
                            for (int c = 0; c < n; ++c)
                                if (m.loc_has(s, d2, b, c) && ! m.loc_has(s, d12, a, c)) {
                                    fail(report, 2, {"A3", s, {a, b, c}, {d1, d2, d12}, {},
                                        "composite pair missing from " +
                                            monoid.elements[std::size_t(d12)]});
                                    break;
                                }
                        }
                }

            // A5: every same-sort pair is related by some element.
            for (int a = 0; a < n && report.pass(4); ++a)
                for (int b = 0; b < n; ++b) {
                    bool related = false;
                    for (int d = 0; d < nd && ! related; ++d)
                        related = m.loc_has(s, d, a, b);
                    if (! related) {
                        fail(report, 4, {"A5", s, {a, b}, {}, {}, "pair related by no locality element"});
                        break;
                    }
                }
        }

        // A4: declared constant bounds hold of the interpretations.
        for (int i = 0; i < int(sig.constants.size()) && report.pass(3); ++i)
            for (int j = i; j < int(sig.constants.size()); ++j) {
                if (sig.constants[std::size_t(i)].sort != sig.constants[std::size_t(j)].sort)
                    continue;
                int s = sig.constants[std::size_t(i)].sort;
                auto declared = sig.bound_for(i, j);
                if (! declared)
                    continue; // incomplete bound map is a signature issue, not A4
                int d = *declared;
                if (! m.loc_has(s, d, m.constants[std::size_t(i)], m.constants[std::size_t(j)])) {
                    fail(report, 3, {"A4", s,
                        {m.constants[std::size_t(i)], m.constants[std::size_t(j)]}, {d}, {i, j},
                        "bound " + sig.locality[std::size_t(s)].elements[std::size_t(d)] +
                            " fails between " + sig.constants[std::size_t(i)].name + " and " +
                            sig.constants[std::size_t(j)].name});
                    break;
                }
            }

        return report;
    }

    auto is_local(const FiniteStructure & m) -> bool
    {
        return check_locality_axioms(m).all();
    }

    auto ball(const FiniteStructure & m, int sort, int elem, int o) -> std::vector<int>
    {
        std::vector<int> result;
        for (int b = 0; b < m.size(sort); ++b)
            if (m.loc_has(sort, elem, o, b))
                result.push_back(b);
        return result;
    }

    auto component_universe(const FiniteStructure & m, const std::vector<int> & base)
        -> std::vector<std::vector<int>>
    {
        if (base.size() != m.universe.size())
            throw BadInput("base point needs one element per sort");
        std::vector<std::vector<int>> subsets(m.universe.size());
        for (int s = 0; s < int(m.universe.size()); ++s) {
            std::vector<char> in(std::size_t(m.size(s)), 0);
            for (int d = 0; d < int(m.sig->locality[std::size_t(s)].elements.size()); ++d)
                for (int b : ball(m, s, d, base[std::size_t(s)]))
                    in[std::size_t(b)] = 1;
            for (int b = 0; b < m.size(s); ++b)
                if (in[std::size_t(b)])
                    subsets[std::size_t(s)].push_back(b);
        }
        return subsets;
    }

    auto induced_substructure(const FiniteStructure & m, const std::vector<std::vector<int>> & subsets)
        -> Substructure
    {
        const auto & sig = *m.sig;
        if (subsets.size() != m.universe.size())
            throw BadInput("need one subset per sort");

        std::vector<std::vector<int>> old_to_new(m.universe.size());
        std::vector<std::vector<std::string>> universe(m.universe.size());
        std::vector<std::vector<int>> embedding(m.universe.size());
        for (int s = 0; s < int(m.universe.size()); ++s) {
            old_to_new[std::size_t(s)].assign(std::size_t(m.size(s)), -1);
            auto sorted = subsets[std::size_t(s)];
            std::sort(sorted.begin(), sorted.end());
            sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
            if (sorted.empty())
                throw EmptySort("induced substructure would empty sort '" + sig.sorts[std::size_t(s)] + "'");
            for (int old : sorted) {
                if (old < 0 || old >= m.size(s))
                    throw BadInput("subset element out of range");
                old_to_new[std::size_t(s)][std::size_t(old)] = int(universe[std::size_t(s)].size());
                universe[std::size_t(s)].push_back(m.universe[std::size_t(s)][std::size_t(old)]);
                embedding[std::size_t(s)].push_back(old);
            }
        }

        Substructure result{make_structure(m.sig, universe), embedding};
        auto & sub = result.structure;
        sub.name = m.name.empty() ? std::string{} : m.name + "|sub";

        for (int c = 0; c < int(sig.constants.size()); ++c) {
            int s = sig.constants[std::size_t(c)].sort;
            int mapped = old_to_new[std::size_t(s)][std::size_t(m.constants[std::size_t(c)])];
            if (mapped < 0)
                throw ConstantsNotContained("constant '" + sig.constants[std::size_t(c)].name +
                    "' falls outside the chosen subset");
            sub.constants[std::size_t(c)] = mapped;
        }

        for (int r = 0; r < int(sig.relations.size()); ++r)
            for (const auto & tuple : m.relations[std::size_t(r)]) {
                std::vector<int> mapped(tuple.size());
                bool inside = true;
                for (std::size_t k = 0; k < tuple.size() && inside; ++k) {
                    int s = sig.relations[std::size_t(r)].profile[k];
                    mapped[k] = old_to_new[std::size_t(s)][std::size_t(tuple[k])];
                    inside = mapped[k] >= 0;
                }
                if (inside)
                    sub.relations[std::size_t(r)].insert(mapped);
            }

        for (int s = 0; s < int(m.universe.size()); ++s) {
            auto n = std::size_t(sub.size(s));
            for (int d = 0; d < int(sig.locality[std::size_t(s)].elements.size()); ++d)
                for (std::size_t a = 0; a < n; ++a)
                    for (std::size_t b = 0; b < n; ++b)
                        if (m.loc_has(s, d, embedding[std::size_t(s)][a], embedding[std::size_t(s)][b]))
                            sub.locality[std::size_t(s)][std::size_t(d)][a * n + b] = 1;
        }

        return result;
    }

    auto covering_ball(const FiniteStructure & m, int sort) -> std::optional<std::pair<int, int>>
    {
        const auto & monoid = m.sig->locality.at(std::size_t(sort));
        for (int o = 0; o < m.size(sort); ++o) {
            std::optional<int> best;
            for (int d = 0; d < int(monoid.elements.size()); ++d) {
                bool covers = true;
                for (int b = 0; b < m.size(sort) && covers; ++b)
                    covers = m.loc_has(sort, d, o, b);
                if (covers && (! best || monoid.below(d, *best)))
                    best = d;
            }
            if (best)
                return std::make_pair(o, *best);
        }
        return std::nullopt;
    }

    auto local_component(const FiniteStructure & m, const std::vector<int> & base) -> Substructure
    {
        auto report = check_locality_axioms(m);
        for (int i : {0, 1, 2, 3})
            if (! report.pass(i))
                throw NotLocal("local component requires A1..A4; " +
                    report.axioms[std::size_t(i)].second->axiom + " fails");

        auto subsets = component_universe(m, base);
        for (int c = 0; c < int(m.sig->constants.size()); ++c) {
            int s = m.sig->constants[std::size_t(c)].sort;
            const auto & subset = subsets[std::size_t(s)];
            if (! std::binary_search(subset.begin(), subset.end(), m.constants[std::size_t(c)]))
                throw ConstantOutsideComponent("constant '" + m.sig->constants[std::size_t(c)].name +
                    "' lies outside every ball at the base point");
        }

        auto result = induced_substructure(m, subsets);
        result.structure.name = m.name.empty() ? std::string{} : m.name + "@component";
        return result;
    }
}
