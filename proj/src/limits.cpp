#include <locus/errors.hpp>
#include <locus/limits.hpp>
#include <locus/normalize.hpp>

#include <algorithm>
#include <numeric>
#include <string>

namespace locus
{
    namespace
    {
        auto triple_message(const std::string & what, int i, int j, int k = -1) -> std::string
        {
            auto out = what + " at (" + std::to_string(i) + ", " + std::to_string(j);
            if (k >= 0)
                out += ", " + std::to_string(k);
            return out + ")";
        }

        struct UnionFind
        {
            std::vector<int> parent;

            explicit UnionFind(std::size_t n) : parent(n)
            {
                std::iota(parent.begin(), parent.end(), 0);
            }

            auto find(int x) -> int
            {
                while (parent[std::size_t(x)] != x) {
                    parent[std::size_t(x)] = parent[std::size_t(parent[std::size_t(x)])];
                    x = parent[std::size_t(x)];
                }
                return x;
            }

            auto unite(int a, int b) -> void
            {
                parent[std::size_t(find(a))] = find(b);
            }
        };

        auto forall_closure(const FormulaPtr & f) -> FormulaPtr
        {
            auto out = f;
            auto vars = free_variables(f);
            for (auto it = vars.rbegin(); it != vars.rend(); ++it)
                out = forall(it->first, it->second, out);
            return out;
        }

        // existential after desugaring: plain exists prefix over a
        // quantifier-free matrix
        auto is_existential(const SignatureSpec & sig, const FormulaPtr & f) -> bool
        {
            auto g = desugar(sig, f);
            while (g->kind == Formula::Kind::Exists)
                g = g->children.front();
            return classify(g).quantifier_free;
        }

        // tuples in member i mapping onto the limit tuple under the
        // coprojection, with the member satisfying phi at one of them
        auto member_realizes(const FiniteStructure & m, const Homomorphism & coproj,
            const FormulaPtr & phi, const std::vector<std::pair<std::string, int>> & vars,
            const std::vector<int> & target) -> bool
        {
            Evaluator ev{m};
            std::vector<int> tuple(vars.size(), 0);
            while (true) {
                bool matches = true;
                for (std::size_t k = 0; k < vars.size() && matches; ++k)
                    matches = coproj(vars[k].second, tuple[k]) == target[k];
                if (matches) {
                    Assignment env;
                    for (std::size_t k = 0; k < vars.size(); ++k)
                        env[vars[k].first] = tuple[k];
                    if (ev.evaluate(phi, env))
                        return true;
                }
                std::size_t k = 0;
                for (; k < vars.size(); ++k) {
                    if (++tuple[k] < m.size(vars[k].second))
                        break;
                    tuple[k] = 0;
                }
                if (k == vars.size())
                    return false;
            }
        }
    }

    auto validate_direct_system(const DirectSystem & sys) -> void
    {
        int n = int(sys.structures.size());
        if (n == 0)
            throw BadInput("direct system needs at least one structure");
        for (int i = 1; i < n; ++i)
            if (! (sys.structures[0].sig == sys.structures[std::size_t(i)].sig ||
                    *sys.structures[0].sig == *sys.structures[std::size_t(i)].sig))
                throw SignatureMismatch("direct system members disagree on the signature");

        for (const auto & [key, f] : sys.maps) {
            auto [i, j] = key;
            if (i < 0 || i >= n || j < 0 || j >= n)
                throw IncoherentSystem(triple_message("map index out of range", i, j));
            if (i == j && ! (f == identity_homomorphism(sys.structures[std::size_t(i)])))
                throw IncoherentSystem(triple_message("self map is not the identity", i, j));
            if (! is_homomorphism(sys.structures[std::size_t(j)], sys.structures[std::size_t(i)], f))
                throw IncoherentSystem(triple_message("connecting map is not a homomorphism", i, j));
        }

        for (const auto & [kij, fij] : sys.maps)
            for (const auto & [kjk, fjk] : sys.maps) {
                if (kij.second != kjk.first)
                    continue;
                auto [i, j] = kij;
                int k = kjk.second;
                if (i == j || j == k)
                    continue;
                auto it = sys.maps.find({i, k});
                if (it == sys.maps.end())
                    throw IncoherentSystem(triple_message("missing composite map", i, j, k));
                if (! (compose(fjk, fij) == it->second))
                    throw IncoherentSystem(triple_message("incoherent composite", i, j, k));
            }

        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                bool bounded = false;
                for (int k = 0; k < n && ! bounded; ++k)
                    bounded = sys.above(k, i) && sys.above(k, j);
                if (! bounded)
                    throw IncoherentSystem(triple_message("no upper bound for pair", i, j));
            }
    }

    auto direct_limit(const DirectSystem & sys) -> LimitResult
    {
        validate_direct_system(sys);
        const auto & sig = *sys.structures.front().sig;
        int n = int(sys.structures.size());

        // top index: above every other (unique by antisymmetry)
        int top = -1;
        for (int i = 0; i < n && top < 0; ++i) {
            bool above_all = true;
            for (int j = 0; j < n && above_all; ++j)
                above_all = sys.above(i, j);
            if (above_all)
                top = i;
        }
        if (top < 0)
            throw IncoherentSystem("directed finite order has no greatest index");

        // flat node ids over the disjoint union
        std::vector<std::vector<int>> base(static_cast<std::size_t>(n)); // per index, per sort
        int nodes = 0;
        for (int i = 0; i < n; ++i)
            for (std::size_t s = 0; s < sig.sorts.size(); ++s) {
                base[std::size_t(i)].push_back(nodes);
                nodes += sys.structures[std::size_t(i)].size(int(s));
            }
        auto node = [&](int i, int s, int e) {
            return base[std::size_t(i)][std::size_t(s)] + e;
        };

        UnionFind uf{std::size_t(nodes)};
        for (const auto & [key, f] : sys.maps) {
            auto [i, j] = key;
            if (i == j)
                continue;
            for (std::size_t s = 0; s < sig.sorts.size(); ++s)
                for (int e = 0; e < sys.structures[std::size_t(j)].size(int(s)); ++e)
                    uf.unite(node(j, int(s), e), node(i, int(s), f(int(s), e)));
        }

        // every class meets the top structure exactly once; name and order
        // classes by their top representative
        std::vector<std::vector<int>> class_of(static_cast<std::size_t>(n));
        std::map<int, int> root_to_class;
        std::vector<std::vector<std::string>> universe(sig.sorts.size());
        for (std::size_t s = 0; s < sig.sorts.size(); ++s)
            for (int e = 0; e < sys.structures[std::size_t(top)].size(int(s)); ++e) {
                int root = uf.find(node(top, int(s), e));
                if (root_to_class.count(root))
                    throw std::logic_error("direct limit merged two elements of the top structure");
                root_to_class[root] = int(universe[s].size());
                universe[s].push_back(sys.structures[std::size_t(top)].universe[s][std::size_t(e)]);
            }

        auto limit = make_structure(sys.structures.front().sig, universe);

        std::vector<Homomorphism> coprojections(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            coprojections[std::size_t(i)].map.resize(sig.sorts.size());
            for (std::size_t s = 0; s < sig.sorts.size(); ++s)
                for (int e = 0; e < sys.structures[std::size_t(i)].size(int(s)); ++e) {
                    auto it = root_to_class.find(uf.find(node(i, int(s), e)));
                    if (it == root_to_class.end())
                        throw std::logic_error("direct limit node missed the top structure");
                    coprojections[std::size_t(i)].map[s].push_back(it->second);
                }
        }

        for (int i = 0; i < n; ++i) {
            const auto & m = sys.structures[std::size_t(i)];
            const auto & f = coprojections[std::size_t(i)];
            for (std::size_t r = 0; r < sig.relations.size(); ++r)
                for (const auto & tuple : m.relations[r]) {
                    std::vector<int> image;
                    for (std::size_t k = 0; k < tuple.size(); ++k)
                        image.push_back(f(sig.relations[r].profile[k], tuple[k]));
                    limit.relations[r].insert(image);
                }
            for (std::size_t s = 0; s < sig.sorts.size(); ++s)
                for (int e = 0; e < sig.locality[s].size(); ++e)
                    for (int a = 0; a < m.size(int(s)); ++a)
                        for (int b = 0; b < m.size(int(s)); ++b)
                            if (m.loc_has(int(s), e, a, b))
                                limit.set_loc(int(s), e, f(int(s), a), f(int(s), b));
        }
        for (std::size_t c = 0; c < sig.constants.size(); ++c) {
            int s = sig.constants[c].sort;
            limit.constants[c] =
                coprojections[std::size_t(top)](s, sys.structures[std::size_t(top)].constants[c]);
        }
        limit.name = "limit(" + sys.structures[std::size_t(top)].name + ")";

        for (int i = 0; i < n; ++i)
            if (! is_homomorphism(sys.structures[std::size_t(i)], limit, coprojections[std::size_t(i)]))
                throw std::logic_error("direct limit coprojection is not a homomorphism");

        return {std::move(limit), std::move(coprojections)};
    }

    auto verify_limit_lemma(const DirectSystem & sys, const LimitResult & lim,
        const FormulaPtr & phi, const Assignment & a, const Fragment * universal_fragment)
        -> LimitLemmaReport
    {
        LimitLemmaReport report;
        auto cls = classify(phi);
        bool positive = cls.positive;
        bool existential = is_existential(*lim.limit.sig, phi);
        if (! positive && ! existential)
            throw ClassMismatch("the limit lemma covers positive and existential formulas");

        std::vector<std::pair<std::string, int>> vars;
        std::vector<int> target;
        for (const auto & [name, sort] : free_variables(phi)) {
            auto it = a.find(name);
            if (it == a.end())
                throw BadInput("tuple must assign every free variable of the formula");
            vars.emplace_back(name, sort);
            target.push_back(it->second);
        }

        bool limit_truth = evaluate(lim.limit, phi, a);
        std::optional<int> witness;
        for (std::size_t i = 0; i < sys.structures.size() && ! witness; ++i)
            if (member_realizes(sys.structures[i], lim.coprojections[i], phi, vars, target))
                witness = int(i);

        if (positive) {
            report.clause1_checked = true;
            report.clause1_holds = limit_truth == witness.has_value();
            report.clause1_witness = witness;
        }
        report.clause2_checked = true;
        report.clause2_holds = ! limit_truth || witness.has_value();
        report.clause2_witness = witness;

        if (universal_fragment) {
            for (const auto & f : enumerate_fragment(*lim.limit.sig, *universal_fragment)) {
                auto sentence = forall_closure(f);
                bool everywhere = true;
                for (const auto & m : sys.structures)
                    if (! evaluate(m, sentence)) {
                        everywhere = false;
                        break;
                    }
                if (! everywhere)
                    continue;
                ++report.universal_checked;
                if (! evaluate(lim.limit, sentence) && report.universal_holds) {
                    report.universal_holds = false;
                    report.universal_failure = sentence;
                }
            }
        }
        return report;
    }
}
