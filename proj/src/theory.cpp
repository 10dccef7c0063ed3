#include <locus/errors.hpp>
#include <locus/normalize.hpp>
#include <locus/theory.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>

namespace locus
{
    namespace
    {
        auto same_signature(const std::shared_ptr<const SignatureSpec> & a,
            const std::shared_ptr<const SignatureSpec> & b) -> bool
        {
            return a == b || (a && b && *a == *b);
        }

        auto require_model_class(const TheorySpec & t, const std::string & op) -> void
        {
            if (t.mode != TheoryMode::ModelClass)
                throw BadInput(op + " needs a catalogue theory");
        }

        auto require_chains(const SignatureSpec & sig, const std::string & op) -> void
        {
            for (std::size_t s = 0; s < sig.sorts.size(); ++s)
                if (! sig.locality[s].is_chain())
                    throw BadInput(op + " needs chain locality monoids");
        }

        auto effective_bound(const TheorySpec & t, int size_bound) -> int
        {
            return size_bound > 0 ? size_bound : t.search_bound;
        }

        using VarContext = std::vector<std::pair<std::string, int>>;

        auto context_of(const FormulaPtr & f) -> VarContext
        {
            VarContext vars;
            for (const auto & [name, sort] : free_variables(f))
                vars.emplace_back(name, sort);
            return vars;
        }

        auto covers_free_variables(const VarContext & context, const FormulaPtr & f) -> bool
        {
            for (const auto & [name, sort] : free_variables(f)) {
                bool found = false;
                for (const auto & [cname, csort] : context)
                    if (cname == name && csort == sort)
                        found = true;
                if (! found)
                    return false;
            }
            return true;
        }

        // Truth of f over every assignment of the context, last variable
        // fastest. Index arithmetic must match across all callers.
        auto truth_vector(Evaluator & ev, const FormulaPtr & f, const VarContext & vars,
            const FiniteStructure & m) -> std::vector<char>
        {
            std::vector<long> sizes;
            long total = 1;
            for (const auto & [name, sort] : vars) {
                sizes.push_back(m.size(sort));
                total *= sizes.back();
            }
            std::vector<char> out(std::size_t(total), 0);
            Assignment env;
            for (long idx = 0; idx < total; ++idx) {
                long rest = idx;
                for (std::size_t k = vars.size(); k-- > 0;) {
                    env[vars[k].first] = int(rest % sizes[k]);
                    rest /= sizes[k];
                }
                out[std::size_t(idx)] = ev.evaluate(f, env) ? 1 : 0;
            }
            return out;
        }

        auto intersects(const std::vector<char> & a, const std::vector<char> & b) -> bool
        {
            for (std::size_t i = 0; i < a.size(); ++i)
                if (a[i] && b[i])
                    return true;
            return false;
        }

        // Per-member truth vectors over a fixed variable context, memoized by
        // formula node.
        struct TruthTable
        {
            const TheorySpec & t;
            VarContext vars;
            std::deque<Evaluator> evals;
            // Keyed by owning pointer: a raw key could be reused by a later
            // allocation after the formula dies, silently aliasing entries.
            std::map<FormulaPtr, std::vector<std::vector<char>>> memo;

            TruthTable(const TheorySpec & t_, VarContext vars_) :
                t(t_),
                vars(std::move(vars_))
            {
                for (const auto & m : t.catalogue)
                    evals.emplace_back(m);
            }

            auto vecs(const FormulaPtr & f) -> const std::vector<std::vector<char>> &
            {
                auto it = memo.find(f);
                if (it != memo.end())
                    return it->second;
                std::vector<std::vector<char>> rows;
                for (std::size_t i = 0; i < t.catalogue.size(); ++i)
                    rows.push_back(truth_vector(evals[i], f, vars, t.catalogue[i]));
                return memo.emplace(f, std::move(rows)).first->second;
            }

            auto jointly_satisfiable(const FormulaPtr & f, const FormulaPtr & g) -> bool
            {
                const auto & a = vecs(f);
                const auto & b = vecs(g);
                for (std::size_t i = 0; i < a.size(); ++i)
                    if (intersects(a[i], b[i]))
                        return true;
                return false;
            }

            auto satisfiable(const FormulaPtr & f) -> bool
            {
                for (const auto & row : vecs(f))
                    for (char bit : row)
                        if (bit)
                            return true;
                return false;
            }
        };

        // Enumeration of all local structures over a chain-monoid signature
        // up to the size bound, in a fixed order: sizes, locality levels,
        // constants, relation tables. The visitor returns true to stop.
        struct RawSearch
        {
            std::shared_ptr<const SignatureSpec> sig;
            int size_bound;

            RawSearch(std::shared_ptr<const SignatureSpec> sig_, int size_bound_) :
                sig(std::move(sig_)),
                size_bound(size_bound_)
            {
                require_chains(*sig, "raw model search");
                if (size_bound < 1)
                    throw BadInput("raw model search needs a positive size bound");
                if (estimate() > 5'000'000.0)
                    throw BadInput("raw model search space too large; shrink the bound or signature");
            }

            // Ranks of a chain's elements in its total order; rank 0 is the
            // identity.
            auto chain_ranks(int sort) const -> std::vector<int>
            {
                const auto & mon = sig->locality[std::size_t(sort)];
                std::vector<int> order(std::size_t(mon.size()));
                std::iota(order.begin(), order.end(), 0);
                std::sort(order.begin(), order.end(),
                    [&](int a, int b) { return a != b && mon.below(a, b); });
                return order; // order[rank] = element index
            }

            auto estimate() const -> double
            {
                double total = 0;
                std::vector<int> sizes(sig->sorts.size(), 1);
                while (true) {
                    double count = 1;
                    for (std::size_t s = 0; s < sig->sorts.size(); ++s) {
                        double n = sizes[s];
                        int top_ranks = sig->locality[s].size() - 1;
                        count *= std::pow(double(std::max(1, top_ranks)), n * (n - 1) / 2);
                        count *= std::pow(n, double(sig->constants_of_sort(int(s)).size()));
                    }
                    double tuples = 0;
                    for (const auto & rel : sig->relations) {
                        double k = 1;
                        for (int s : rel.profile)
                            k *= sizes[std::size_t(s)];
                        tuples += k;
                    }
                    count *= std::pow(2.0, tuples);
                    total += count;
                    std::size_t s = 0;
                    for (; s < sizes.size(); ++s) {
                        if (++sizes[s] <= size_bound)
                            break;
                        sizes[s] = 1;
                    }
                    if (s == sizes.size())
                        break;
                }
                return total;
            }

            auto run(const std::function<auto(const FiniteStructure &)->bool> & visit) const -> bool
            {
                std::vector<int> sizes(sig->sorts.size(), 1);
                while (true) {
                    if (run_sizes(sizes, visit))
                        return true;
                    std::size_t s = 0;
                    for (; s < sizes.size(); ++s) {
                        if (++sizes[s] <= size_bound)
                            break;
                        sizes[s] = 1;
                    }
                    if (s == sizes.size())
                        return false;
                }
            }

        private:
            auto run_sizes(const std::vector<int> & sizes,
                const std::function<auto(const FiniteStructure &)->bool> & visit) const -> bool
            {
                // lvl[s] holds, per unordered pair in lex order, the rank of
                // the least chain element relating the pair
                std::vector<std::vector<int>> ranks;
                std::vector<std::vector<std::pair<int, int>>> pairs;
                for (std::size_t s = 0; s < sizes.size(); ++s) {
                    ranks.push_back(chain_ranks(int(s)));
                    pairs.emplace_back();
                    for (int a = 0; a < sizes[s]; ++a)
                        for (int b = a + 1; b < sizes[s]; ++b)
                            pairs.back().emplace_back(a, b);
                }

                std::vector<std::vector<int>> lvl(sizes.size());
                for (std::size_t s = 0; s < sizes.size(); ++s)
                    lvl[s].assign(pairs[s].size(), 1);

                while (true) {
                    if (levels_admissible(sizes, pairs, ranks, lvl) &&
                        run_constants(sizes, pairs, ranks, lvl, visit))
                        return true;
                    std::size_t s = 0, k = 0;
                    bool carried = true;
                    for (s = 0; s < sizes.size() && carried; ++s)
                        for (k = 0; k < lvl[s].size(); ++k) {
                            if (++lvl[s][k] < int(ranks[s].size())) {
                                carried = false;
                                break;
                            }
                            lvl[s][k] = 1;
                        }
                    if (carried)
                        return false;
                }
            }

            auto level_of(const std::vector<std::pair<int, int>> & prs, const std::vector<int> & lv,
                int a, int b) const -> int
            {
                if (a == b)
                    return 0;
                auto key = std::minmax(a, b);
                auto it = std::lower_bound(prs.begin(), prs.end(), std::pair(key.first, key.second));
                return lv[std::size_t(it - prs.begin())];
            }

            auto levels_admissible(const std::vector<int> & sizes,
                const std::vector<std::vector<std::pair<int, int>>> & pairs,
                const std::vector<std::vector<int>> & ranks,
                const std::vector<std::vector<int>> & lvl) const -> bool
            {
                for (std::size_t s = 0; s < sizes.size(); ++s) {
                    const auto & mon = sig->locality[s];
                    for (int a = 0; a < sizes[s]; ++a)
                        for (int b = 0; b < sizes[s]; ++b)
                            for (int c = 0; c < sizes[s]; ++c) {
                                int ab = ranks[s][std::size_t(level_of(pairs[s], lvl[s], a, b))];
                                int bc = ranks[s][std::size_t(level_of(pairs[s], lvl[s], b, c))];
                                int ac = ranks[s][std::size_t(level_of(pairs[s], lvl[s], a, c))];
                                if (! mon.below(ac, mon.compose(ab, bc)))
                                    return false;
                            }
                }
                return true;
            }

            auto run_constants(const std::vector<int> & sizes,
                const std::vector<std::vector<std::pair<int, int>>> & pairs,
                const std::vector<std::vector<int>> & ranks,
                const std::vector<std::vector<int>> & lvl,
                const std::function<auto(const FiniteStructure &)->bool> & visit) const -> bool
            {
                std::vector<int> placement(sig->constants.size(), 0);
                while (true) {
                    if (constants_admissible(pairs, ranks, lvl, placement) &&
                        run_relations(sizes, pairs, ranks, lvl, placement, visit))
                        return true;
                    std::size_t c = 0;
                    for (; c < placement.size(); ++c) {
                        int s = sig->constants[c].sort;
                        if (++placement[c] < sizes[std::size_t(s)])
                            break;
                        placement[c] = 0;
                    }
                    if (c == placement.size())
                        return false;
                }
            }

            auto constants_admissible(const std::vector<std::vector<std::pair<int, int>>> & pairs,
                const std::vector<std::vector<int>> & ranks,
                const std::vector<std::vector<int>> & lvl,
                const std::vector<int> & placement) const -> bool
            {
                for (std::size_t c1 = 0; c1 < placement.size(); ++c1)
                    for (std::size_t c2 = c1; c2 < placement.size(); ++c2) {
                        if (sig->constants[c1].sort != sig->constants[c2].sort)
                            continue;
                        auto b = sig->bound_for(int(c1), int(c2));
                        if (! b)
                            return false;
                        int s = sig->constants[c1].sort;
                        int rank = level_of(pairs[std::size_t(s)], lvl[std::size_t(s)],
                            placement[c1], placement[c2]);
                        if (! sig->locality[std::size_t(s)].below(
                                ranks[std::size_t(s)][std::size_t(rank)], *b))
                            return false;
                    }
                return true;
            }

            auto run_relations(const std::vector<int> & sizes,
                const std::vector<std::vector<std::pair<int, int>>> & pairs,
                const std::vector<std::vector<int>> & ranks,
                const std::vector<std::vector<int>> & lvl,
                const std::vector<int> & placement,
                const std::function<auto(const FiniteStructure &)->bool> & visit) const -> bool
            {
                std::vector<std::pair<int, std::vector<int>>> tuples; // relation, tuple
                for (int r = 0; r < int(sig->relations.size()); ++r) {
                    const auto & profile = sig->relations[std::size_t(r)].profile;
                    std::vector<int> tup(profile.size(), 0);
                    while (true) {
                        tuples.emplace_back(r, tup);
                        std::size_t k = 0;
                        for (; k < tup.size(); ++k) {
                            if (++tup[k] < sizes[std::size_t(profile[k])])
                                break;
                            tup[k] = 0;
                        }
                        if (k == tup.size())
                            break;
                        if (profile.empty())
                            break;
                    }
                    if (profile.empty())
                        tuples.pop_back();
                }

                auto base = skeleton(sizes, pairs, ranks, lvl, placement);
                for (unsigned long mask = 0; mask < (1ul << tuples.size()); ++mask) {
                    auto m = base;
                    for (std::size_t i = 0; i < tuples.size(); ++i)
                        if (mask & (1ul << i))
                            m.relations[std::size_t(tuples[i].first)].insert(tuples[i].second);
                    if (visit(m))
                        return true;
                }
                return false;
            }

            auto skeleton(const std::vector<int> & sizes,
                const std::vector<std::vector<std::pair<int, int>>> & pairs,
                const std::vector<std::vector<int>> & ranks,
                const std::vector<std::vector<int>> & lvl,
                const std::vector<int> & placement) const -> FiniteStructure
            {
                std::vector<std::vector<std::string>> universe;
                for (std::size_t s = 0; s < sizes.size(); ++s) {
                    universe.emplace_back();
                    for (int i = 0; i < sizes[s]; ++i)
                        universe.back().push_back("a" + std::to_string(i));
                }
                auto m = make_structure(sig, universe);
                for (std::size_t s = 0; s < sizes.size(); ++s) {
                    const auto & mon = sig->locality[s];
                    for (std::size_t k = 0; k < pairs[s].size(); ++k) {
                        auto [a, b] = pairs[s][k];
                        int least = ranks[s][std::size_t(lvl[s][k])];
                        for (int e = 0; e < mon.size(); ++e)
                            if (mon.below(least, e)) {
                                m.set_loc(int(s), e, a, b);
                                m.set_loc(int(s), e, b, a);
                            }
                    }
                    for (int a = 0; a < sizes[s]; ++a)
                        for (int e = 0; e < mon.size(); ++e)
                            if (mon.below(mon.identity, e))
                                m.set_loc(int(s), e, a, a);
                }
                m.constants = placement;
                return m;
            }
        };

        auto explicit_search(const TheorySpec & t, int size_bound,
            const std::function<auto(Evaluator &, const FiniteStructure &)->bool> & accept)
            -> std::optional<FiniteStructure>
        {
            std::optional<FiniteStructure> found;
            RawSearch search{t.sig, size_bound};
            search.run([&](const FiniteStructure & m) {
                Evaluator ev{m};
                for (const auto & sentence : t.sentences)
                    if (! ev.evaluate(sentence))
                        return false;
                if (! accept(ev, m))
                    return false;
                found = m;
                return true;
            });
            return found;
        }

        // The tight countermodel shapes for positive sentences over a
        // catalogue theory: relations empty, every sort shrunk to its
        // constants (merged along a partition) or a single point, locality
        // at the greatest levels the bound map admits. Any model of the
        // theory refusing a positive sentence keeps refusing it after
        // restriction to its constants, emptying the relations and raising
        // the locality levels, so this family is exhaustive.
        auto minimal_candidates(const TheorySpec & t) -> std::vector<FiniteStructure>
        {
            const auto & sig = *t.sig;
            require_chains(sig, "catalogue countermodel search");

            // partitions of each sort's constants as restricted growth strings
            std::vector<std::vector<std::vector<int>>> sort_partitions;
            for (std::size_t s = 0; s < sig.sorts.size(); ++s) {
                auto consts = sig.constants_of_sort(int(s));
                std::vector<std::vector<int>> parts;
                std::vector<int> rgs(consts.size(), 0);
                if (consts.empty())
                    parts.push_back({});
                else
                    while (true) {
                        parts.push_back(rgs);
                        std::size_t i = rgs.size();
                        for (; i-- > 0;) {
                            int cap = 0;
                            for (std::size_t j = 0; j < i; ++j)
                                cap = std::max(cap, rgs[j] + 1);
                            if (++rgs[i] <= cap) {
                                for (std::size_t j = i + 1; j < rgs.size(); ++j)
                                    rgs[j] = 0;
                                break;
                            }
                        }
                        if (i == std::size_t(-1))
                            break;
                    }
                sort_partitions.push_back(std::move(parts));
            }

            std::vector<FiniteStructure> out;
            std::vector<std::size_t> pick(sig.sorts.size(), 0);
            while (true) {
                std::vector<std::vector<std::string>> universe;
                std::vector<std::vector<int>> block_of; // per sort, constant pos -> element
                bool ok = true;
                for (std::size_t s = 0; s < sig.sorts.size(); ++s) {
                    const auto & rgs = sort_partitions[s][pick[s]];
                    auto consts = sig.constants_of_sort(int(s));
                    int blocks = rgs.empty() ? 0 : *std::max_element(rgs.begin(), rgs.end()) + 1;
                    universe.emplace_back();
                    for (int b = 0; b < std::max(1, blocks); ++b) {
                        std::string name = "u" + std::to_string(b);
                        for (std::size_t i = 0; i < rgs.size(); ++i)
                            if (rgs[i] == b) {
                                name = sig.constants[std::size_t(consts[i])].name;
                                break;
                            }
                        universe.back().push_back(name);
                    }
                    block_of.push_back(rgs);
                }

                auto m = make_structure(t.sig, universe);
                for (std::size_t s = 0; s < sig.sorts.size(); ++s) {
                    auto consts = sig.constants_of_sort(int(s));
                    for (std::size_t i = 0; i < consts.size(); ++i)
                        m.constants[std::size_t(consts[i])] = block_of[s][i];
                }

                // greatest admissible levels: top everywhere, bound entries
                // on constant pairs, then composition closure
                for (std::size_t s = 0; s < sig.sorts.size() && ok; ++s) {
                    const auto & mon = sig.locality[s];
                    int n = m.size(int(s));
                    int top = mon.maximal_elements().front();
                    std::vector<std::vector<int>> lvl(std::size_t(n), std::vector<int>(std::size_t(n), top));
                    for (int a = 0; a < n; ++a)
                        lvl[std::size_t(a)][std::size_t(a)] = mon.identity;
                    auto consts = sig.constants_of_sort(int(s));
                    for (std::size_t i = 0; i < consts.size(); ++i)
                        for (std::size_t j = i + 1; j < consts.size(); ++j) {
                            auto b = sig.bound_for(consts[i], consts[j]);
                            int a1 = block_of[s][i], a2 = block_of[s][j];
                            if (a1 == a2)
                                continue;
                            if (b && mon.below(*b, lvl[std::size_t(a1)][std::size_t(a2)])) {
                                lvl[std::size_t(a1)][std::size_t(a2)] = *b;
                                lvl[std::size_t(a2)][std::size_t(a1)] = *b;
                            }
                        }
                    for (bool changed = true; changed;) {
                        changed = false;
                        for (int a = 0; a < n; ++a)
                            for (int b = 0; b < n; ++b)
                                for (int c = 0; c < n; ++c) {
                                    int via = mon.compose(lvl[std::size_t(a)][std::size_t(b)],
                                        lvl[std::size_t(b)][std::size_t(c)]);
                                    if (! mon.below(lvl[std::size_t(a)][std::size_t(c)], via) &&
                                        mon.below(via, lvl[std::size_t(a)][std::size_t(c)])) {
                                        lvl[std::size_t(a)][std::size_t(c)] = via;
                                        changed = true;
                                    }
                                }
                    }
                    for (int a = 0; a < n; ++a)
                        for (int b = 0; b < n; ++b)
                            for (int e = 0; e < mon.size(); ++e)
                                if (mon.below(lvl[std::size_t(a)][std::size_t(b)], e))
                                    m.set_loc(int(s), e, a, b);
                }

                if (ok && check_locality_axioms(m).all())
                    out.push_back(std::move(m));

                std::size_t s = 0;
                for (; s < pick.size(); ++s) {
                    if (++pick[s] < sort_partitions[s].size())
                        break;
                    pick[s] = 0;
                }
                if (s == pick.size())
                    break;
            }
            return out;
        }

        // A certifying member for a candidate model, if any; a structure
        // models the catalogue theory exactly when one exists.
        auto certify_into_catalogue(const TheorySpec & t, const FiniteStructure & m)
            -> std::optional<std::pair<int, Homomorphism>>
        {
            for (std::size_t i = 0; i < t.catalogue.size(); ++i) {
                auto homs = find_homomorphisms(m, t.catalogue[i], {.limit = 1});
                if (! homs.empty())
                    return std::pair{int(i), homs.front()};
            }
            return std::nullopt;
        }
    }

    auto make_explicit_theory(std::shared_ptr<const SignatureSpec> sig,
        std::vector<FormulaPtr> sentences, int search_bound, std::string name) -> TheorySpec
    {
        if (! sig)
            throw BadInput("explicit theory needs a signature");
        for (const auto & sentence : sentences) {
            if (! free_variables(sentence).empty())
                throw BadInput("theory sentences must be closed");
            if (! classify(sentence).negative)
                throw ClassMismatch("explicit theory sentences must be negative");
        }
        TheorySpec t;
        t.mode = TheoryMode::ExplicitSentences;
        t.sig = std::move(sig);
        t.sentences = std::move(sentences);
        t.search_bound = search_bound;
        t.name = std::move(name);
        return t;
    }

    auto make_model_class_theory(std::vector<FiniteStructure> catalogue, int search_bound,
        std::string name) -> TheorySpec
    {
        if (catalogue.empty())
            throw BadInput("catalogue theory needs at least one member");
        for (std::size_t i = 1; i < catalogue.size(); ++i)
            if (! same_signature(catalogue[0].sig, catalogue[i].sig))
                throw SignatureMismatch("catalogue members disagree on the signature");
        for (std::size_t i = 0; i < catalogue.size(); ++i) {
            auto report = check_locality_axioms(catalogue[i]);
            if (! report.all())
                throw NotLocal("catalogue member " + std::to_string(i) + " (" + catalogue[i].name +
                    ") fails " + report.first_failure()->axiom);
        }
        TheorySpec t;
        t.mode = TheoryMode::ModelClass;
        t.sig = catalogue.front().sig;
        t.catalogue = std::move(catalogue);
        t.search_bound = search_bound;
        t.name = std::move(name);
        return t;
    }

    auto exists_closure(const FormulaPtr & f) -> FormulaPtr
    {
        auto out = f;
        auto vars = free_variables(f);
        for (auto it = vars.rbegin(); it != vars.rend(); ++it)
            out = exists(it->first, it->second, out);
        return out;
    }

    auto locally_entails(const TheorySpec & t, const FormulaPtr & phi, int size_bound)
        -> EntailmentResult
    {
        if (! free_variables(phi).empty())
            throw BadInput("entailment takes sentences");
        EntailmentResult result;
        result.bound = effective_bound(t, size_bound);

        if (t.mode == TheoryMode::ExplicitSentences) {
            auto counter = explicit_search(t, result.bound,
                [&](Evaluator & ev, const FiniteStructure &) { return ! ev.evaluate(phi); });
            if (counter) {
                result.countermodel = std::move(counter);
                result.definitive = true;
            } else {
                result.entailed = true;
                result.definitive = false; // one-sided: no countermodel up to the bound
            }
            return result;
        }

        auto cls = classify(phi);
        if (! cls.positive && ! cls.negative)
            throw ClassMismatch("catalogue entailment handles positive and negative sentences");

        // catalogue members are themselves models of the theory
        for (std::size_t i = 0; i < t.catalogue.size(); ++i)
            if (! evaluate(t.catalogue[i], phi)) {
                result.countermodel = t.catalogue[i];
                result.counter_member = int(i);
                result.counter_hom = identity_homomorphism(t.catalogue[i]);
                result.definitive = true;
                return result;
            }

        if (cls.positive) {
            for (auto & candidate : minimal_candidates(t)) {
                if (evaluate(candidate, phi))
                    continue;
                auto cert = certify_into_catalogue(t, candidate);
                if (! cert)
                    continue;
                if (! check_locality_axioms(candidate).all())
                    continue;
                result.countermodel = std::move(candidate);
                result.counter_member = cert->first;
                result.counter_hom = cert->second;
                result.definitive = true;
                return result;
            }
        }

        // negative sentences: a countermodel satisfies the stripped positive
        // body, and any model doing so pushes it into a member, so the member
        // scan above was already exhaustive
        result.entailed = true;
        result.definitive = true;
        return result;
    }

    auto positive_part_membership(const TheorySpec & t, const FormulaPtr & phi) -> MembershipResult
    {
        if (! free_variables(phi).empty())
            throw BadInput("positive part membership takes sentences");
        if (! classify(phi).positive)
            throw ClassMismatch("positive part membership needs a positive sentence");

        MembershipResult result;
        result.bound = t.search_bound;

        if (t.mode == TheoryMode::ModelClass) {
            for (std::size_t i = 0; i < t.catalogue.size(); ++i)
                if (evaluate(t.catalogue[i], phi)) {
                    result.member = true;
                    result.witness_member = int(i);
                    break;
                }
            result.definitive = true; // witnesses push along the certifying maps
            return result;
        }

        auto witness = explicit_search(t, t.search_bound,
            [&](Evaluator & ev, const FiniteStructure &) { return ev.evaluate(phi); });
        if (witness) {
            result.member = true;
            result.witness = std::move(witness);
            result.definitive = true;
        }
        return result;
    }

    auto find_denials(const TheorySpec & t, const FormulaPtr & phi, const Fragment & frag)
        -> std::vector<Denial>
    {
        if (! covers_free_variables(frag.free_variables, phi))
            throw BadInput("the fragment context must cover the formula's free variables");
        auto candidates = enumerate_fragment(*t.sig, frag);
        std::vector<Denial> out;

        if (t.mode == TheoryMode::ModelClass) {
            TruthTable table{t, frag.free_variables};
            for (const auto & psi : candidates)
                if (! table.jointly_satisfiable(phi, psi))
                    out.push_back({psi, t.search_bound, true});
            return out;
        }

        for (const auto & psi : candidates) {
            auto refuted = locally_entails(t, neg(exists_closure(conj({phi, psi}))));
            if (refuted.entailed)
                out.push_back({psi, refuted.bound, refuted.definitive});
        }
        return out;
    }

    auto check_approx_complementary(const TheorySpec & t, const FormulaPtr & phi,
        const FormulaPtr & psi, ApproxMode mode, const Fragment & frag) -> ApproxReport
    {
        if (! covers_free_variables(frag.free_variables, phi) ||
            ! covers_free_variables(frag.free_variables, psi))
            throw BadInput("the fragment context must cover both formulas");

        ApproxReport report;
        report.bound = t.search_bound;
        report.definitive = t.mode == TheoryMode::ModelClass;

        auto denies = [&](TruthTable & table, const FormulaPtr & f, const FormulaPtr & g) {
            if (t.mode == TheoryMode::ModelClass)
                return ! table.jointly_satisfiable(f, g);
            return locally_entails(t, neg(exists_closure(conj({f, g})))).entailed;
        };

        TruthTable table{t, frag.free_variables};
        auto denials_psi = find_denials(t, psi, frag);

        if (mode == ApproxMode::Approximates) {
            for (const auto & theta : denials_psi) {
                ++report.denials_checked;
                if (! denies(table, phi, theta.psi)) {
                    report.holds = false;
                    report.violating_denial = theta.psi;
                    return report;
                }
            }
            return report;
        }

        auto denials_phi = find_denials(t, phi, frag);
        for (const auto & theta : denials_psi) {
            ++report.denials_checked;
            for (const auto & rho : denials_phi)
                if (! denies(table, theta.psi, rho.psi)) {
                    report.holds = false;
                    report.violating_denial = theta.psi;
                    report.violating_inner = rho.psi;
                    return report;
                }
        }
        return report;
    }

    auto check_irreducibility(const TheorySpec & t, IrreducibilityMode mode, const Fragment & frag,
        std::optional<int> loc_elem) -> IrreducibilityReport
    {
        if (frag.free_variables.size() != 1)
            throw BadInput("irreducibility needs a fragment with exactly one free variable");
        if (mode == IrreducibilityMode::Uniform && ! loc_elem)
            throw BadInput("uniform irreducibility needs a locality element");

        const auto & [xname, sort] = frag.free_variables.front();
        std::string yname = xname + "_j";
        const auto & mon = t.sig->locality[std::size_t(sort)];

        auto formulas = enumerate_fragment(*t.sig, frag);
        VarContext pair_context{{xname, sort}, {yname, sort}};
        VarContext x_context{{xname, sort}};

        // A pair (phi, psi) is jointly realizable iff phi's column, psi's
        // column and the locality level intersect somewhere in some member.
        // The verdict only depends on truth columns, so formulas with
        // identical columns across the catalogue collapse to the first
        // representative; syntactic fragments repeat sets heavily.
        std::vector<std::vector<std::vector<char>>> cols;   // cols[i][mi]
        std::vector<std::vector<std::vector<char>>> level;  // level[d][mi]
        std::vector<char> sat(formulas.size(), 0);
        if (t.mode == TheoryMode::ModelClass) {
            std::deque<Evaluator> evals;
            for (const auto & m : t.catalogue)
                evals.emplace_back(m);
            std::map<std::vector<char>, std::size_t> seen;
            std::vector<FormulaPtr> kept;
            for (const auto & f : formulas) {
                std::vector<char> key;
                std::vector<std::vector<char>> per_member;
                for (std::size_t mi = 0; mi < t.catalogue.size(); ++mi) {
                    per_member.push_back(truth_vector(evals[mi], f, x_context, t.catalogue[mi]));
                    key.insert(key.end(), per_member.back().begin(), per_member.back().end());
                }
                if (seen.emplace(std::move(key), kept.size()).second) {
                    kept.push_back(f);
                    cols.push_back(std::move(per_member));
                }
            }
            formulas = std::move(kept);
            sat.assign(formulas.size(), 0);
            for (std::size_t i = 0; i < formulas.size(); ++i)
                for (const auto & col : cols[i])
                    for (char bit : col)
                        if (bit)
                            sat[i] = 1;
            level.resize(std::size_t(mon.size()));
            for (std::size_t mi = 0; mi < t.catalogue.size(); ++mi)
                for (int d = 0; d < mon.size(); ++d)
                    level[std::size_t(d)].push_back(truth_vector(evals[mi],
                        loc_atom(sort, d, make_var(xname, sort), make_var(yname, sort)),
                        pair_context, t.catalogue[mi]));
        } else {
            for (std::size_t i = 0; i < formulas.size(); ++i)
                sat[i] = positive_part_membership(t, exists_closure(formulas[i])).member;
        }

        auto rename = [&](std::size_t j) {
            return substitute(formulas[j], xname, make_var(yname, sort));
        };

        auto joint_ok = [&](std::size_t i, std::size_t j, std::optional<int> d) -> bool {
            if (t.mode == TheoryMode::ModelClass) {
                for (std::size_t mi = 0; mi < t.catalogue.size(); ++mi) {
                    const auto & a = cols[i][mi];
                    const auto & b = cols[j][mi];
                    const auto * c = d ? &level[std::size_t(*d)][mi] : nullptr;
                    for (std::size_t ai = 0; ai < a.size(); ++ai) {
                        if (! a[ai])
                            continue;
                        for (std::size_t bi = 0; bi < b.size(); ++bi)
                            if (b[bi] && (! c || (*c)[ai * b.size() + bi]))
                                return true;
                    }
                }
                return false;
            }
            auto joint = d ? conj({formulas[i], rename(j),
                              loc_atom(sort, *d, make_var(xname, sort), make_var(yname, sort))})
                           : conj({formulas[i], rename(j)});
            return positive_part_membership(t, exists_closure(joint)).member;
        };

        auto run_mode = [&](std::optional<int> d) -> std::pair<bool, std::optional<PairCertificate>> {
            for (std::size_t i = 0; i < formulas.size(); ++i) {
                if (! sat[i])
                    continue;
                for (std::size_t j = i; j < formulas.size(); ++j) {
                    if (! sat[j])
                        continue;
                    if (! joint_ok(i, j, d))
                        return {false,
                            PairCertificate{exists_closure(formulas[i]), exists_closure(rename(j))}};
                }
            }
            return {true, std::nullopt};
        };

        IrreducibilityReport report;
        report.bound = t.search_bound;
        report.definitive = t.mode == TheoryMode::ModelClass;

        if (mode == IrreducibilityMode::Plain || mode == IrreducibilityMode::Uniform) {
            auto [holds, certificate] = run_mode(
                mode == IrreducibilityMode::Uniform ? loc_elem : std::nullopt);
            report.holds = holds;
            report.certificate = certificate;
            return report;
        }

        for (int d = 0; d < mon.size(); ++d) {
            auto [holds, certificate] = run_mode(d);
            report.per_element.push_back({d, holds, certificate});
            if (holds && ! report.witness_elem)
                report.witness_elem = d;
        }
        report.holds = report.witness_elem.has_value();
        return report;
    }

    auto check_ljcp(const TheorySpec & t, int size_bound) -> LjcpReport
    {
        require_model_class(t, "local joint continuation");
        LjcpReport report;
        report.bound = effective_bound(t, size_bound);
        report.definitive = true; // joint models push into members

        for (std::size_t a = 0; a < t.catalogue.size(); ++a)
            for (std::size_t b = a; b < t.catalogue.size(); ++b) {
                bool found = false;
                for (std::size_t m = 0; m < t.catalogue.size() && ! found; ++m) {
                    auto ha = find_homomorphisms(t.catalogue[a], t.catalogue[m], {.limit = 1});
                    if (ha.empty())
                        continue;
                    auto hb = find_homomorphisms(t.catalogue[b], t.catalogue[m], {.limit = 1});
                    if (hb.empty())
                        continue;
                    report.continuations.push_back(
                        {int(a), int(b), int(m), ha.front(), hb.front()});
                    found = true;
                }
                if (! found) {
                    report.holds = false;
                    report.failing_pair = {int(a), int(b)};
                    return report;
                }
            }
        return report;
    }

    auto compare_negative_theories(const FiniteStructure & m, const FiniteStructure & n,
        const Fragment & frag) -> TheoryComparison
    {
        if (! same_signature(m.sig, n.sig))
            throw SignatureMismatch("theory comparison needs structures over one signature");

        TheoryComparison result;
        Evaluator em{m}, en{n};
        for (const auto & f : enumerate_fragment(*m.sig, frag)) {
            auto sentence = exists_closure(f);
            bool bm = em.evaluate(sentence), bn = en.evaluate(sentence);
            if (bm != bn) {
                result.equal = false;
                result.witness = neg(sentence);
                result.side = bm ? 1 : 0;
                return result;
            }
        }
        return result;
    }

    namespace
    {
        auto closed_members(const TheorySpec & t) -> std::vector<int>
        {
            std::vector<int> out;
            for (std::size_t i = 0; i < t.catalogue.size(); ++i)
                if (check_locally_positively_closed(t.catalogue[i], t.catalogue).closed)
                    out.push_back(int(i));
            return out;
        }
    }

    auto check_catalogue_completeness(const TheorySpec & t, const Fragment & frag)
        -> CompletenessReport
    {
        require_model_class(t, "catalogue completeness");
        CompletenessReport report;
        report.bound = t.search_bound;
        report.definitive = true;
        report.pc_members = closed_members(t);

        for (std::size_t i = 0; i < report.pc_members.size(); ++i)
            for (std::size_t j = i + 1; j < report.pc_members.size(); ++j) {
                auto cmp = compare_negative_theories(t.catalogue[std::size_t(report.pc_members[i])],
                    t.catalogue[std::size_t(report.pc_members[j])], frag);
                if (! cmp.equal) {
                    report.holds = false;
                    report.differing_pair = {report.pc_members[i], report.pc_members[j]};
                    report.witness = cmp.witness;
                    return report;
                }
            }
        return report;
    }

    auto check_weak_completeness(const TheorySpec & t, const Fragment & frag) -> CompletenessReport
    {
        require_model_class(t, "weak completeness");
        CompletenessReport report;
        report.bound = t.search_bound;
        report.definitive = true;
        report.pc_members = closed_members(t);

        auto formulas = enumerate_fragment(*t.sig, frag);
        std::vector<FormulaPtr> closures;
        std::vector<char> in_some_member;
        {
            std::deque<Evaluator> evals;
            for (const auto & m : t.catalogue)
                evals.emplace_back(m);
            for (const auto & f : formulas) {
                closures.push_back(exists_closure(f));
                char any = 0;
                for (auto & ev : evals)
                    if (ev.evaluate(closures.back())) {
                        any = 1;
                        break;
                    }
                in_some_member.push_back(any);
            }
        }

        for (int member : report.pc_members) {
            Evaluator ev{t.catalogue[std::size_t(member)]};
            bool matches = true;
            FormulaPtr separating;
            for (std::size_t k = 0; k < closures.size(); ++k)
                if (ev.evaluate(closures[k]) != (in_some_member[k] != 0)) {
                    matches = false;
                    separating = neg(closures[k]);
                    break;
                }
            if (matches) {
                report.matching_member = member;
                return report;
            }
            if (! report.witness)
                report.witness = separating;
        }
        report.holds = false;
        return report;
    }

    auto bound_to_formula(const SignatureSpec & sig, const BoundType & b) -> FormulaPtr
    {
        std::vector<FormulaPtr> parts;
        for (const auto & anchor : b.anchors) {
            const auto & [name, sort] = b.variables[std::size_t(anchor.var)];
            parts.push_back(loc_atom(sort, anchor.loc_elem, make_var(name, sort),
                make_const(sig, anchor.constant)));
        }
        for (const auto & pair : b.pairs) {
            const auto & [n1, s1] = b.variables[std::size_t(pair.var1)];
            const auto & [n2, s2] = b.variables[std::size_t(pair.var2)];
            parts.push_back(loc_atom(s1, pair.loc_elem, make_var(n1, s1), make_var(n2, s2)));
        }
        if (parts.empty())
            return top();
        return conj(std::move(parts));
    }

    auto synthesize_bound(const TheorySpec & t, const FormulaPtr & phi,
        std::optional<int> witness_member, const std::optional<Assignment> & witness_assignment)
        -> BoundType
    {
        if (! classify(phi).positive)
            throw ClassMismatch("bound synthesis needs a positive formula");
        auto vars = context_of(phi);
        if (vars.empty())
            throw BadInput("bound synthesis needs free variables");

        const FiniteStructure * witness = nullptr;
        std::optional<FiniteStructure> searched;
        std::vector<int> values(vars.size(), -1);

        auto adopt = [&](const FiniteStructure & m) -> bool {
            if (witness_assignment) {
                for (std::size_t i = 0; i < vars.size(); ++i) {
                    auto it = witness_assignment->find(vars[i].first);
                    if (it == witness_assignment->end())
                        throw BadInput("witness assignment misses variable '" + vars[i].first + "'");
                    values[i] = it->second;
                }
                Assignment env = *witness_assignment;
                return evaluate(m, phi, env);
            }
            auto sets = definable_set(m, phi, vars);
            if (sets.empty())
                return false;
            const auto & tuple = *sets.begin();
            for (std::size_t i = 0; i < vars.size(); ++i)
                values[i] = tuple[i];
            return true;
        };

        if (t.mode == TheoryMode::ModelClass) {
            if (witness_member) {
                if (*witness_member < 0 || *witness_member >= int(t.catalogue.size()))
                    throw BadInput("witness member index out of range");
                if (adopt(t.catalogue[std::size_t(*witness_member)]))
                    witness = &t.catalogue[std::size_t(*witness_member)];
            } else
                for (const auto & m : t.catalogue)
                    if (adopt(m)) {
                        witness = &m;
                        break;
                    }
        } else {
            searched = explicit_search(t, t.search_bound, [&](Evaluator &, const FiniteStructure & m) {
                return adopt(m);
            });
            if (searched)
                witness = &*searched;
        }

        if (! witness)
            throw NoWitness("the existential closure of the formula is not in the positive part");

        BoundType bound;
        bound.variables = vars;
        for (std::size_t i = 0; i < vars.size(); ++i) {
            int sort = vars[i].second;
            const auto & mon = t.sig->locality[std::size_t(sort)];
            std::optional<std::pair<int, int>> best; // constant, element
            for (int c : t.sig->constants_of_sort(sort)) {
                auto d = witness->min_locality(sort, values[i], witness->constants[std::size_t(c)]);
                if (d && (! best || mon.below(*d, best->second)))
                    best = {c, *d};
            }
            if (best)
                bound.anchors.push_back({int(i), best->first, best->second});
        }
        for (std::size_t i = 0; i < vars.size(); ++i)
            for (std::size_t j = i + 1; j < vars.size(); ++j) {
                if (vars[i].second != vars[j].second)
                    continue;
                auto d = witness->min_locality(vars[i].second, values[i], values[j]);
                if (d)
                    bound.pairs.push_back({int(i), int(j), *d});
            }

        // the witness realizes the bound together with the formula
        Assignment env;
        for (std::size_t i = 0; i < vars.size(); ++i)
            env[vars[i].first] = values[i];
        if (! evaluate(*witness, conj({bound_to_formula(*t.sig, bound), phi}), env))
            throw std::logic_error("synthesized bound rejected by its own witness");
        return bound;
    }

    auto inherent_locality_probe(const TheorySpec & t, const Fragment & frag, int size_bound)
        -> ProbeReport
    {
        require_model_class(t, "inherent locality probe");
        if (frag.free_variables.size() != 2 ||
            frag.free_variables[0].second != frag.free_variables[1].second)
            throw BadInput("the probe needs a fragment with two free variables of one sort");
        int sort = frag.free_variables[0].second;
        const auto & mon = t.sig->locality[std::size_t(sort)];
        auto tops = mon.maximal_elements();

        ProbeReport report;
        report.bound = effective_bound(t, size_bound);

        auto formulas = enumerate_fragment(*t.sig, frag);
        TruthTable table{t, frag.free_variables};

        // group formulas by their joint truth vectors
        std::vector<std::vector<std::size_t>> groups;
        std::map<std::vector<std::vector<char>>, std::size_t> group_of;
        std::vector<const std::vector<std::vector<char>> *> group_vec;
        for (std::size_t i = 0; i < formulas.size(); ++i) {
            const auto & v = table.vecs(formulas[i]);
            auto [it, fresh] = group_of.emplace(v, groups.size());
            if (fresh) {
                groups.emplace_back();
                group_vec.push_back(&it->first);
            }
            groups[it->second].push_back(i);
        }

        auto nonzero = [](const std::vector<std::vector<char>> & v) {
            for (const auto & row : v)
                for (char bit : row)
                    if (bit)
                        return true;
            return false;
        };
        auto meets = [](const std::vector<std::vector<char>> & a,
                         const std::vector<std::vector<char>> & b) {
            for (std::size_t i = 0; i < a.size(); ++i)
                if (intersects(a[i], b[i]))
                    return true;
            return false;
        };

        auto below_top = [&](int elem) {
            for (int top : tops)
                if (elem != top && mon.below(elem, top))
                    return true;
            return false;
        };

        for (std::size_t seed = 0; seed < groups.size(); ++seed) {
            if (! nonzero(*group_vec[seed]))
                continue;
            ++report.seeds_tried;

            std::vector<std::size_t> grown{seed};
            for (std::size_t c = 0; c < groups.size(); ++c) {
                if (c == seed || ! nonzero(*group_vec[c]))
                    continue;
                bool compatible = true;
                for (std::size_t g : grown)
                    if (! meets(*group_vec[c], *group_vec[g])) {
                        compatible = false;
                        break;
                    }
                if (compatible)
                    grown.push_back(c);
            }

            // joint realizations of the whole grown set
            auto full = *group_vec[grown.front()];
            for (std::size_t g : grown)
                for (std::size_t i = 0; i < full.size(); ++i)
                    for (std::size_t k = 0; k < full[i].size(); ++k)
                        full[i][k] = full[i][k] && (*group_vec[g])[i][k] ? 1 : 0;

            bool realizable = false, realizable_below_top = false;
            for (std::size_t i = 0; i < full.size() && ! realizable_below_top; ++i) {
                long n = t.catalogue[i].size(sort);
                for (long idx = 0; idx < long(full[i].size()); ++idx) {
                    if (! full[i][std::size_t(idx)])
                        continue;
                    realizable = true;
                    auto d = t.catalogue[i].min_locality(sort, int(idx / n), int(idx % n));
                    if (d && below_top(*d)) {
                        realizable_below_top = true;
                        break;
                    }
                }
            }

            if (realizable && ! realizable_below_top) {
                report.gap = true;
                report.definitive = true;
                report.seed = formulas[groups[seed].front()];
                std::vector<std::size_t> members;
                for (std::size_t g : grown)
                    for (std::size_t i : groups[g])
                        members.push_back(i);
                std::sort(members.begin(), members.end());
                for (std::size_t i : members)
                    report.gap_set.push_back(formulas[i]);
                return report;
            }
        }
        return report;
    }
}
