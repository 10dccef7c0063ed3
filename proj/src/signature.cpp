#include <locus/signature.hpp>

#include <algorithm>

using std::string;
using std::vector;

namespace locus
{
    auto LocalityMonoid::element_index(const string & name) const -> int
    {
        for (int i = 0; i < size(); ++i)
            if (elements[i] == name)
                return i;
        throw UnknownSymbol("no locality element named '" + name + "'");
    }

    auto LocalityMonoid::is_chain() const -> bool
    {
        for (int i = 0; i < size(); ++i)
            for (int j = 0; j < size(); ++j)
                if (! below(i, j) && ! below(j, i))
                    return false;
        return true;
    }

    auto LocalityMonoid::maximal_elements() const -> vector<int>
    {
        vector<int> result;
        for (int i = 0; i < size(); ++i) {
            bool maximal = true;
            for (int j = 0; j < size(); ++j)
                if (j != i && below(i, j))
                    maximal = false;
            if (maximal)
                result.push_back(i);
        }
        return result;
    }

    auto LocalityMonoid::saturating_chain(int n, const string & prefix) -> LocalityMonoid
    {
        LocalityMonoid m;
        for (int i = 0; i <= n; ++i)
            m.elements.push_back(prefix + std::to_string(i));
        m.identity = 0;
        m.op.assign(n + 1, vector<int>(n + 1, 0));
        m.leq.assign(n + 1, vector<char>(n + 1, 0));
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j) {
                m.op[i][j] = std::min(i + j, n);
                m.leq[i][j] = (i <= j) ? 1 : 0;
            }
        return m;
    }

    auto SignatureSpec::sort_index(const string & name) const -> int
    {
        for (std::size_t i = 0; i < sorts.size(); ++i)
            if (sorts[i] == name)
                return int(i);
        throw UnknownSymbol("no sort named '" + name + "'");
    }

    auto SignatureSpec::relation_index(const string & name) const -> std::optional<int>
    {
        for (std::size_t i = 0; i < relations.size(); ++i)
            if (relations[i].name == name)
                return int(i);
        return std::nullopt;
    }

    auto SignatureSpec::constant_index(const string & name) const -> std::optional<int>
    {
        for (std::size_t i = 0; i < constants.size(); ++i)
            if (constants[i].name == name)
                return int(i);
        return std::nullopt;
    }

    auto SignatureSpec::locality_index(int sort, const string & name) const -> std::optional<int>
    {
        const auto & m = locality.at(sort);
        for (int i = 0; i < m.size(); ++i)
            if (m.elements[i] == name)
                return i;
        return std::nullopt;
    }

    auto SignatureSpec::bound_for(int c1, int c2) const -> std::optional<int>
    {
        auto key = std::minmax(c1, c2);
        auto it = bounds.find({key.first, key.second});
        if (it == bounds.end())
            return std::nullopt;
        return it->second;
    }

    auto SignatureSpec::set_bound(int c1, int c2, int elem) -> void
    {
        auto key = std::minmax(c1, c2);
        bounds[{key.first, key.second}] = elem;
    }

    auto SignatureSpec::constants_of_sort(int sort) const -> vector<int>
    {
        vector<int> result;
        for (std::size_t i = 0; i < constants.size(); ++i)
            if (constants[i].sort == sort)
                result.push_back(int(i));
        return result;
    }

    namespace
    {
        auto check_monoid(const LocalityMonoid & m, const string & sort, vector<ValidationIssue> & issues) -> void
        {
            auto violation = [&] (const string & law, const string & detail) {
                issues.push_back({"MonoidLawViolation", sort, law, detail});
            };

            int n = m.size();
            if (n == 0) {
                violation("nonempty", "monoid has no elements");
                return;
            }
            if (m.identity < 0 || m.identity >= n) {
                violation("identity", "identity index out of range");
                return;
            }
            if (int(m.op.size()) != n || int(m.leq.size()) != n) {
                violation("tables", "op/leq tables do not match element count");
                return;
            }
            for (int i = 0; i < n; ++i)
                if (int(m.op[i].size()) != n || int(m.leq[i].size()) != n) {
                    violation("tables", "row " + std::to_string(i) + " has wrong length");
                    return;
                }
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (m.op[i][j] < 0 || m.op[i][j] >= n) {
                        violation("closure", "op[" + m.elements[i] + "][" + m.elements[j] + "] out of range");
                        return;
                    }

            std::set<string> seen;
            for (const auto & e : m.elements)
                if (! seen.insert(e).second)
                    violation("distinct-names", "duplicate element name '" + e + "'");

            int d0 = m.identity;
            for (int i = 0; i < n; ++i) {
                if (m.op[d0][i] != i)
                    violation("left-identity", m.elements[d0] + " * " + m.elements[i] + " = " + m.elements[m.op[d0][i]]);
                if (m.op[i][d0] != i)
                    violation("right-identity", m.elements[i] + " * " + m.elements[d0] + " = " + m.elements[m.op[i][d0]]);
            }
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (m.op[i][j] != m.op[j][i]) {
                        violation("commutativity", m.elements[i] + " * " + m.elements[j] + " != " +
                                                       m.elements[j] + " * " + m.elements[i]);
                        // one witness per law is enough to act on
                        goto assoc;
                    }
        assoc:
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        if (m.op[m.op[i][j]][k] != m.op[i][m.op[j][k]]) {
                            violation("associativity", "(" + m.elements[i] + " * " + m.elements[j] + ") * " +
                                                           m.elements[k] + " != " + m.elements[i] + " * (" +
                                                           m.elements[j] + " * " + m.elements[k] + ")");
                            goto order;
                        }
        order:
            for (int i = 0; i < n; ++i)
                if (! m.below(i, i))
                    violation("order-reflexive", m.elements[i] + " not below itself");
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j && m.below(i, j) && m.below(j, i))
                        violation("order-antisymmetric", m.elements[i] + " and " + m.elements[j] + " below each other");
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        if (m.below(i, j) && m.below(j, k) && ! m.below(i, k)) {
                            violation("order-transitive", m.elements[i] + " <= " + m.elements[j] + " <= " +
                                                              m.elements[k] + " but not " + m.elements[i] + " <= " +
                                                              m.elements[k]);
                            goto least;
                        }
        least:
            for (int i = 0; i < n; ++i)
                if (! m.below(d0, i))
                    violation("identity-least", m.elements[d0] + " not below " + m.elements[i]);
        }
    }

    auto validate_signature(const SignatureSpec & spec) -> vector<ValidationIssue>
    {
        vector<ValidationIssue> issues;

        if (spec.sorts.empty())
            issues.push_back({"SortMismatch", "", "", "signature declares no sorts"});
        std::set<string> sort_names(spec.sorts.begin(), spec.sorts.end());
        if (sort_names.size() != spec.sorts.size())
            issues.push_back({"NameCollision", "", "", "duplicate sort names"});

        if (spec.locality.size() != spec.sorts.size())
            issues.push_back({"SortMismatch", "", "", "expected one locality monoid per sort"});

        for (std::size_t s = 0; s < spec.locality.size() && s < spec.sorts.size(); ++s)
            check_monoid(spec.locality[s], spec.sorts[s], issues);

        std::set<string> rel_names;
        for (const auto & r : spec.relations) {
            if (! rel_names.insert(r.name).second)
                issues.push_back({"NameCollision", "", "", "duplicate relation name '" + r.name + "'"});
            if (r.profile.empty())
                issues.push_back({"SortMismatch", "", "", "relation '" + r.name + "' has empty profile"});
            for (int s : r.profile)
                if (s < 0 || s >= int(spec.sorts.size()))
                    issues.push_back({"SortMismatch", "", "", "relation '" + r.name + "' names unknown sort"});
        }

        // Locality element names live in their sort's namespace but must not
        // shadow a relation name, or atoms become ambiguous to the parser.
        for (std::size_t s = 0; s < spec.locality.size(); ++s)
            for (const auto & e : spec.locality[s].elements)
                if (rel_names.count(e))
                    issues.push_back({"NameCollision", spec.sorts.at(s), "",
                                      "locality element '" + e + "' shadows a relation name"});

        std::set<string> const_names;
        for (const auto & c : spec.constants) {
            if (! const_names.insert(c.name).second)
                issues.push_back({"NameCollision", "", "", "duplicate constant name '" + c.name + "'"});
            if (c.sort < 0 || c.sort >= int(spec.sorts.size()))
                issues.push_back({"SortMismatch", "", "", "constant '" + c.name + "' names unknown sort"});
        }

        // Bound map: total and well-sorted over same-sort constant pairs.
        for (std::size_t i = 0; i < spec.constants.size(); ++i)
            for (std::size_t j = i; j < spec.constants.size(); ++j) {
                if (spec.constants[i].sort != spec.constants[j].sort)
                    continue;
                auto b = spec.bound_for(int(i), int(j));
                if (! b) {
                    issues.push_back({"BoundIncomplete", spec.sorts.at(spec.constants[i].sort), "",
                                      "no bound for (" + spec.constants[i].name + ", " + spec.constants[j].name + ")"});
                    continue;
                }
                const auto & m = spec.locality.at(spec.constants[i].sort);
                if (*b < 0 || *b >= m.size())
                    issues.push_back({"SortMismatch", spec.sorts.at(spec.constants[i].sort), "",
                                      "bound for (" + spec.constants[i].name + ", " + spec.constants[j].name +
                                          ") is not a locality element of the sort"});
            }
        for (const auto & [key, elem] : spec.bounds) {
            auto [i, j] = key;
            if (i < 0 || j < 0 || i >= int(spec.constants.size()) || j >= int(spec.constants.size())) {
                issues.push_back({"SortMismatch", "", "", "bound entry names unknown constant"});
                continue;
            }
            if (spec.constants[i].sort != spec.constants[j].sort)
                issues.push_back({"SortMismatch", "", "",
                                  "bound entry pairs constants of different sorts: " + spec.constants[i].name +
                                      ", " + spec.constants[j].name});
            (void) elem;
        }

        return issues;
    }

    auto require_valid(const SignatureSpec & spec) -> void
    {
        auto issues = validate_signature(spec);
        if (issues.empty())
            return;
        const auto & first = issues.front();
        string detail = first.detail + (issues.size() > 1 ? " (+" + std::to_string(issues.size() - 1) + " more)" : "");
        if (first.kind == "MonoidLawViolation")
            throw MonoidLawViolation("sort " + first.sort + ", law " + first.law + ": " + detail);
        if (first.kind == "BoundIncomplete")
            throw BoundIncomplete(detail);
        throw SortMismatch(detail);
    }

    auto is_pointed(const SignatureSpec & spec, const std::set<int> & context_sorts) -> bool
    {
        for (int s = 0; s < int(spec.sorts.size()); ++s) {
            if (context_sorts.count(s))
                continue;
            if (spec.constants_of_sort(s).empty())
                return false;
        }
        return true;
    }

    auto is_pointed(const SignatureSpec & spec) -> bool
    {
        return is_pointed(spec, {});
    }

    auto compose_locality(const SignatureSpec & spec, const ProductLocality & a, const ProductLocality & b)
        -> ProductLocality
    {
        if (a.sorts != b.sorts)
            throw SortMismatch("componentwise composition needs matching tuple sorts");
        if (a.elems.size() != a.sorts.size() || b.elems.size() != b.sorts.size())
            throw SortMismatch("product locality arity mismatch");
        ProductLocality result;
        result.sorts = a.sorts;
        for (std::size_t i = 0; i < a.sorts.size(); ++i) {
            const auto & m = spec.locality.at(a.sorts[i]);
            result.elems.push_back(m.compose(a.elems[i], b.elems[i]));
        }
        return result;
    }

    auto expand_with_constants(const SignatureSpec & spec, const vector<ConstantAddition> & additions)
        -> ExpansionResult
    {
        ExpansionResult result;
        result.spec = spec;
        auto & out = result.spec;
        string policy;

        struct Added
        {
            int index;
            int sort;
            int anchor; // index of the constant its row chain goes through, -1 when the sort was empty
        };
        vector<Added> added;

        for (const auto & add : additions) {
            if (add.sort < 0 || add.sort >= int(out.sorts.size()))
                throw SortMismatch("addition '" + add.name + "' names unknown sort");
            if (out.constant_index(add.name))
                throw SortMismatch("constant '" + add.name + "' already declared");

            auto prior = out.constants_of_sort(add.sort);
            int self = int(out.constants.size());
            out.constants.push_back({add.name, add.sort});
            const auto & m = out.locality[add.sort];

            // A4 for the reflexive pair is equality.
            out.set_bound(self, self, m.identity);

            int anchor = -1;
            for (const auto & [other_name, elem] : add.rows) {
                auto other = out.constant_index(other_name);
                if (! other)
                    throw UnknownSymbol("bound row of '" + add.name + "' names unknown constant '" + other_name + "'");
                if (out.constants[*other].sort != add.sort)
                    throw SortMismatch("bound row of '" + add.name + "' pairs different sorts");
                if (elem < 0 || elem >= m.size())
                    throw SortMismatch("bound row of '" + add.name + "' uses an unknown locality element");
                out.set_bound(self, *other, elem);
                if (anchor < 0 && *other != self)
                    anchor = *other;
            }

            if (! prior.empty() && anchor < 0)
                throw MissingAnchor("constant '" + add.name + "' joins a sort with existing constants (" +
                                    out.constants[prior.front()].name + ", ...) but names none of them");

            added.push_back({self, add.sort, anchor});
            if (anchor >= 0)
                policy += add.name + " anchored at " + out.constants[anchor].name + "; ";
            else
                policy += add.name + " opens its sort; ";
        }

        // Complete missing entries through anchors: B(x,y) := B(x,ax) * B(ax,ay) * B(ay,y).
        auto chain_to_anchor = [&] (int c) -> vector<int> {
            // walk anchor links until an original constant or a sort-opener
            vector<int> path{c};
            int cur = c;
            while (true) {
                const Added * link = nullptr;
                for (const auto & a : added)
                    if (a.index == cur) {
                        link = &a;
                        break;
                    }
                if (! link || link->anchor < 0)
                    break;
                cur = link->anchor;
                path.push_back(cur);
            }
            return path;
        };

        auto compose_along = [&] (int sort, const vector<int> & path) -> std::optional<int> {
            const auto & m = out.locality[sort];
            int acc = m.identity;
            for (std::size_t i = 0; i + 1 < path.size(); ++i) {
                auto step = out.bound_for(path[i], path[i + 1]);
                if (! step)
                    return std::nullopt;
                acc = m.compose(acc, *step);
            }
            return acc;
        };

        for (int s = 0; s < int(out.sorts.size()); ++s) {
            auto cs = out.constants_of_sort(s);
            const auto & m = out.locality[s];
            for (std::size_t i = 0; i < cs.size(); ++i)
                for (std::size_t j = i; j < cs.size(); ++j) {
                    if (out.bound_for(cs[i], cs[j]))
                        continue;
                    auto pi = chain_to_anchor(cs[i]);
                    auto pj = chain_to_anchor(cs[j]);
                    // meet the two chains at their roots, which must be
                    // boundable against each other (both original, or equal)
                    auto left = compose_along(s, pi);
                    auto right = compose_along(s, pj);
                    auto root = out.bound_for(pi.back(), pj.back());
                    if (! left || ! right || ! root)
                        throw BoundIncomplete("cannot complete bound for (" + out.constants[cs[i]].name + ", " +
                                              out.constants[cs[j]].name + ") through declared anchors");
                    out.set_bound(cs[i], cs[j], m.compose(m.compose(*left, *root), *right));
                }
        }

        result.policy = policy.empty() ? "no additions" : ("missing entries completed by *-composition; " + policy);
        require_valid(out);
        return result;
    }
}
