#include <locus/corpus.hpp>

#include <locus/eval.hpp>
#include <locus/morphism.hpp>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdlib>
#include <future>
#include <map>
#include <memory>
#include <queue>
#include <set>
#include <utility>

namespace locus
{
    namespace
    {
        using std::string;
        using std::vector;

        auto require_range(bool ok, const string & detail) -> void
        {
            if (! ok)
                throw ParameterOutOfRange(detail);
        }

        auto rel_index(const SignatureSpec & sig, const string & name) -> int
        {
            auto r = sig.relation_index(name);
            if (! r)
                throw UnknownSymbol("no relation named '" + name + "'");
            return *r;
        }

        auto loc_index(const SignatureSpec & sig, const string & name) -> int
        {
            auto e = sig.locality_index(0, name);
            if (! e)
                throw UnknownSymbol("no locality element named '" + name + "'");
            return *e;
        }

        constexpr int max_window = 30;

        auto check_window(int n) -> void
        {
            require_range(1 <= n && n <= max_window,
                "window parameter must lie in 1.." + std::to_string(max_window) + ", got "
                    + std::to_string(n));
        }

        // ---- integer windows ----

        // P_k, Q_k for k = 0..n+1 and the chain d_0..d_{2n}.
        auto z_signature(int n) -> std::shared_ptr<const SignatureSpec>
        {
            SignatureSpec sig;
            sig.sorts = {"elem"};
            for (int k = 0; k <= n + 1; ++k)
                sig.relations.push_back({"P" + std::to_string(k), {0}});
            for (int k = 0; k <= n + 1; ++k)
                sig.relations.push_back({"Q" + std::to_string(k), {0}});
            sig.locality = {LocalityMonoid::saturating_chain(2 * n)};
            return std::make_shared<SignatureSpec>(std::move(sig));
        }

        auto z_structure(std::shared_ptr<const SignatureSpec> sig, int n) -> FiniteStructure
        {
            vector<string> names;
            for (int v = -n; v <= n; ++v)
                names.push_back(std::to_string(v));
            auto m = make_structure(std::move(sig), {names});
            for (int k = 0; k <= n + 1; ++k) {
                int p = rel_index(*m.sig, "P" + std::to_string(k));
                int q = rel_index(*m.sig, "Q" + std::to_string(k));
                for (int v = -n; v <= n; ++v) {
                    if (v >= k)
                        m.relations[std::size_t(p)].insert({v + n});
                    if (v <= -k)
                        m.relations[std::size_t(q)].insert({v + n});
                }
            }
            int size = 2 * n + 1;
            for (int j = 0; j <= 2 * n; ++j)
                for (int a = 0; a < size; ++a)
                    for (int b = 0; b < size; ++b)
                        if (std::abs(a - b) <= j)
                            m.set_loc(0, j, a, b);
            m.name = "Z(" + std::to_string(n) + ")";
            return m;
        }

        // One-element companion of Z(n): all P (I) or all Q (J).
        auto z_singleton(std::shared_ptr<const SignatureSpec> sig, int n, bool all_p)
            -> FiniteStructure
        {
            auto m = make_structure(std::move(sig), {{all_p ? string("inf") : string("-inf")}});
            for (int k = 0; k <= n + 1; ++k) {
                string rel = (all_p ? "P" : "Q") + std::to_string(k);
                m.relations[std::size_t(rel_index(*m.sig, rel))].insert({0});
            }
            for (int j = 0; j <= 2 * n; ++j)
                m.set_loc(0, j, 0, 0);
            m.name = (all_p ? "I(" : "J(") + std::to_string(n) + ")";
            return m;
        }

        // ---- hamming cubes ----

        // Element names put bit k at string position k.
        auto bit_name(int value, int n) -> string
        {
            string s(std::size_t(n), '0');
            for (int k = 0; k < n; ++k)
                if (value >> k & 1)
                    s[std::size_t(k)] = '1';
            return s;
        }

        auto bit_value(const string & name) -> int
        {
            int v = 0;
            for (std::size_t k = 0; k < name.size(); ++k)
                if (name[k] == '1')
                    v |= 1 << k;
            return v;
        }

        auto check_centre(const string & centre, int n) -> void
        {
            bool ok = int(centre.size()) == n;
            for (char c : centre)
                ok = ok && (c == '0' || c == '1');
            require_range(ok,
                "centre '" + centre + "' must be a bitstring of length " + std::to_string(n));
        }

        auto hamming_signature(int n, int chain_top) -> std::shared_ptr<const SignatureSpec>
        {
            SignatureSpec sig;
            sig.sorts = {"elem"};
            for (int k = 0; k < n; ++k)
                sig.relations.push_back({"P" + std::to_string(k), {0}});
            for (int k = 0; k < n; ++k)
                sig.relations.push_back({"Q" + std::to_string(k), {0}});
            sig.locality = {LocalityMonoid::saturating_chain(chain_top)};
            return std::make_shared<SignatureSpec>(std::move(sig));
        }

        auto hamming_on(std::shared_ptr<const SignatureSpec> sig, int n, int chain_top,
            const vector<int> & values) -> FiniteStructure
        {
            vector<string> names;
            for (int v : values)
                names.push_back(bit_name(v, n));
            auto m = make_structure(std::move(sig), {names});
            for (int k = 0; k < n; ++k) {
                int p = rel_index(*m.sig, "P" + std::to_string(k));
                int q = rel_index(*m.sig, "Q" + std::to_string(k));
                for (std::size_t i = 0; i < values.size(); ++i)
                    m.relations[std::size_t(values[i] >> k & 1 ? p : q)].insert({int(i)});
            }
            for (int j = 0; j <= chain_top; ++j)
                for (std::size_t a = 0; a < values.size(); ++a)
                    for (std::size_t b = 0; b < values.size(); ++b)
                        if (std::popcount(unsigned(values[a] ^ values[b])) <= j)
                            m.set_loc(0, j, int(a), int(b));
            return m;
        }

        auto component_values(int n, int cap, const string & centre) -> vector<int>
        {
            int c = bit_value(centre);
            vector<int> values;
            for (int v = 0; v < (1 << n); ++v)
                if (std::popcount(unsigned(v ^ c)) <= cap)
                    values.push_back(v);
            return values;
        }
    }

    auto corpus_z(int n) -> FiniteStructure
    {
        check_window(n);
        return z_structure(z_signature(n), n);
    }

    auto corpus_i(int n) -> FiniteStructure
    {
        check_window(n);
        return z_singleton(z_signature(n), n, true);
    }

    auto corpus_j(int n) -> FiniteStructure
    {
        check_window(n);
        return z_singleton(z_signature(n), n, false);
    }

    auto corpus_pointed_z(int n) -> FiniteStructure
    {
        check_window(n);
        auto base = z_signature(n);
        SignatureSpec pointed = *base;
        pointed.constants.push_back({"zero", 0});
        pointed.set_bound(0, 0, pointed.locality[0].identity);
        auto m = z_structure(std::make_shared<SignatureSpec>(std::move(pointed)), n);
        m.constants = {n}; // element "0"
        m.name = "pointedZ(" + std::to_string(n) + ")";
        return m;
    }

    auto corpus_hamming(int n) -> FiniteStructure
    {
        require_range(1 <= n && n <= 10, "hamming dimension must lie in 1..10");
        vector<int> values;
        for (int v = 0; v < (1 << n); ++v)
            values.push_back(v);
        auto m = hamming_on(hamming_signature(n, n), n, n, values);
        m.name = "hamming(" + std::to_string(n) + ")";
        return m;
    }

    auto corpus_hamming_component(int n, int cap, const string & centre) -> FiniteStructure
    {
        require_range(1 <= n && n <= 12, "hamming dimension must lie in 1..12");
        require_range(1 <= cap && cap <= n, "radius cap must lie in 1..n");
        check_centre(centre, n);
        auto values = component_values(n, cap, centre);
        require_range(int(values.size()) <= 1200,
            "component around '" + centre + "' has " + std::to_string(values.size())
                + " elements; the locality tables cap out at 1200");
        auto m = hamming_on(hamming_signature(n, 2 * cap), n, 2 * cap, values);
        m.name = "hammingComp(" + std::to_string(n) + "," + std::to_string(cap) + "," + centre + ")";
        return m;
    }

    auto corpus_tree(int n) -> FiniteStructure
    {
        require_range(1 <= n && n <= 12, "tree height must lie in 1..12");
        // vertices (v1, v2) with |v1| <= v2 <= n, row v2 starting at index v2^2
        vector<std::pair<int, int>> verts;
        for (int row = 0; row <= n; ++row)
            for (int v1 = -row; v1 <= row; ++v1)
                verts.push_back({v1, row});
        int count = int(verts.size());

        vector<vector<int>> adj(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i)
            for (int j = i + 1; j < count; ++j) {
                auto [a1, a2] = verts[std::size_t(i)];
                auto [b1, b2] = verts[std::size_t(j)];
                bool row_edge = a2 == b2 && std::abs(a1 - b1) == 1;
                bool spine_edge = a1 == 0 && b1 == 0 && std::abs(a2 - b2) == 1;
                if (row_edge || spine_edge) {
                    adj[std::size_t(i)].push_back(j);
                    adj[std::size_t(j)].push_back(i);
                }
            }

        // graph distance of the truncated graph; the diameter is 2n
        vector<vector<int>> dist(std::size_t(count), vector<int>(std::size_t(count), -1));
        for (int s = 0; s < count; ++s) {
            auto & row = dist[std::size_t(s)];
            row[std::size_t(s)] = 0;
            std::queue<int> queue;
            queue.push(s);
            while (! queue.empty()) {
                int cur = queue.front();
                queue.pop();
                for (int next : adj[std::size_t(cur)])
                    if (row[std::size_t(next)] < 0) {
                        row[std::size_t(next)] = row[std::size_t(cur)] + 1;
                        queue.push(next);
                    }
            }
        }

        SignatureSpec sig;
        sig.sorts = {"elem"};
        for (int k = 0; k <= n; ++k)
            sig.relations.push_back({"P" + std::to_string(k), {0}});
        for (int k = 0; k <= n; ++k)
            sig.relations.push_back({"Q" + std::to_string(k), {0}});
        sig.relations.push_back({"S", {0}});
        sig.locality = {LocalityMonoid::saturating_chain(2 * n)};
        auto shared = std::make_shared<SignatureSpec>(std::move(sig));

        vector<string> names;
        for (auto [v1, v2] : verts)
            names.push_back("(" + std::to_string(v1) + "," + std::to_string(v2) + ")");
        auto m = make_structure(shared, {names});
        for (int i = 0; i < count; ++i) {
            auto [v1, v2] = verts[std::size_t(i)];
            for (int k = 0; k <= n; ++k) {
                if (v1 >= k)
                    m.relations[std::size_t(rel_index(*shared, "P" + std::to_string(k)))].insert({i});
                if (v1 <= -k)
                    m.relations[std::size_t(rel_index(*shared, "Q" + std::to_string(k)))].insert({i});
            }
            if (std::abs(v1) == v2)
                m.relations[std::size_t(rel_index(*shared, "S"))].insert({i});
        }
        for (int j = 0; j <= 2 * n; ++j)
            for (int a = 0; a < count; ++a)
                for (int b = 0; b < count; ++b) {
                    int d = dist[std::size_t(a)][std::size_t(b)];
                    if (0 <= d && d <= j)
                        m.set_loc(0, j, a, b);
                }
        m.name = "tree(" + std::to_string(n) + ")";
        return m;
    }

    auto corpus_zdist(int n) -> FiniteStructure
    {
        require_range(1 <= n && n <= 20, "zdist window parameter must lie in 1..20");
        SignatureSpec sig;
        sig.sorts = {"elem"};
        for (int k = 0; k <= 2 * n; ++k)
            sig.relations.push_back({"e" + std::to_string(k), {0, 0}});
        sig.locality = {LocalityMonoid::saturating_chain(2 * n)};
        auto shared = std::make_shared<SignatureSpec>(std::move(sig));

        vector<string> names;
        for (int v = -n; v <= n; ++v)
            names.push_back(std::to_string(v));
        auto m = make_structure(shared, {names});
        int size = 2 * n + 1;
        for (int a = 0; a < size; ++a)
            for (int b = 0; b < size; ++b) {
                int d = std::abs(a - b);
                m.relations[std::size_t(rel_index(*shared, "e" + std::to_string(d)))].insert({a, b});
                for (int j = d; j <= 2 * n; ++j)
                    m.set_loc(0, j, a, b);
            }
        m.name = "zdist(" + std::to_string(n) + ")";
        return m;
    }

    auto corpus_interval(int a, int b, int n) -> FiniteStructure
    {
        check_window(n);
        require_range(-n <= a && a <= b && b <= n,
            "interval bounds must satisfy -n <= a <= b <= n");
        auto z = z_structure(z_signature(n), n);
        vector<int> keep;
        for (int v = a; v <= b; ++v)
            keep.push_back(v + n);
        auto sub = induced_substructure(z, {keep});
        sub.structure.name = "interval(" + std::to_string(a) + "," + std::to_string(b) + ","
            + std::to_string(n) + ")";
        return std::move(sub.structure);
    }

    auto corpus_c(int k) -> FiniteStructure
    {
        require_range(1 <= k && k <= 4, "centred interval parameter must lie in 1..4");
        auto m = corpus_interval(-k, k, 4);
        m.name = "C(" + std::to_string(k) + ")";
        return m;
    }

    auto theory_singleton(FiniteStructure m, int search_bound) -> TheorySpec
    {
        auto name = "Th(" + m.name + ")";
        vector<FiniteStructure> cat;
        cat.push_back(std::move(m));
        return make_model_class_theory(std::move(cat), search_bound, name);
    }

    auto theory_z_family(int n, int search_bound) -> TheorySpec
    {
        check_window(n);
        auto sig = z_signature(n);
        vector<FiniteStructure> cat;
        cat.push_back(z_structure(sig, n));
        cat.push_back(z_singleton(sig, n, true));
        cat.push_back(z_singleton(sig, n, false));
        return make_model_class_theory(std::move(cat), search_bound,
            "Zfamily(" + std::to_string(n) + ")");
    }

    auto theory_c_family(int search_bound) -> TheorySpec
    {
        auto z4 = z_structure(z_signature(4), 4);
        vector<FiniteStructure> cat;
        for (int k = 1; k <= 3; ++k) {
            vector<int> keep;
            for (int v = -k; v <= k; ++v)
                keep.push_back(v + 4);
            auto sub = induced_substructure(z4, {keep});
            sub.structure.name = "C(" + std::to_string(k) + ")";
            cat.push_back(std::move(sub.structure));
        }
        return make_model_class_theory(std::move(cat), search_bound, "Cfamily");
    }

    auto theory_hamming_pair(int n, int cap, const string & centre1, const string & centre2,
        int search_bound) -> TheorySpec
    {
        require_range(1 <= n && n <= 12, "hamming dimension must lie in 1..12");
        require_range(1 <= cap && cap <= n, "radius cap must lie in 1..n");
        check_centre(centre1, n);
        check_centre(centre2, n);
        require_range(centre1 != centre2, "the two component centres must differ");
        auto sig = hamming_signature(n, 2 * cap);
        vector<FiniteStructure> cat;
        for (const auto & centre : {centre1, centre2}) {
            auto values = component_values(n, cap, centre);
            require_range(int(values.size()) <= 1200,
                "component around '" + centre + "' has " + std::to_string(values.size())
                    + " elements; the locality tables cap out at 1200");
            auto m = hamming_on(sig, n, 2 * cap, values);
            m.name = "hammingComp(" + std::to_string(n) + "," + std::to_string(cap) + ","
                + centre + ")";
            cat.push_back(std::move(m));
        }
        return make_model_class_theory(std::move(cat), search_bound,
            "hammingCompPair(" + std::to_string(n) + "," + std::to_string(cap) + "," + centre1
                + "," + centre2 + ")");
    }

    namespace
    {
        auto trimmed(const string & s) -> string
        {
            std::size_t b = 0, e = s.size();
            while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
                ++b;
            while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
                --e;
            return s.substr(b, e - b);
        }

        auto to_int(const string & s) -> int
        {
            std::size_t pos = 0;
            int value = 0;
            try {
                value = std::stoi(s, &pos);
            } catch (const std::exception &) {
                throw BadInput("corpus parameter '" + s + "' is not an integer");
            }
            if (pos != s.size())
                throw BadInput("corpus parameter '" + s + "' is not an integer");
            return value;
        }

        auto expect_args(const CorpusId & id, std::size_t count) -> void
        {
            if (id.args.size() != count)
                throw BadInput("corpus id '" + id.name + "' takes " + std::to_string(count)
                    + " parameter(s), got " + std::to_string(id.args.size()));
        }
    }

    auto parse_corpus_id(const string & text) -> CorpusId
    {
        string t = trimmed(text);
        if (t.empty())
            throw BadInput("empty corpus id");
        auto open = t.find('(');
        CorpusId id;
        if (open == string::npos) {
            id.name = t;
        } else {
            if (t.back() != ')')
                throw BadInput("corpus id '" + text + "' is missing its closing parenthesis");
            id.name = trimmed(t.substr(0, open));
            string inner = t.substr(open + 1, t.size() - open - 2);
            if (! trimmed(inner).empty()) {
                int depth = 0;
                string current;
                for (char c : inner) {
                    if (c == '(')
                        ++depth;
                    if (c == ')' && --depth < 0)
                        throw BadInput("unbalanced parentheses in corpus id '" + text + "'");
                    if (c == ',' && depth == 0) {
                        id.args.push_back(trimmed(current));
                        current.clear();
                    } else
                        current += c;
                }
                if (depth != 0)
                    throw BadInput("unbalanced parentheses in corpus id '" + text + "'");
                id.args.push_back(trimmed(current));
            }
        }
        if (id.name.empty())
            throw BadInput("corpus id '" + text + "' has no name");
        for (const auto & arg : id.args)
            if (arg.empty())
                throw BadInput("corpus id '" + text + "' has an empty parameter");
        return id;
    }

    auto format_corpus_id(const CorpusId & id) -> string
    {
        if (id.args.empty())
            return id.name;
        string out = id.name + "(";
        for (std::size_t i = 0; i < id.args.size(); ++i)
            out += (i ? "," : "") + id.args[i];
        return out + ")";
    }

    auto build_corpus(const CorpusId & id) -> CorpusItem
    {
        const auto & n = id.name;
        if (n == "Z") {
            expect_args(id, 1);
            return corpus_z(to_int(id.args[0]));
        }
        if (n == "I") {
            expect_args(id, 1);
            return corpus_i(to_int(id.args[0]));
        }
        if (n == "J") {
            expect_args(id, 1);
            return corpus_j(to_int(id.args[0]));
        }
        if (n == "pointedZ") {
            expect_args(id, 1);
            return corpus_pointed_z(to_int(id.args[0]));
        }
        if (n == "hamming") {
            expect_args(id, 1);
            return corpus_hamming(to_int(id.args[0]));
        }
        if (n == "hammingComp") {
            expect_args(id, 3);
            return corpus_hamming_component(to_int(id.args[0]), to_int(id.args[1]), id.args[2]);
        }
        if (n == "tree") {
            expect_args(id, 1);
            return corpus_tree(to_int(id.args[0]));
        }
        if (n == "zdist") {
            expect_args(id, 1);
            return corpus_zdist(to_int(id.args[0]));
        }
        if (n == "C") {
            expect_args(id, 1);
            return corpus_c(to_int(id.args[0]));
        }
        if (n == "interval") {
            expect_args(id, 3);
            return corpus_interval(to_int(id.args[0]), to_int(id.args[1]), to_int(id.args[2]));
        }
        if (n == "theory") {
            expect_args(id, 1);
            auto item = build_corpus(parse_corpus_id(id.args[0]));
            if (! std::holds_alternative<FiniteStructure>(item))
                throw BadInput("theory(...) takes a structure id");
            return theory_singleton(std::get<FiniteStructure>(std::move(item)));
        }
        if (n == "Zfamily") {
            expect_args(id, 1);
            return theory_z_family(to_int(id.args[0]));
        }
        if (n == "Cfamily") {
            expect_args(id, 0);
            return theory_c_family();
        }
        if (n == "hammingCompPair") {
            expect_args(id, 4);
            return theory_hamming_pair(to_int(id.args[0]), to_int(id.args[1]), id.args[2],
                id.args[3]);
        }
        throw UnknownSymbol("unknown corpus id '" + n + "'");
    }

    auto build_corpus(const string & text) -> CorpusItem
    {
        return build_corpus(parse_corpus_id(text));
    }

    auto corpus_grammar() -> vector<string>
    {
        return {
            "Z(n)                          1 <= n <= 30: integer window [-n,n], predicates P0..P{n+1}/Q0..Q{n+1}, chain d0..d{2n}",
            "I(n), J(n)                    1 <= n <= 30: one-element companions of Z(n), all P resp. all Q",
            "pointedZ(n)                   1 <= n <= 30: Z(n) with a constant zero at 0, bound(zero,zero) = d0",
            "hamming(n)                    1 <= n <= 10: bitstrings 2^n, P_k/Q_k per bit, Hamming chain d0..dn",
            "hammingComp(n,cap,centre)     1 <= cap <= n <= 12: Hamming ball around centre, chain d0..d{2cap}",
            "tree(n)                       1 <= n <= 12: truncated tree of paths, P/Q/S, graph-distance chain d0..d{2n}",
            "zdist(n)                      1 <= n <= 20: integer window with exact-distance relations e0..e{2n}",
            "C(k)                          1 <= k <= 4: centred interval [-k,k] in the Z(4) signature",
            "interval(a,b,n)               -n <= a <= b <= n: induced interval of Z(n)",
            "theory(<structure id>)        one-member catalogue theory of the given structure",
            "Zfamily(n)                    catalogue {Z(n), I(n), J(n)}",
            "Cfamily                       catalogue {C(1), C(2), C(3)}",
            "hammingCompPair(n,cap,c1,c2)  catalogue of two Hamming balls in one signature",
        };
    }

    auto full_distance_decomposition(const FormulaPtr & phi, const FiniteStructure & m,
        const Fragment & frag) -> DistanceDecomposition
    {
        if (! classify(phi).positive)
            throw ClassMismatch("full distance decomposition takes a positive formula");
        const auto & vars = frag.free_variables;
        for (const auto & [name, sort] : free_variables(phi)) {
            bool covered = false;
            for (const auto & v : vars)
                covered = covered || (v.first == name && v.second == sort);
            if (! covered)
                throw BadInput("the fragment context must cover the formula's free variables");
        }
        int sort = vars.empty() ? 0 : vars.front().second;
        for (const auto & v : vars)
            if (v.second != sort)
                throw BadInput("full distance decomposition needs a single-sorted variable context");

        // exact-distance relations: binary e<k> on the context sort
        const auto & sig = *m.sig;
        std::map<int, int> e_rel; // distance value -> relation index
        for (std::size_t r = 0; r < sig.relations.size(); ++r) {
            const auto & decl = sig.relations[r];
            if (decl.profile != vector<int>{sort, sort})
                continue;
            if (decl.name.size() < 2 || decl.name[0] != 'e')
                continue;
            bool digits = true;
            for (std::size_t i = 1; i < decl.name.size(); ++i)
                digits = digits && std::isdigit(static_cast<unsigned char>(decl.name[i]));
            if (digits)
                e_rel[to_int(decl.name.substr(1))] = int(r);
        }
        if (e_rel.empty())
            throw BadInput("the structure has no exact-distance relations named e0, e1, ...");

        int size = m.size(sort);
        vector<int> pair_value(std::size_t(size) * std::size_t(size), -1);
        for (int a = 0; a < size; ++a)
            for (int b = 0; b < size; ++b)
                for (const auto & [value, r] : e_rel)
                    if (m.rel_has(r, {a, b})) {
                        pair_value[std::size_t(a) * std::size_t(size) + std::size_t(b)] = value;
                        break;
                    }

        auto satisfied = definable_set(m, phi, vars);

        int k = int(vars.size());
        auto profile_of = [&](const vector<int> & tuple) -> vector<int> {
            vector<int> p;
            for (int i = 0; i < k; ++i)
                for (int j = i + 1; j < k; ++j)
                    p.push_back(pair_value[std::size_t(tuple[std::size_t(i)]) * std::size_t(size)
                        + std::size_t(tuple[std::size_t(j)])]);
            return p;
        };
        auto expressible = [](const vector<int> & p) -> bool {
            return std::find(p.begin(), p.end(), -1) == p.end();
        };

        // first pass: profiles the formula's set touches
        std::set<vector<int>> touched;
        vector<int> tuple(std::size_t(k), 0);
        auto advance = [&]() -> bool {
            for (int i = k - 1; i >= 0; --i) {
                if (++tuple[std::size_t(i)] < size)
                    return true;
                tuple[std::size_t(i)] = 0;
            }
            return false;
        };
        if (size == 0 && k > 0)
            throw BadInput("full distance decomposition needs a nonempty sort");
        do {
            if (satisfied.count(tuple)) {
                auto p = profile_of(tuple);
                if (expressible(p))
                    touched.insert(std::move(p));
            }
        } while (advance());

        DistanceDecomposition result;
        result.profiles.assign(touched.begin(), touched.end());

        vector<FormulaPtr> disjuncts;
        for (const auto & p : result.profiles) {
            vector<FormulaPtr> literals;
            std::size_t idx = 0;
            for (int i = 0; i < k; ++i)
                for (int j = i + 1; j < k; ++j) {
                    literals.push_back(atom(e_rel.at(p[idx]),
                        {make_var(vars[std::size_t(i)].first, sort),
                            make_var(vars[std::size_t(j)].first, sort)}));
                    ++idx;
                }
            if (literals.empty())
                disjuncts.push_back(top());
            else if (literals.size() == 1)
                disjuncts.push_back(literals.front());
            else
                disjuncts.push_back(conj(std::move(literals)));
        }
        if (disjuncts.empty())
            result.disjunction = bot();
        else if (disjuncts.size() == 1)
            result.disjunction = disjuncts.front();
        else
            result.disjunction = disj(std::move(disjuncts));

        // second pass: symmetric difference between the formula's set and
        // the union of the collected profile classes
        tuple.assign(std::size_t(k), 0);
        do {
            auto p = profile_of(tuple);
            bool covered = expressible(p) && touched.count(p) > 0;
            bool in_set = satisfied.count(tuple) > 0;
            if (covered != in_set) {
                vector<string> names;
                for (int value : tuple)
                    names.push_back(m.universe[std::size_t(sort)][std::size_t(value)]);
                result.residual.push_back(std::move(names));
            }
        } while (advance());
        result.exact = result.residual.empty();
        return result;
    }

    auto PaperReport::all_passed() const -> bool
    {
        for (const auto & check : checks)
            if (! check.passed)
                return false;
        return true;
    }

    namespace
    {
        auto checks_z_family() -> vector<PaperCheck>
        {
            vector<PaperCheck> out;
            auto t = theory_z_family(6);
            const auto & sig = *t.sig;

            bool triple = true;
            string detail = "Z(6), I(6), J(6) are all positively closed in the catalogue";
            for (const auto & member : t.catalogue) {
                auto report = check_locally_positively_closed(member, t.catalogue);
                if (! report.closed) {
                    triple = false;
                    detail = member.name + " is not positively closed";
                    break;
                }
            }
            out.push_back({"Z-family/pc-triple", triple, detail});

            auto x = make_var("x", 0);
            auto y = make_var("y", 0);
            auto body = conj({loc_atom(0, loc_index(sig, "d2"), x, y),
                atom(rel_index(sig, "P2"), {x}), atom(rel_index(sig, "Q2"), {y})});
            auto sentence = neg(exists("x", 0, exists("y", 0, body)));
            auto ent = locally_entails(t, sentence);
            out.push_back({"Z-family/d2-obstruction", ent.entailed && ent.definitive,
                ent.entailed ? "no member holds P2 and Q2 within d2"
                             : "countermodel found in the catalogue"});
            return out;
        }

        auto checks_tree() -> vector<PaperCheck>
        {
            vector<PaperCheck> out;
            auto t = theory_singleton(corpus_tree(5));
            const auto & sig = *t.sig;
            auto x = make_var("x", 0);

            Fragment frag;
            frag.cls = FragmentClass::PrimitivePositive;
            frag.max_quantifier_depth = 0;
            frag.max_connective_width = 2;
            frag.free_variables = {{"x", 0}};

            auto p0 = atom(rel_index(sig, "P0"), {x});
            auto q0 = atom(rel_index(sig, "Q0"), {x});
            auto comp = check_approx_complementary(t, p0, q0, ApproxMode::Complementary, frag);
            out.push_back({"tree/P0-complementary-Q0", comp.holds,
                comp.holds ? std::to_string(comp.denials_checked) + " denial(s) checked"
                           : "violating denial found"});

            bool approx = true;
            string detail = "Q1..Q5 all approximate Q0";
            for (int k = 1; k <= 5 && approx; ++k) {
                auto qk = atom(rel_index(sig, "Q" + std::to_string(k)), {x});
                auto rep = check_approx_complementary(t, qk, q0, ApproxMode::Approximates, frag);
                if (! rep.holds) {
                    approx = false;
                    detail = "Q" + std::to_string(k) + " does not approximate Q0";
                }
            }
            out.push_back({"tree/Qn-approximates-Q0", approx, detail});

            // theta(x) = S(x) and exists y within d1 with P0 and Q0: the
            // spike tips next to the spine; no P2 point lies within d3
            auto y = make_var("y", 0);
            auto theta = conj({atom(rel_index(sig, "S"), {x}),
                exists("y", 0,
                    conj({loc_atom(0, loc_index(sig, "d1"), x, y),
                        atom(rel_index(sig, "P0"), {y}), atom(rel_index(sig, "Q0"), {y})}))});
            auto z = make_var("z", 0);
            auto sentence = neg(exists("x", 0,
                exists("z", 0,
                    conj({theta, atom(rel_index(sig, "P2"), {z}),
                        loc_atom(0, loc_index(sig, "d3"), x, z)}))));
            auto ent = locally_entails(t, sentence);
            out.push_back({"tree/spike-obstruction", ent.entailed && ent.definitive,
                ent.entailed ? "no P2 point within d3 of a spine-adjacent spike tip"
                             : "countermodel found"});
            return out;
        }

        auto checks_hamming() -> vector<PaperCheck>
        {
            vector<PaperCheck> out;

            {
                auto t = theory_singleton(corpus_hamming(3));
                const auto & sig = *t.sig;
                auto x = make_var("x", 0);
                Fragment frag;
                frag.cls = FragmentClass::PrimitivePositive;
                frag.max_quantifier_depth = 0;
                frag.max_connective_width = 1;
                frag.free_variables = {{"x", 0}};
                auto denials = find_denials(t, atom(rel_index(sig, "P0"), {x}), frag);
                int q0 = rel_index(sig, "Q0");
                bool found = false;
                for (const auto & d : denials)
                    found = found
                        || (d.psi->kind == Formula::Kind::Atom && d.psi->rel == q0
                            && d.psi->terms.front().name == "x");
                out.push_back({"hamming/P0-denied-by-Q0", found,
                    found ? "Q0(x) appears among " + std::to_string(denials.size()) + " denial(s)"
                          : "Q0(x) missing from the denial list"});
            }

            {
                auto cube = corpus_hamming(4);
                auto centre = cube.element_index(0, "0000");
                auto d1 = loc_index(*cube.sig, "d1");
                std::set<string> got;
                for (int e : ball(cube, 0, d1, centre))
                    got.insert(cube.universe[0][std::size_t(e)]);
                std::set<string> want = {"0000", "1000", "0100", "0010", "0001"};
                out.push_back({"hamming/unit-ball", got == want,
                    got == want ? "ball(d1, 0000) is the centre plus its four neighbours"
                                : "unexpected ball contents"});
            }

            {
                auto t = theory_hamming_pair(5, 2, "00000", "11111");
                const auto & sig = *t.sig;
                auto ljcp = check_ljcp(t);
                bool split = ! ljcp.holds && ljcp.failing_pair
                    && *ljcp.failing_pair == std::make_pair(0, 1);
                out.push_back({"hamming/pair-no-continuation", split,
                    split ? "the two components admit no joint continuation"
                          : "unexpected joint continuation"});

                // x and y differing in coordinates 0..2 cannot sit within d2
                auto x = make_var("x", 0);
                auto y = make_var("y", 0);
                vector<FormulaPtr> parts;
                for (int c = 0; c <= 2; ++c) {
                    auto p = atom(rel_index(sig, "P" + std::to_string(c)), {x});
                    auto q = atom(rel_index(sig, "Q" + std::to_string(c)), {y});
                    auto p2 = atom(rel_index(sig, "P" + std::to_string(c)), {y});
                    auto q2 = atom(rel_index(sig, "Q" + std::to_string(c)), {x});
                    parts.push_back(disj({conj({p, q}), conj({q2, p2})}));
                }
                parts.push_back(loc_atom(0, loc_index(sig, "d2"), x, y));
                auto sentence = neg(exists("x", 0, exists("y", 0, conj(std::move(parts)))));
                auto ent = locally_entails(t, sentence);
                out.push_back({"hamming/pair-distance-obstruction", ent.entailed && ent.definitive,
                    ent.entailed ? "three flipped coordinates force distance above d2"
                                 : "countermodel found"});
            }

            {
                auto a = corpus_hamming_component(4, 2, "0000");
                auto b = corpus_hamming_component(4, 2, "0001");
                Fragment frag;
                frag.cls = FragmentClass::Positive;
                frag.max_quantifier_depth = 1;
                frag.max_connective_width = 2;
                frag.max_body_width = 1;
                frag.free_variables = {{"x", 0}};
                frag.allowed_relations = {"P0", "P1", "P2", "Q0", "Q1", "Q2"};
                // one locality level keeps the sweep tractable; the shift
                // isomorphism preserves distances, so any level would do
                frag.allowed_locality = {"d2"};
                auto cmp = compare_negative_theories(a, b, frag);
                out.push_back({"hamming/shifted-components-agree", cmp.equal,
                    cmp.equal ? "negative theories agree on the three shared coordinates"
                              : "separating sentence found"});
            }
            return out;
        }

        auto checks_zdist() -> vector<PaperCheck>
        {
            vector<PaperCheck> out;

            Fragment frag;
            frag.cls = FragmentClass::Positive;
            frag.max_quantifier_depth = 1;
            frag.max_connective_width = 2;
            frag.free_variables = {{"x", 0}, {"y", 0}};

            {
                auto m = corpus_zdist(6);
                auto x = make_var("x", 0);
                auto y = make_var("y", 0);
                auto dec =
                    full_distance_decomposition(loc_atom(0, loc_index(*m.sig, "d2"), x, y), m, frag);
                bool ok = dec.exact && dec.profiles == vector<vector<int>>{{0}, {1}, {2}};
                out.push_back({"zdist/d2-decomposition", ok,
                    ok ? "d2 = e0 or e1 or e2, exactly" : "unexpected decomposition"});
            }

            {
                auto m = corpus_zdist(8);
                const auto & sig = *m.sig;
                auto x = make_var("x", 0);
                auto y = make_var("y", 0);
                auto z = make_var("z", 0);
                auto phi = exists("z", 0,
                    conj({atom(rel_index(sig, "e1"), {x, z}), atom(rel_index(sig, "e2"), {y, z})}));
                auto dec = full_distance_decomposition(phi, m, frag);
                bool profiles_ok = dec.profiles == vector<vector<int>>{{1}, {3}};
                bool residual_ok = dec.residual
                    == vector<vector<string>>{{"-8", "-7"}, {"8", "7"}};
                out.push_back({"zdist/step-pattern-decomposition",
                    ! dec.exact && profiles_ok && residual_ok,
                    profiles_ok ? "e1 or e3 covers the set except at the two window ends"
                                : "unexpected profile set"});
            }

            {
                auto m = corpus_zdist(4);
                auto autos = find_homomorphisms(m, m);
                bool ok = autos.size() == 2;
                out.push_back({"zdist/rigid-up-to-negation", ok,
                    ok ? "exactly the identity and the reflection preserve all e_k"
                       : std::to_string(autos.size()) + " self-maps found"});
            }
            return out;
        }

        auto checks_c() -> vector<PaperCheck>
        {
            vector<PaperCheck> out;
            auto t = theory_c_family();
            Fragment frag;
            frag.cls = FragmentClass::Positive;
            frag.max_quantifier_depth = 0;
            frag.max_connective_width = 2;
            frag.free_variables = {{"x", 0}};
            auto rep =
                check_irreducibility(t, IrreducibilityMode::Uniform, frag, loc_index(*t.sig, "d6"));
            out.push_back({"C/uniformly-irreducible-at-d6", rep.holds && rep.definitive,
                rep.holds ? "every satisfiable pair meets within d6"
                          : "pair refused at d6"});
            return out;
        }

        auto checks_pointed_z() -> vector<PaperCheck>
        {
            vector<PaperCheck> out;
            auto t = theory_singleton(corpus_pointed_z(6));
            Fragment frag;
            frag.cls = FragmentClass::Positive;
            frag.max_quantifier_depth = 0;
            frag.max_connective_width = 1;
            frag.free_variables = {{"x", 0}};
            auto rep = check_irreducibility(t, IrreducibilityMode::UniformSearch, frag);
            int top_elem = loc_index(*t.sig, "d12");
            bool only_top = rep.holds && rep.witness_elem && *rep.witness_elem == top_elem;
            for (const auto & verdict : rep.per_element)
                if (verdict.elem != top_elem && verdict.holds)
                    only_top = false;
            out.push_back({"pointedZ/uniform-only-at-top", only_top,
                only_top ? "the saturated top is the only uniform locality element"
                         : "unexpected uniform element below the top"});
            return out;
        }
    }

    auto run_paper_checks(const vector<string> & scope) -> PaperReport
    {
        using Bundle = vector<PaperCheck> (*)();
        static const std::map<string, Bundle> bundles = {
            {"Z-family", &checks_z_family},
            {"tree", &checks_tree},
            {"hamming", &checks_hamming},
            {"zdist", &checks_zdist},
            {"C", &checks_c},
            {"pointedZ", &checks_pointed_z},
        };
        for (const auto & s : scope)
            if (! bundles.count(s))
                throw BadInput("unknown check scope '" + s + "'");
        vector<std::future<vector<PaperCheck>>> futures;
        for (const auto & s : scope)
            futures.push_back(std::async(std::launch::async, bundles.at(s)));
        PaperReport report;
        for (auto & f : futures) {
            auto checks = f.get();
            report.checks.insert(report.checks.end(), checks.begin(), checks.end());
        }
        return report;
    }
}
