#include <locus/parser.hpp>

#include <memory>
#include <vector>

using std::string;
using std::vector;

namespace locus
{
    namespace
    {
        struct Token
        {
            enum class Kind
            {
                Name,
                Symbol,
                End
            };
            Kind kind;
            string text;
            std::size_t pos;
        };

        auto tokenize(const string & text) -> vector<Token>
        {
            vector<Token> out;
            std::size_t i = 0;
            auto is_name_start = [] (char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
            auto is_name_char = [] (char c) {
                return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
            };
            while (i < text.size()) {
                char c = text[i];
                if (std::isspace(static_cast<unsigned char>(c))) {
                    ++i;
                    continue;
                }
                if (is_name_start(c)) {
                    std::size_t start = i;
                    while (i < text.size() && is_name_char(text[i]))
                        ++i;
                    out.push_back({Token::Kind::Name, text.substr(start, i - start), start});
                    continue;
                }
                if (string("()&|!=.,:").find(c) != string::npos) {
                    out.push_back({Token::Kind::Symbol, string(1, c), i});
                    ++i;
                    continue;
                }
                throw SyntaxError("unexpected character '" + string(1, c) + "' at position " + std::to_string(i));
            }
            out.push_back({Token::Kind::End, "", text.size()});
            return out;
        }

        // Unelaborated tree: names resolved and sorts assigned afterwards.
        struct Raw
        {
            enum class Kind
            {
                Top,
                Bot,
                Eq,
                Atom,
                And,
                Or,
                Not,
                Exists,
                Forall
            };
            Kind kind;
            string name;      // atom head or bound variable
            string sort_name; // ':' annotation
            string loc_name;  // 'in d' bound, empty for unrestricted quantifiers
            string anchor;    // anchor term name
            vector<string> terms;
            vector<std::unique_ptr<Raw>> kids;
        };
        using RawPtr = std::unique_ptr<Raw>;

        struct Parser
        {
            vector<Token> tokens;
            std::size_t at = 0;

            auto peek() const -> const Token & { return tokens[at]; }

            auto accept_symbol(const string & s) -> bool
            {
                if (peek().kind == Token::Kind::Symbol && peek().text == s) {
                    ++at;
                    return true;
                }
                return false;
            }

            auto expect_symbol(const string & s) -> void
            {
                if (! accept_symbol(s))
                    throw SyntaxError("expected '" + s + "' at position " + std::to_string(peek().pos));
            }

            auto expect_name(const string & what) -> string
            {
                if (peek().kind != Token::Kind::Name)
                    throw SyntaxError("expected " + what + " at position " + std::to_string(peek().pos));
                return tokens[at++].text;
            }

            auto make(Raw::Kind k) -> RawPtr
            {
                auto r = std::make_unique<Raw>();
                r->kind = k;
                return r;
            }

            auto parse_formula() -> RawPtr
            {
                auto left = parse_conjunction();
                if (peek().kind == Token::Kind::Symbol && peek().text == "|") {
                    auto d = make(Raw::Kind::Or);
                    d->kids.push_back(std::move(left));
                    while (accept_symbol("|"))
                        d->kids.push_back(parse_conjunction());
                    return d;
                }
                return left;
            }

            auto parse_conjunction() -> RawPtr
            {
                auto left = parse_unary();
                if (peek().kind == Token::Kind::Symbol && peek().text == "&") {
                    auto c = make(Raw::Kind::And);
                    c->kids.push_back(std::move(left));
                    while (accept_symbol("&"))
                        c->kids.push_back(parse_unary());
                    return c;
                }
                return left;
            }

            auto parse_unary() -> RawPtr
            {
                if (accept_symbol("!")) {
                    auto n = make(Raw::Kind::Not);
                    n->kids.push_back(parse_unary());
                    return n;
                }
                if (accept_symbol("(")) {
                    auto inner = parse_formula();
                    expect_symbol(")");
                    return inner;
                }
                if (peek().kind != Token::Kind::Name)
                    throw SyntaxError("expected a formula at position " + std::to_string(peek().pos));

                const string head = peek().text;
                if (head == "true" || head == "false") {
                    ++at;
                    return make(head == "true" ? Raw::Kind::Top : Raw::Kind::Bot);
                }
                if (head == "exists" || head == "forall")
                    return parse_quantified(head == "exists");

                ++at;
                if (accept_symbol("(")) {
                    auto a = make(Raw::Kind::Atom);
                    a->name = head;
                    a->terms.push_back(expect_name("term"));
                    while (accept_symbol(","))
                        a->terms.push_back(expect_name("term"));
                    expect_symbol(")");
                    return a;
                }
                expect_symbol("=");
                auto e = make(Raw::Kind::Eq);
                e->terms.push_back(head);
                e->terms.push_back(expect_name("term"));
                return e;
            }

            auto parse_quantified(bool is_exists) -> RawPtr
            {
                ++at; // the keyword
                auto q = make(is_exists ? Raw::Kind::Exists : Raw::Kind::Forall);
                q->name = expect_name("bound variable");
                if (accept_symbol(":"))
                    q->sort_name = expect_name("sort");
                if (peek().kind == Token::Kind::Name && peek().text == "in") {
                    if (! is_exists)
                        throw SyntaxError("universal quantifiers take no locality bound (position " +
                                          std::to_string(peek().pos) + ")");
                    ++at;
                    q->loc_name = expect_name("locality element");
                    expect_symbol("(");
                    q->anchor = expect_name("anchor term");
                    expect_symbol(")");
                }
                expect_symbol(".");
                q->kids.push_back(parse_formula());
                return q;
            }
        };

        // Sort assignment. Variable slots are shared between the binder and
        // its occurrences; free variables get one global slot per name.
        struct Slot
        {
            string name;
            int sort = -1;
        };

        struct Elaborator
        {
            const SignatureSpec & sig;
            std::map<string, std::shared_ptr<Slot>> free_slots;
            bool changed = false;

            auto set_sort(const std::shared_ptr<Slot> & slot, int sort) -> void
            {
                if (sort < 0)
                    return;
                if (slot->sort < 0) {
                    slot->sort = sort;
                    changed = true;
                }
                else if (slot->sort != sort)
                    throw SortError("variable '" + slot->name + "' used at sorts " + sig.sorts.at(slot->sort) +
                                    " and " + sig.sorts.at(sort));
            }

            using Scope = vector<std::shared_ptr<Slot>>;

            auto term_slot(const string & name, Scope & scope) -> std::shared_ptr<Slot>
            {
                for (auto it = scope.rbegin(); it != scope.rend(); ++it)
                    if ((*it)->name == name)
                        return *it;
                if (sig.constant_index(name))
                    return nullptr; // constants have fixed sorts
                auto & slot = free_slots[name];
                if (! slot)
                    slot = std::make_shared<Slot>(Slot{name, -1});
                return slot;
            }

            auto term_sort(const string & name, Scope & scope) -> int
            {
                if (auto c = sig.constant_index(name))
                    return sig.constants[*c].sort;
                auto slot = term_slot(name, scope);
                return slot ? slot->sort : -1;
            }

            auto constrain_term(const string & name, int sort, Scope & scope) -> void
            {
                if (auto c = sig.constant_index(name)) {
                    if (sort >= 0 && sig.constants[*c].sort != sort)
                        throw SortError("constant '" + name + "' used at sort " + sig.sorts.at(sort));
                    return;
                }
                if (auto slot = term_slot(name, scope))
                    set_sort(slot, sort);
            }

            // sorts whose monoid contains an element of this name
            auto locality_candidates(const string & name) const -> vector<int>
            {
                vector<int> out;
                for (int s = 0; s < int(sig.sorts.size()); ++s)
                    if (sig.locality_index(s, name))
                        out.push_back(s);
                return out;
            }

            auto pass(Raw & r, Scope & scope) -> void
            {
                switch (r.kind) {
                case Raw::Kind::Top:
                case Raw::Kind::Bot:
                    break;
                case Raw::Kind::Eq: {
                    int s0 = term_sort(r.terms[0], scope);
                    int s1 = term_sort(r.terms[1], scope);
                    constrain_term(r.terms[0], s1, scope);
                    constrain_term(r.terms[1], s0, scope);
                    break;
                }
                case Raw::Kind::Atom: {
                    if (auto rel = sig.relation_index(r.name)) {
                        const auto & profile = sig.relations[*rel].profile;
                        if (profile.size() != r.terms.size())
                            throw SortError("relation '" + r.name + "' expects " +
                                            std::to_string(profile.size()) + " arguments");
                        for (std::size_t i = 0; i < r.terms.size(); ++i)
                            constrain_term(r.terms[i], profile[i], scope);
                        break;
                    }
                    auto candidates = locality_candidates(r.name);
                    if (candidates.empty())
                        throw UnknownSymbol("no relation or locality element named '" + r.name + "'");
                    if (r.terms.size() != 2)
                        throw SortError("locality atom '" + r.name + "' expects 2 arguments");
                    int known = -1;
                    for (const auto & t : r.terms)
                        if (int s = term_sort(t, scope); s >= 0)
                            known = s;
                    if (known < 0 && candidates.size() == 1)
                        known = candidates.front();
                    if (known >= 0) {
                        if (! sig.locality_index(known, r.name))
                            throw SortError("sort " + sig.sorts.at(known) + " has no locality element '" + r.name +
                                            "'");
                        for (const auto & t : r.terms)
                            constrain_term(t, known, scope);
                    }
                    break;
                }
                case Raw::Kind::And:
                case Raw::Kind::Or:
                case Raw::Kind::Not:
                    for (auto & k : r.kids)
                        pass(*k, scope);
                    break;
                case Raw::Kind::Exists:
                case Raw::Kind::Forall: {
                    auto slot = std::make_shared<Slot>(Slot{r.name, -1});
                    if (! r.sort_name.empty())
                        slot->sort = sig.sort_index(r.sort_name);
                    if (! r.loc_name.empty()) {
                        if (r.anchor == r.name)
                            throw AnchorContainsBoundVar("anchor of '" + r.name + "' is the bound variable itself");
                        auto candidates = locality_candidates(r.loc_name);
                        if (candidates.empty())
                            throw UnknownSymbol("no locality element named '" + r.loc_name + "'");
                        int s = slot->sort;
                        if (s < 0)
                            s = term_sort(r.anchor, scope);
                        if (s < 0 && candidates.size() == 1)
                            s = candidates.front();
                        if (s >= 0) {
                            if (! sig.locality_index(s, r.loc_name))
                                throw SortError("sort " + sig.sorts.at(s) + " has no locality element '" +
                                                r.loc_name + "'");
                            set_sort(slot, s);
                            constrain_term(r.anchor, s, scope);
                        }
                    }
                    scope.push_back(slot);
                    pass(*r.kids[0], scope);
                    scope.pop_back();
                    // remember what we learned for the next pass
                    if (slot->sort >= 0 && r.sort_name.empty())
                        r.sort_name = sig.sorts.at(slot->sort);
                    break;
                }
                }
            }

            auto build_term(const string & name, Scope & scope) -> Term
            {
                if (auto slot = term_slot(name, scope); slot) {
                    if (slot->sort < 0)
                        throw SortError("cannot determine the sort of '" + name + "'");
                    return make_var(name, slot->sort);
                }
                return make_const(sig, *sig.constant_index(name));
            }

            auto build(Raw & r, Scope & scope) -> FormulaPtr
            {
                switch (r.kind) {
                case Raw::Kind::Top: return top();
                case Raw::Kind::Bot: return bot();
                case Raw::Kind::Eq: return equal(build_term(r.terms[0], scope), build_term(r.terms[1], scope));
                case Raw::Kind::Atom: {
                    if (auto rel = sig.relation_index(r.name)) {
                        vector<Term> ts;
                        for (const auto & t : r.terms)
                            ts.push_back(build_term(t, scope));
                        return atom(*rel, std::move(ts));
                    }
                    Term a = build_term(r.terms[0], scope);
                    Term b = build_term(r.terms[1], scope);
                    auto elem = sig.locality_index(a.sort, r.name);
                    if (! elem)
                        throw SortError("sort " + sig.sorts.at(a.sort) + " has no locality element '" + r.name + "'");
                    return loc_atom(a.sort, *elem, std::move(a), std::move(b));
                }
                case Raw::Kind::And:
                case Raw::Kind::Or: {
                    vector<FormulaPtr> kids;
                    for (auto & k : r.kids)
                        kids.push_back(build(*k, scope));
                    return r.kind == Raw::Kind::And ? conj(std::move(kids)) : disj(std::move(kids));
                }
                case Raw::Kind::Not: return neg(build(*r.kids[0], scope));
                case Raw::Kind::Exists:
                case Raw::Kind::Forall: {
                    auto slot = std::make_shared<Slot>(Slot{r.name, -1});
                    if (! r.sort_name.empty())
                        slot->sort = sig.sort_index(r.sort_name);
                    if (slot->sort < 0 && sig.sorts.size() == 1)
                        slot->sort = 0;
                    if (slot->sort < 0)
                        throw SortError("cannot determine the sort of bound variable '" + r.name + "'");
                    scope.push_back(slot);
                    auto body = build(*r.kids[0], scope);
                    scope.pop_back();
                    if (! r.loc_name.empty()) {
                        auto elem = sig.locality_index(slot->sort, r.loc_name);
                        Term anchor = build_term(r.anchor, scope);
                        return local_exists(r.name, slot->sort, *elem, std::move(anchor), body);
                    }
                    return r.kind == Raw::Kind::Exists ? exists(r.name, slot->sort, body)
                                                       : forall(r.name, slot->sort, body);
                }
                }
                throw SyntaxError("unreachable");
            }
        };
    }

    auto parse(const SignatureSpec & sig, const string & text, const std::map<string, int> & free_sorts)
        -> FormulaPtr
    {
        Parser p{tokenize(text)};
        auto raw = p.parse_formula();
        if (p.peek().kind != Token::Kind::End)
            throw SyntaxError("trailing input at position " + std::to_string(p.peek().pos));

        Elaborator e{sig};
        for (const auto & [name, sort] : free_sorts)
            e.free_slots[name] = std::make_shared<Slot>(Slot{name, sort});

        // constraint propagation to a fixpoint, then a default for one-sorted
        // languages
        for (int round = 0; round < 64; ++round) {
            e.changed = false;
            Elaborator::Scope scope;
            e.pass(*raw, scope);
            if (! e.changed)
                break;
        }
        if (sig.sorts.size() == 1)
            for (auto & [name, slot] : e.free_slots)
                if (slot->sort < 0)
                    slot->sort = 0;

        Elaborator::Scope scope;
        return e.build(*raw, scope);
    }
}
