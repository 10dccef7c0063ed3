#include <locus/errors.hpp>
#include <locus/json_io.hpp>

#include <fstream>
#include <sstream>

namespace locus
{
    using nlohmann::json;
    using nlohmann::ordered_json;

    namespace
    {
        auto need(const json & j, const char * key) -> const json &
        {
            if (! j.is_object() || ! j.contains(key))
                throw BadInput(std::string{"missing key '"} + key + "'");
            return j.at(key);
        }

        auto name_list(const json & j) -> std::vector<std::string>
        {
            if (! j.is_array())
                throw BadInput("expected an array of names");
            std::vector<std::string> out;
            for (const auto & item : j)
                out.push_back(item.get<std::string>());
            return out;
        }
    }

    auto signature_to_json(const SignatureSpec & sig) -> ordered_json
    {
        ordered_json j;
        j["sorts"] = sig.sorts;

        j["locality"] = ordered_json::array();
        for (std::size_t s = 0; s < sig.sorts.size(); ++s) {
            const auto & monoid = sig.locality[s];
            ordered_json entry;
            entry["sort"] = sig.sorts[s];
            entry["elements"] = monoid.elements;
            entry["identity"] = monoid.elements[std::size_t(monoid.identity)];
            ordered_json op = ordered_json::array();
            for (const auto & row : monoid.op) {
                ordered_json names = ordered_json::array();
                for (int e : row)
                    names.push_back(monoid.elements[std::size_t(e)]);
                op.push_back(names);
            }
            entry["op"] = op;
            ordered_json leq = ordered_json::array();
            for (const auto & row : monoid.leq) {
                ordered_json bits = ordered_json::array();
                for (char b : row)
                    bits.push_back(int(b));
                leq.push_back(bits);
            }
            entry["leq"] = leq;
            j["locality"].push_back(entry);
        }

        j["relations"] = ordered_json::array();
        for (const auto & rel : sig.relations) {
            ordered_json entry;
            entry["name"] = rel.name;
            ordered_json profile = ordered_json::array();
            for (int s : rel.profile)
                profile.push_back(sig.sorts[std::size_t(s)]);
            entry["profile"] = profile;
            j["relations"].push_back(entry);
        }

        j["constants"] = ordered_json::array();
        for (const auto & c : sig.constants) {
            ordered_json entry;
            entry["name"] = c.name;
            entry["sort"] = sig.sorts[std::size_t(c.sort)];
            j["constants"].push_back(entry);
        }

        j["bounds"] = ordered_json::array();
        for (int i = 0; i < int(sig.constants.size()); ++i)
            for (int j2 = i; j2 < int(sig.constants.size()); ++j2) {
                if (sig.constants[std::size_t(i)].sort != sig.constants[std::size_t(j2)].sort)
                    continue;
                auto declared = sig.bound_for(i, j2);
                if (! declared)
                    continue;
                int s = sig.constants[std::size_t(i)].sort;
                ordered_json entry;
                entry["left"] = sig.constants[std::size_t(i)].name;
                entry["right"] = sig.constants[std::size_t(j2)].name;
                entry["elem"] = sig.locality[std::size_t(s)].elements[std::size_t(*declared)];
                j["bounds"].push_back(entry);
            }

        return j;
    }

    auto signature_from_json(const json & j) -> SignatureSpec
    {
        SignatureSpec sig;
        sig.sorts = name_list(need(j, "sorts"));
        sig.locality.resize(sig.sorts.size());

        std::vector<char> seen(sig.sorts.size(), 0);
        for (const auto & entry : need(j, "locality")) {
            int s = sig.sort_index(need(entry, "sort").get<std::string>());
            if (seen[std::size_t(s)])
                throw BadInput("duplicate locality block for sort '" + sig.sorts[std::size_t(s)] + "'");
            seen[std::size_t(s)] = 1;
            LocalityMonoid monoid;
            monoid.elements = name_list(need(entry, "elements"));
            auto identity_name = need(entry, "identity").get<std::string>();
            monoid.identity = monoid.element_index(identity_name);
            if (monoid.identity < 0)
                throw BadInput("identity '" + identity_name + "' not among the monoid elements");
            for (const auto & row : need(entry, "op")) {
                std::vector<int> indices;
                for (const auto & cell : row) {
                    int e = monoid.element_index(cell.get<std::string>());
                    if (e < 0)
                        throw BadInput("unknown monoid element '" + cell.get<std::string>() + "' in op table");
                    indices.push_back(e);
                }
                monoid.op.push_back(indices);
            }
            for (const auto & row : need(entry, "leq")) {
                std::vector<char> bits;
                for (const auto & cell : row)
                    bits.push_back(char(cell.get<int>() != 0));
                monoid.leq.push_back(bits);
            }
            sig.locality[std::size_t(s)] = std::move(monoid);
        }
        for (std::size_t s = 0; s < sig.sorts.size(); ++s)
            if (! seen[s])
                throw BadInput("no locality block for sort '" + sig.sorts[s] + "'");

        for (const auto & entry : need(j, "relations")) {
            RelationDecl rel;
            rel.name = need(entry, "name").get<std::string>();
            for (const auto & sort_name : need(entry, "profile"))
                rel.profile.push_back(sig.sort_index(sort_name.get<std::string>()));
            sig.relations.push_back(rel);
        }

        for (const auto & entry : need(j, "constants"))
            sig.constants.push_back({need(entry, "name").get<std::string>(),
                sig.sort_index(need(entry, "sort").get<std::string>())});

        if (j.contains("bounds"))
            for (const auto & entry : j.at("bounds")) {
                auto left = need(entry, "left").get<std::string>();
                auto right = need(entry, "right").get<std::string>();
                auto ci = sig.constant_index(left), cj = sig.constant_index(right);
                if (! ci || ! cj)
                    throw BadInput("bound names unknown constant '" + (ci ? right : left) + "'");
                int s = sig.constants[std::size_t(*ci)].sort;
                int e = sig.locality[std::size_t(s)].element_index(need(entry, "elem").get<std::string>());
                if (e < 0)
                    throw BadInput("bound uses unknown locality element");
                sig.set_bound(*ci, *cj, e);
            }

        require_valid(sig);
        return sig;
    }

    auto structure_to_json(const FiniteStructure & m, bool include_signature) -> ordered_json
    {
        const auto & sig = *m.sig;
        ordered_json j;
        j["name"] = m.name;
        if (include_signature)
            j["signature"] = signature_to_json(sig);
        j["universe"] = m.universe;

        j["relations"] = ordered_json::array();
        for (std::size_t r = 0; r < sig.relations.size(); ++r) {
            ordered_json entry;
            entry["name"] = sig.relations[r].name;
            ordered_json tuples = ordered_json::array();
            for (const auto & tuple : m.relations[r]) {
                ordered_json names = ordered_json::array();
                for (std::size_t k = 0; k < tuple.size(); ++k)
                    names.push_back(m.universe[std::size_t(sig.relations[r].profile[k])][std::size_t(tuple[k])]);
                tuples.push_back(names);
            }
            entry["tuples"] = tuples;
            j["relations"].push_back(entry);
        }

        j["constants"] = ordered_json::array();
        for (std::size_t c = 0; c < sig.constants.size(); ++c) {
            ordered_json entry;
            entry["name"] = sig.constants[c].name;
            entry["value"] = m.universe[std::size_t(sig.constants[c].sort)][std::size_t(m.constants[c])];
            j["constants"].push_back(entry);
        }

        j["locality"] = ordered_json::array();
        for (std::size_t s = 0; s < sig.sorts.size(); ++s) {
            const auto & monoid = sig.locality[s];
            ordered_json entry;
            entry["sort"] = sig.sorts[s];
            ordered_json elems = ordered_json::array();
            for (int d = 0; d < int(monoid.elements.size()); ++d) {
                if (d == monoid.identity)
                    continue; // always the diagonal
                ordered_json block;
                block["elem"] = monoid.elements[std::size_t(d)];
                ordered_json pairs = ordered_json::array();
                for (int a = 0; a < m.size(int(s)); ++a)
                    for (int b = 0; b < m.size(int(s)); ++b)
                        if (m.loc_has(int(s), d, a, b))
                            pairs.push_back(ordered_json::array({m.universe[s][std::size_t(a)],
                                m.universe[s][std::size_t(b)]}));
                block["pairs"] = pairs;
                elems.push_back(block);
            }
            entry["elements"] = elems;
            j["locality"].push_back(entry);
        }

        return j;
    }

    auto structure_from_json(const json & j, std::shared_ptr<const SignatureSpec> sig) -> FiniteStructure
    {
        if (j.contains("signature"))
            sig = std::make_shared<const SignatureSpec>(signature_from_json(j.at("signature")));
        if (! sig)
            throw BadInput("structure has no embedded signature and none was supplied");

        std::vector<std::vector<std::string>> universe;
        for (const auto & names : need(j, "universe"))
            universe.push_back(name_list(names));
        auto m = make_structure(sig, universe);
        if (j.contains("name"))
            m.name = j.at("name").get<std::string>();

        for (std::size_t s = 0; s < universe.size(); ++s) {
            std::set<std::string> distinct(universe[s].begin(), universe[s].end());
            if (distinct.size() != universe[s].size())
                throw BadInput("duplicate element name in sort '" + sig->sorts[s] + "'");
        }

        for (const auto & entry : need(j, "relations")) {
            auto rel_name = need(entry, "name").get<std::string>();
            auto r = sig->relation_index(rel_name);
            if (! r)
                throw BadInput("unknown relation '" + rel_name + "'");
            const auto & profile = sig->relations[std::size_t(*r)].profile;
            for (const auto & tuple : need(entry, "tuples")) {
                if (tuple.size() != profile.size())
                    throw BadInput("tuple arity mismatch for relation '" + rel_name + "'");
                std::vector<int> indices;
                for (std::size_t k = 0; k < profile.size(); ++k)
                    indices.push_back(m.element_index(profile[k], tuple.at(k).get<std::string>()));
                m.relations[std::size_t(*r)].insert(indices);
            }
        }

        std::vector<char> constant_seen(sig->constants.size(), 0);
        for (const auto & entry : need(j, "constants")) {
            auto c_name = need(entry, "name").get<std::string>();
            auto c = sig->constant_index(c_name);
            if (! c)
                throw BadInput("unknown constant '" + c_name + "'");
            int s = sig->constants[std::size_t(*c)].sort;
            m.constants[std::size_t(*c)] = m.element_index(s, need(entry, "value").get<std::string>());
            constant_seen[std::size_t(*c)] = 1;
        }
        for (std::size_t c = 0; c < sig->constants.size(); ++c)
            if (! constant_seen[c])
                throw BadInput("no interpretation for constant '" + sig->constants[c].name + "'");

        for (const auto & entry : need(j, "locality")) {
            int s = sig->sort_index(need(entry, "sort").get<std::string>());
            const auto & monoid = sig->locality[std::size_t(s)];
            for (const auto & block : need(entry, "elements")) {
                auto elem_name = need(block, "elem").get<std::string>();
                int d = monoid.element_index(elem_name);
                if (d < 0)
                    throw BadInput("unknown locality element '" + elem_name + "'");
                for (const auto & pair : need(block, "pairs")) {
                    if (pair.size() != 2)
                        throw BadInput("locality pairs must have two entries");
                    int a = m.element_index(s, pair.at(0).get<std::string>());
                    int b = m.element_index(s, pair.at(1).get<std::string>());
                    if (d == monoid.identity && a != b)
                        throw BadInput("identity locality element must stay on the diagonal");
                    m.set_loc(s, d, a, b);
                }
            }
        }

        return m;
    }

    auto canonical_dump(const ordered_json & j) -> std::string
    {
        return j.dump(2) + "\n";
    }

    auto load_json_file(const std::string & path) -> json
    {
        std::ifstream in{path};
        if (! in)
            throw BadInput("cannot open '" + path + "' for reading");
        json j;
        try {
            in >> j;
        }
        catch (const json::parse_error & e) {
            throw BadInput("malformed JSON in '" + path + "': " + e.what());
        }
        return j;
    }

    auto save_json_file(const std::string & path, const ordered_json & j) -> void
    {
        std::ofstream out{path};
        if (! out)
            throw BadInput("cannot open '" + path + "' for writing");
        out << canonical_dump(j);
    }
}
