#ifndef LOCUS_JSON_IO_HPP
#define LOCUS_JSON_IO_HPP

#include <locus/structure.hpp>

#include <nlohmann/json.hpp>

#include <memory>
#include <string>

namespace locus
{
    // Serialized forms are canonical: fixed key order, declaration-order
    // arrays, tuples sorted by element index, the identity locality element
    // omitted (its interpretation is always the diagonal). Serialize, parse,
    // serialize again is byte-identical.

    auto signature_to_json(const SignatureSpec & sig) -> nlohmann::ordered_json;
    auto signature_from_json(const nlohmann::json & j) -> SignatureSpec;

    // include_signature embeds the signature so the file stands alone.
    auto structure_to_json(const FiniteStructure & m, bool include_signature = true) -> nlohmann::ordered_json;

    // Reads a structure; uses the embedded signature when present, otherwise
    // the supplied one. Throws BadInput on malformed or inconsistent input.
    auto structure_from_json(const nlohmann::json & j, std::shared_ptr<const SignatureSpec> sig = nullptr)
        -> FiniteStructure;

    auto canonical_dump(const nlohmann::ordered_json & j) -> std::string;

    auto load_json_file(const std::string & path) -> nlohmann::json;
    auto save_json_file(const std::string & path, const nlohmann::ordered_json & j) -> void;
}

#endif
