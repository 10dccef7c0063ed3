#ifndef LOCUS_SIGNATURE_HPP
#define LOCUS_SIGNATURE_HPP

#include <locus/errors.hpp>

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace locus
{
    // One partially ordered commutative monoid of locality relation symbols.
    // Element 0 of `elements` need not be the identity; `identity` names it.
    // The identity element is interpreted as equality in every structure and
    // must be the least element of the order.
    struct LocalityMonoid
    {
        std::vector<std::string> elements;
        int identity = 0;
        std::vector<std::vector<int>> op;   // op[i][j] = index of elements[i] * elements[j]
        std::vector<std::vector<char>> leq; // leq[i][j] = 1 iff elements[i] is below-or-equal elements[j]

        auto size() const -> int { return int(elements.size()); }
        auto below(int i, int j) const -> bool { return leq[i][j] != 0; }
        auto compose(int i, int j) const -> int { return op[i][j]; }
        auto element_index(const std::string & name) const -> int;

        // True when the order is total; every corpus monoid is a chain.
        auto is_chain() const -> bool;
        auto maximal_elements() const -> std::vector<int>;

        // Chain of n+1 elements d0..dn with d_i * d_j = d_min(i+j, n).
        static auto saturating_chain(int n, const std::string & prefix = "d") -> LocalityMonoid;

        auto operator==(const LocalityMonoid &) const -> bool = default;
    };

    struct RelationDecl
    {
        std::string name;
        std::vector<int> profile; // sort indices, one per argument

        auto operator==(const RelationDecl &) const -> bool = default;
    };

    struct ConstantDecl
    {
        std::string name;
        int sort = 0;

        auto operator==(const ConstantDecl &) const -> bool = default;
    };

    // A local language: sorts, ordinary relations, constants, one locality
    // monoid per sort, and a total symmetric bound map on same-sort constant
    // pairs. Equality, top and bottom are built into the formula syntax and
    // never appear here.
    struct SignatureSpec
    {
        std::vector<std::string> sorts;
        std::vector<RelationDecl> relations;
        std::vector<ConstantDecl> constants;
        std::vector<LocalityMonoid> locality; // indexed by sort
        std::map<std::pair<int, int>, int> bounds; // key (i,j) with i <= j over constant indices

        auto sort_index(const std::string & name) const -> int;
        auto relation_index(const std::string & name) const -> std::optional<int>;
        auto constant_index(const std::string & name) const -> std::optional<int>;

        // Locality element lookup by name within one sort's monoid.
        auto locality_index(int sort, const std::string & name) const -> std::optional<int>;

        auto bound_for(int c1, int c2) const -> std::optional<int>;
        auto set_bound(int c1, int c2, int elem) -> void;

        auto constants_of_sort(int sort) const -> std::vector<int>;

        auto operator==(const SignatureSpec &) const -> bool = default;
    };

    struct ValidationIssue
    {
        std::string kind;   // MonoidLawViolation, BoundIncomplete, SortMismatch, NameCollision
        std::string sort;   // affected sort name, empty when not sort-specific
        std::string law;    // violated law for monoid issues
        std::string detail; // human-readable description with witnessing elements
    };

    // Empty result means the signature is well-formed. Monoid laws (identity,
    // commutativity, associativity), partial-order laws (reflexive,
    // antisymmetric, transitive), identity-least, bound totality/symmetry and
    // sort consistency are all checked exhaustively over the finite tables.
    auto validate_signature(const SignatureSpec & spec) -> std::vector<ValidationIssue>;

    // Throwing wrapper around validate_signature for call sites that cannot
    // proceed with a broken signature.
    auto require_valid(const SignatureSpec & spec) -> void;

    // A variable context is pointed when every sort NOT occurring in it has a
    // constant symbol. The empty context is pointed iff the language is.
    auto is_pointed(const SignatureSpec & spec, const std::set<int> & context_sorts) -> bool;
    auto is_pointed(const SignatureSpec & spec) -> bool;

    // Locality element tuples over tuple sorts, composed componentwise.
    struct ProductLocality
    {
        std::vector<int> sorts;
        std::vector<int> elems;
    };

    auto compose_locality(const SignatureSpec & spec, const ProductLocality & a, const ProductLocality & b)
        -> ProductLocality;

    struct ConstantAddition
    {
        std::string name;
        int sort = 0;
        // Bound rows to existing constants (or to other added ones); the first
        // row of each addition is its anchor. May be empty when the sort has
        // no constants yet.
        std::vector<std::pair<std::string, int>> rows;
    };

    struct ExpansionResult
    {
        SignatureSpec spec;
        std::string policy; // records how missing bound entries were completed
    };

    // Expands the language with constants, completing missing bound entries by
    // *-composition through each constant's declared anchor. Throws
    // MissingAnchor when a sort already has constants but an addition names
    // none of them, and revalidates the result.
    auto expand_with_constants(const SignatureSpec & spec, const std::vector<ConstantAddition> & additions)
        -> ExpansionResult;
}

#endif
