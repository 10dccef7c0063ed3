#ifndef LOCUS_STRUCTURE_HPP
#define LOCUS_STRUCTURE_HPP

#include <locus/signature.hpp>

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace locus
{
    // A finite structure for a local language. Elements are dense indices per
    // sort; `universe` keeps their display names. The identity locality
    // element is always interpreted as the diagonal. Degenerate structures
    // (failing the locality axioms) are representable; theory-level
    // operations check the axioms first.
    struct FiniteStructure
    {
        std::shared_ptr<const SignatureSpec> sig;
        std::string name; // optional label used in reports
        std::vector<std::vector<std::string>> universe;
        std::vector<std::set<std::vector<int>>> relations;
        std::vector<int> constants;
        // locality[sort][elem] is an n*n row-major incidence matrix
        std::vector<std::vector<std::vector<char>>> locality;

        auto size(int sort) const -> int { return int(universe.at(sort).size()); }
        auto total_size() const -> int;

        auto loc_has(int sort, int elem, int a, int b) const -> bool
        {
            return locality[sort][elem][std::size_t(a) * universe[sort].size() + std::size_t(b)] != 0;
        }
        auto set_loc(int sort, int elem, int a, int b, bool value = true) -> void
        {
            locality[sort][elem][std::size_t(a) * universe[sort].size() + std::size_t(b)] = value ? 1 : 0;
        }

        auto rel_has(int rel, const std::vector<int> & tuple) const -> bool
        {
            return relations[rel].count(tuple) != 0;
        }

        auto element_index(int sort, const std::string & elem_name) const -> int;

        // Least locality element (in the monoid order) relating a and b, or
        // nothing when no element does. Ties broken by element index.
        auto min_locality(int sort, int a, int b) const -> std::optional<int>;
    };

    // Fresh structure with given universe sizes, empty relations, all
    // locality empty except the forced diagonal identity.
    auto make_structure(std::shared_ptr<const SignatureSpec> sig, const std::vector<std::vector<std::string>> & universe)
        -> FiniteStructure;

    struct AxiomWitness
    {
        std::string axiom; // A1..A5
        int sort = -1;
        std::vector<int> elems;          // involved elements of the sort
        std::vector<int> locality_elems; // involved monoid elements
        std::vector<int> constants;      // involved constant indices (A4)
        std::string detail;
    };

    struct AxiomReport
    {
        // pass flag and first witness per axiom, in order A1..A5
        std::vector<std::pair<bool, std::optional<AxiomWitness>>> axioms =
            std::vector<std::pair<bool, std::optional<AxiomWitness>>>(5, {true, std::nullopt});

        auto pass(int i) const -> bool { return axioms.at(i).first; }
        auto all() const -> bool;
        auto first_failure() const -> std::optional<AxiomWitness>;
    };

    // A1 symmetry, A2 order monotonicity, A3 composition, A4 constant bounds,
    // A5 totality of the locality relations. Witnesses are re-checkable
    // against the structure.
    auto check_locality_axioms(const FiniteStructure & m) -> AxiomReport;

    auto is_local(const FiniteStructure & m) -> bool;

    // Elements within the d-ball centred at o, in universe order (includes o
    // whenever the axioms hold, since the identity is below every element).
    auto ball(const FiniteStructure & m, int sort, int elem, int o) -> std::vector<int>;

    // Union of all balls at the base point, per sort.
    auto component_universe(const FiniteStructure & m, const std::vector<int> & base)
        -> std::vector<std::vector<int>>;

    struct Substructure
    {
        FiniteStructure structure;
        // original element index per (sort, new index)
        std::vector<std::vector<int>> embedding;
    };

    // Induced substructure on the given subsets. Throws ConstantsNotContained
    // or EmptySort.
    auto induced_substructure(const FiniteStructure & m, const std::vector<std::vector<int>> & subsets)
        -> Substructure;

    // The local component at a base point (one element per sort): the induced
    // substructure on the union of balls. Requires A1..A4 and, for each sort
    // with constants, some constant inside some ball at the base; throws
    // NotLocal or ConstantOutsideComponent.
    auto local_component(const FiniteStructure & m, const std::vector<int> & base) -> Substructure;

    // A centre and locality element whose ball covers the whole sort, if any.
    // The centre is minimal, then the locality element least in the monoid
    // order among covering ones.
    auto covering_ball(const FiniteStructure & m, int sort) -> std::optional<std::pair<int, int>>;
}

#endif
