#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "moretro/cost_vector.hpp"
#include "moretro/reaction.hpp"

namespace moretro {

enum class MoleculeId : std::uint32_t {};
enum class ReactionId : std::uint32_t {};

constexpr std::size_t index(MoleculeId id) { return static_cast<std::size_t>(id); }
constexpr std::size_t index(ReactionId id) { return static_cast<std::size_t>(id); }

/// OR node. `expanded == false` means frontier (or stock).
struct MoleculeNode {
    MoleculeKey key;
    bool is_stock = false;
    bool expanded = false;
    bool pruned = false;
    CostVector heuristic;
    std::vector<ReactionId> parents;
    std::vector<ReactionId> children;
};

/// AND node; `record` holds the reaction tuple, `cost` its normalized cost vector.
struct ReactionNode {
    MoleculeId product;
    std::vector<MoleculeId> reactants;
    ReactionRecord record;
    CostVector cost;
};

/// Per-weight scalar state, dense over node handles.
struct WeightState {
    std::vector<double> mol_rn;
    std::vector<double> mol_vt;
    std::vector<double> rxn_rn;
    std::vector<double> rxn_vt;
    /// Value of the best fully solved subtree under this weight (+inf when unsolved).
    std::vector<double> mol_sv;
    std::vector<double> rxn_sv;
};

struct CostedReaction {
    ReactionRecord record;
    CostVector cost;
};

/// Stock flag and heuristic for a freshly inserted molecule.
struct NewMolecule {
    bool is_stock = false;
    CostVector heuristic;
};
using MoleculeFactory = std::function<NewMolecule(const MoleculeKey&)>;

struct ExpansionResult {
    std::vector<ReactionId> reactions;
    std::vector<MoleculeId> new_molecules;
    std::size_t discarded_cycles = 0;
};

/// Set of reactions from the target down to stock, self-contained (no graph handles).
struct Route {
    MoleculeKey target;
    std::vector<CostedReaction> reactions;
    CostVector cost;
    std::vector<MoleculeKey> frontier_leaves;
    std::optional<std::vector<double>> generating_weight;

    /// Sorted reaction signatures; two routes are the same route iff these match.
    std::vector<std::string> identity() const;
    /// Target plus every reactant used by the route.
    std::vector<MoleculeKey> molecules() const;
};

/// Checks the Route invariants; returns human-readable violations (empty when valid).
std::vector<std::string> validate_route(const Route& route,
                                        const std::function<bool(const MoleculeKey&)>& in_stock);

/// Directed acyclic AND-OR graph with arena storage and integer handles.
class SearchGraph {
public:
    SearchGraph(MoleculeKey target, NewMolecule target_info);

    MoleculeId target() const { return MoleculeId{0}; }
    std::optional<MoleculeId> find(const MoleculeKey& key) const;

    const MoleculeNode& molecule(MoleculeId id) const { return molecules_[index(id)]; }
    const ReactionNode& reaction(ReactionId id) const { return reactions_[index(id)]; }
    std::size_t molecule_count() const { return molecules_.size(); }
    std::size_t reaction_count() const { return reactions_.size(); }

    /// Adds one reaction node per candidate under `parent`, merging reactants by key.
    /// Candidates whose reactants include the parent or one of its ancestors are
    /// discarded and counted. Marks `parent` expanded.
    ExpansionResult add_expansion(MoleculeId parent, std::span<const CostedReaction> candidates,
                                  const MoleculeFactory& make_molecule);

    /// Non-pruned, non-stock, unexpanded molecules in insertion order.
    std::vector<MoleculeId> frontier() const;

    void set_pruned(MoleculeId id, bool pruned = true);

    /// Molecules ordered so that every product precedes its reactants.
    const std::vector<MoleculeId>& topological_order() const;
    bool is_acyclic() const;

    /// Solved flags: stock, or some child reaction with every reactant solved.
    void refresh_solved();
    bool solved(MoleculeId id) const { return mol_solved_[index(id)]; }
    bool solved(ReactionId id) const { return rxn_solved_[index(id)]; }

    std::vector<WeightState>& weight_states() { return weight_states_; }
    const std::vector<WeightState>& weight_states() const { return weight_states_; }
    /// Reallocates per-weight arrays for `n` weights, sized to the current graph.
    void reset_weight_states(std::size_t n);

    std::size_t cycle_discards() const { return cycle_discards_; }
    const Mask& mask() const { return mask_; }

    /// Debug dump: {"molecules": [...], "reactions": [...]}.
    nlohmann::json dump() const;

private:
    MoleculeId insert_molecule(const MoleculeKey& key, NewMolecule info);
    std::vector<bool> ancestors_of(MoleculeId id) const;

    std::vector<MoleculeNode> molecules_;
    std::vector<ReactionNode> reactions_;
    std::unordered_map<MoleculeKey, MoleculeId> by_key_;
    std::vector<bool> mol_solved_;
    std::vector<bool> rxn_solved_;
    std::vector<WeightState> weight_states_;
    mutable std::vector<MoleculeId> topo_cache_;
    mutable bool topo_dirty_ = true;
    std::size_t cycle_discards_ = 0;
    Mask mask_;
};

/// Descends from the target choosing, at each molecule, the solved child reaction with the
/// smallest solved value under weight j (ties: lowest insertion index). Empty when unsolved.
std::optional<Route> extract_best_route(const SearchGraph& graph, std::size_t weight_index);

/// Route assembled from a chosen reaction per molecule, starting at the target.
Route assemble_route(const SearchGraph& graph, const std::function<ReactionId(MoleculeId)>& choose);

} // namespace moretro
