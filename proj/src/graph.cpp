#include "moretro/graph.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <set>

namespace moretro {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void grow(WeightState& s, std::size_t molecules, std::size_t reactions)
{
    s.mol_rn.resize(molecules, kInf);
    s.mol_vt.resize(molecules, kInf);
    s.mol_sv.resize(molecules, kInf);
    s.rxn_rn.resize(reactions, kInf);
    s.rxn_vt.resize(reactions, kInf);
    s.rxn_sv.resize(reactions, kInf);
}

} // namespace

std::vector<std::string> Route::identity() const
{
    std::vector<std::string> ids;
    ids.reserve(reactions.size());
    for (const auto& r : reactions) {
        ids.push_back(r.record.signature());
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<MoleculeKey> Route::molecules() const
{
    std::set<MoleculeKey> keys{target};
    for (const auto& r : reactions) {
        keys.insert(r.record.reactants.begin(), r.record.reactants.end());
    }
    return {keys.begin(), keys.end()};
}

std::vector<std::string> validate_route(const Route& route,
                                        const std::function<bool(const MoleculeKey&)>& in_stock)
{
    std::vector<std::string> problems;
    std::map<MoleculeKey, int> producers;
    std::set<MoleculeKey> consumed;
    for (const auto& r : route.reactions) {
        const auto& rec = r.record;
        ++producers[rec.product];
        if (rec.reactants.empty()) {
            problems.push_back("reaction " + rec.signature() + " has no reactants");
        }
        for (const auto& m : rec.reactants) {
            if (m == rec.product) {
                problems.push_back("reaction " + rec.signature() + " consumes its own product");
            }
            consumed.insert(m);
        }
        for (double c : r.cost.values()) {
            if (!(c >= 0.0 && c <= 1.0)) {
                problems.push_back("reaction " + rec.signature() + " has a cost outside [0,1]");
            }
        }
    }

    std::set<MoleculeKey> needed = consumed;
    needed.insert(route.target);
    for (const auto& m : needed) {
        const int n = producers.count(m) ? producers[m] : 0;
        if (in_stock(m)) {
            if (n != 0) {
                problems.push_back("stock molecule '" + m + "' is produced by the route");
            }
        } else if (n != 1) {
            problems.push_back("molecule '" + m + "' has " + std::to_string(n) + " producing reactions");
        }
    }
    for (const auto& [m, n] : producers) {
        if (!needed.count(m)) {
            problems.push_back("reaction product '" + m + "' is never used");
        }
    }

    std::set<MoleculeKey> leaves;
    for (const auto& m : needed) {
        if (!producers.count(m)) {
            leaves.insert(m);
        }
    }
    const std::set<MoleculeKey> declared(route.frontier_leaves.begin(), route.frontier_leaves.end());
    if (declared != leaves) {
        problems.push_back("frontier_leaves does not match the unproduced molecules");
    }
    for (const auto& m : declared) {
        if (!in_stock(m)) {
            problems.push_back("leaf '" + m + "' is not in stock");
        }
    }

    if (!route.reactions.empty() || route.cost.size() != 0) {
        std::vector<double> sum(route.cost.size(), 0.0);
        for (const auto& r : route.reactions) {
            if (r.cost.size() != sum.size()) {
                problems.push_back("reaction cost dimension mismatch");
                return problems;
            }
            for (std::size_t i = 0; i < sum.size(); ++i) {
                sum[i] += r.cost[i];
            }
        }
        if (!approx_equal(sum, route.cost.values())) {
            problems.push_back("route cost " + to_string(route.cost.values()) +
                               " differs from the reaction sum " + to_string(sum));
        }
    }
    return problems;
}

SearchGraph::SearchGraph(MoleculeKey target, NewMolecule target_info) : mask_(target_info.heuristic.mask())
{
    insert_molecule(target, std::move(target_info));
}

std::optional<MoleculeId> SearchGraph::find(const MoleculeKey& key) const
{
    auto it = by_key_.find(key);
    if (it == by_key_.end()) {
        return std::nullopt;
    }
    return it->second;
}

MoleculeId SearchGraph::insert_molecule(const MoleculeKey& key, NewMolecule info)
{
    const auto id = MoleculeId{static_cast<std::uint32_t>(molecules_.size())};
    MoleculeNode node;
    node.key = key;
    node.is_stock = info.is_stock;
    node.heuristic = info.is_stock ? CostVector::zero(info.heuristic.mask()) : std::move(info.heuristic);
    molecules_.push_back(std::move(node));
    by_key_.emplace(key, id);
    mol_solved_.push_back(molecules_.back().is_stock);
    for (auto& s : weight_states_) {
        grow(s, molecules_.size(), reactions_.size());
    }
    topo_dirty_ = true;
    return id;
}

std::vector<bool> SearchGraph::ancestors_of(MoleculeId id) const
{
    std::vector<bool> seen(molecules_.size(), false);
    std::deque<MoleculeId> queue{id};
    seen[index(id)] = true;
    while (!queue.empty()) {
        const MoleculeId m = queue.front();
        queue.pop_front();
        for (ReactionId r : molecules_[index(m)].parents) {
            const MoleculeId p = reactions_[index(r)].product;
            if (!seen[index(p)]) {
                seen[index(p)] = true;
                queue.push_back(p);
            }
        }
    }
    return seen;
}

ExpansionResult SearchGraph::add_expansion(MoleculeId parent, std::span<const CostedReaction> candidates,
                                           const MoleculeFactory& make_molecule)
{
    if (index(parent) >= molecules_.size()) {
        throw ContractViolation("add_expansion: unknown parent molecule");
    }
    const MoleculeNode& p = molecules_[index(parent)];
    if (p.expanded) {
        throw ContractViolation("add_expansion: molecule '" + p.key + "' is already expanded");
    }
    if (p.is_stock || p.pruned) {
        throw ContractViolation("add_expansion: molecule '" + p.key + "' is not in the frontier");
    }

    ExpansionResult result;
    const std::vector<bool> ancestors = ancestors_of(parent);
    for (const auto& cand : candidates) {
        if (cand.record.product != molecules_[index(parent)].key) {
            throw ContractViolation("add_expansion: candidate product '" + cand.record.product +
                                    "' differs from the expanded molecule");
        }
        if (cand.record.reactants.empty()) {
            throw ContractViolation("add_expansion: candidate without reactants");
        }
        bool cyclic = false;
        for (const auto& key : cand.record.reactants) {
            auto existing = find(key);
            if (existing && index(*existing) < ancestors.size() && ancestors[index(*existing)]) {
                cyclic = true;
                break;
            }
        }
        if (cyclic) {
            ++result.discarded_cycles;
            continue;
        }

        const auto rid = ReactionId{static_cast<std::uint32_t>(reactions_.size())};
        ReactionNode rn;
        rn.product = parent;
        rn.record = cand.record;
        rn.cost = cand.cost;
        std::set<MoleculeKey> unique(cand.record.reactants.begin(), cand.record.reactants.end());
        for (const auto& key : cand.record.reactants) {
            if (!unique.erase(key)) {
                continue;
            }
            MoleculeId mid;
            if (auto existing = find(key)) {
                mid = *existing;
            } else {
                mid = insert_molecule(key, make_molecule(key));
                result.new_molecules.push_back(mid);
            }
            rn.reactants.push_back(mid);
        }
        reactions_.push_back(std::move(rn));
        rxn_solved_.push_back(false);
        for (MoleculeId m : reactions_.back().reactants) {
            molecules_[index(m)].parents.push_back(rid);
        }
        molecules_[index(parent)].children.push_back(rid);
        result.reactions.push_back(rid);
    }
    for (auto& s : weight_states_) {
        grow(s, molecules_.size(), reactions_.size());
    }
    molecules_[index(parent)].expanded = true;
    cycle_discards_ += result.discarded_cycles;
    topo_dirty_ = true;
    return result;
}

std::vector<MoleculeId> SearchGraph::frontier() const
{
    std::vector<MoleculeId> out;
    for (std::size_t i = 0; i < molecules_.size(); ++i) {
        const auto& m = molecules_[i];
        if (!m.expanded && !m.is_stock && !m.pruned) {
            out.push_back(MoleculeId{static_cast<std::uint32_t>(i)});
        }
    }
    return out;
}

void SearchGraph::set_pruned(MoleculeId id, bool pruned)
{
    molecules_.at(index(id)).pruned = pruned;
}

const std::vector<MoleculeId>& SearchGraph::topological_order() const
{
    if (!topo_dirty_) {
        return topo_cache_;
    }
    std::vector<std::size_t> indegree(molecules_.size(), 0);
    for (std::size_t i = 0; i < molecules_.size(); ++i) {
        indegree[i] = molecules_[i].parents.size();
    }
    topo_cache_.clear();
    std::deque<MoleculeId> ready;
    for (std::size_t i = 0; i < molecules_.size(); ++i) {
        if (indegree[i] == 0) {
            ready.push_back(MoleculeId{static_cast<std::uint32_t>(i)});
        }
    }
    while (!ready.empty()) {
        const MoleculeId m = ready.front();
        ready.pop_front();
        topo_cache_.push_back(m);
        for (ReactionId r : molecules_[index(m)].children) {
            for (MoleculeId c : reactions_[index(r)].reactants) {
                if (--indegree[index(c)] == 0) {
                    ready.push_back(c);
                }
            }
        }
    }
    if (topo_cache_.size() != molecules_.size()) {
        throw ContractViolation("search graph contains a directed cycle");
    }
    topo_dirty_ = false;
    return topo_cache_;
}

bool SearchGraph::is_acyclic() const
{
    try {
        topological_order();
        return true;
    } catch (const ContractViolation&) {
        return false;
    }
}

void SearchGraph::refresh_solved()
{
    const auto& order = topological_order();
    rxn_solved_.assign(reactions_.size(), false);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const auto& node = molecules_[index(*it)];
        bool solved = node.is_stock;
        for (ReactionId r : node.children) {
            bool all = true;
            for (MoleculeId c : reactions_[index(r)].reactants) {
                all = all && mol_solved_[index(c)];
            }
            rxn_solved_[index(r)] = all;
            solved = solved || all;
        }
        mol_solved_[index(*it)] = solved;
    }
}

void SearchGraph::reset_weight_states(std::size_t n)
{
    weight_states_.assign(n, WeightState{});
    for (auto& s : weight_states_) {
        grow(s, molecules_.size(), reactions_.size());
    }
}

nlohmann::json SearchGraph::dump() const
{
    nlohmann::json mols = nlohmann::json::array();
    for (const auto& m : molecules_) {
        mols.push_back({{"key", m.key},
                        {"is_stock", m.is_stock},
                        {"expanded", m.expanded},
                        {"pruned", m.pruned},
                        {"heuristic", m.heuristic.values()}});
    }
    nlohmann::json rxns = nlohmann::json::array();
    for (const auto& r : reactions_) {
        std::vector<MoleculeKey> reactants;
        for (MoleculeId c : r.reactants) {
            reactants.push_back(molecules_[index(c)].key);
        }
        rxns.push_back({{"product", molecules_[index(r.product)].key},
                        {"reactants", reactants},
                        {"cost", r.cost.values()},
                        {"rule_id", r.record.rule_id}});
    }
    return {{"molecules", mols}, {"reactions", rxns}};
}

Route assemble_route(const SearchGraph& graph, const std::function<ReactionId(MoleculeId)>& choose)
{
    Route route;
    const MoleculeId target = graph.target();
    route.target = graph.molecule(target).key;
    route.cost = CostVector::zero(graph.mask());
    std::vector<bool> used(graph.reaction_count(), false);
    std::set<MoleculeKey> leaves;
    std::vector<MoleculeId> stack{target};
    std::vector<bool> visited(graph.molecule_count(), false);
    while (!stack.empty()) {
        const MoleculeId m = stack.back();
        stack.pop_back();
        if (visited[index(m)]) {
            continue;
        }
        visited[index(m)] = true;
        const auto& node = graph.molecule(m);
        if (node.is_stock) {
            leaves.insert(node.key);
            continue;
        }
        const ReactionId r = choose(m);
        if (used[index(r)]) {
            continue;
        }
        used[index(r)] = true;
        const auto& rn = graph.reaction(r);
        route.reactions.push_back({rn.record, rn.cost});
        route.cost += rn.cost;
        for (auto it = rn.reactants.rbegin(); it != rn.reactants.rend(); ++it) {
            stack.push_back(*it);
        }
    }
    route.frontier_leaves.assign(leaves.begin(), leaves.end());
    return route;
}

std::optional<Route> extract_best_route(const SearchGraph& graph, std::size_t weight_index)
{
    if (!graph.solved(graph.target())) {
        return std::nullopt;
    }
    const WeightState& s = graph.weight_states().at(weight_index);
    return assemble_route(graph, [&](MoleculeId m) {
        const auto& node = graph.molecule(m);
        std::optional<ReactionId> best;
        for (ReactionId r : node.children) {
            if (!graph.solved(r)) {
                continue;
            }
            if (!best || s.rxn_sv[index(r)] < s.rxn_sv[index(*best)]) {
                best = r;
            }
        }
        if (!best) {
            throw ContractViolation("extract_best_route: solved molecule '" + node.key +
                                    "' has no solved child reaction");
        }
        return *best;
    });
}

} // namespace moretro
