#pragma once

#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "moretro/config.hpp"
#include "moretro/expansion.hpp"
#include "moretro/graph.hpp"
#include "moretro/objectives.hpp"
#include "moretro/oracle.hpp"
#include "moretro/search.hpp"

namespace testkit {

using namespace moretro;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Four-dim cost with the guidance dimension unmasked.
inline CostVector cost(std::vector<double> v)
{
    return CostVector(std::move(v), Mask{true, true, true, false});
}

inline NewMolecule fresh(bool stock = false, std::vector<double> h = {0, 0, 0, 0})
{
    return {stock, cost(std::move(h))};
}

inline CostedReaction rxn(const MoleculeKey& product, std::vector<MoleculeKey> reactants, std::vector<double> c,
                          const std::string& rule = "r")
{
    ReactionRecord r;
    r.product = product;
    r.reactants = std::move(reactants);
    r.rule_id = rule;
    return {r, cost(std::move(c))};
}

/// Molecule factory over an explicit stock set with zero heuristics.
inline MoleculeFactory stock_factory(std::set<MoleculeKey> stock)
{
    return [stock = std::move(stock)](const MoleculeKey& k) { return fresh(stock.count(k) != 0); };
}

/// Random world parameters for property and acceptance sweeps.
inline WorldSpec random_world(std::uint64_t seed, int depth_max = 4, int branching_max = 3)
{
    std::mt19937_64 rng(seed * 7919 + 17);
    WorldSpec w;
    w.seed = seed;
    w.depth_max = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(depth_max - 1));
    w.branching = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(branching_max - 1));
    w.pool_size = 3 + static_cast<int>(rng() % 2);
    w.reactants_max = 2;
    w.stock_base = 0.1 + 0.2 * std::uniform_real_distribution<double>(0, 1)(rng);
    w.stock_slope = 0.15;
    return w;
}

/// Provider wrapper counting expand() calls.
class CountingProvider final : public ExpansionProvider {
public:
    explicit CountingProvider(const ExpansionProvider& inner) : inner_(inner) {}

    std::vector<ReactionRecord> expand(const MoleculeKey& m) const override
    {
        ++calls_;
        distinct_.insert(m);
        return inner_.expand(m);
    }
    bool in_stock(const MoleculeKey& m) const override { return inner_.in_stock(m); }
    MoleculeProperties properties(const MoleculeKey& m) const override { return inner_.properties(m); }
    const AgentTable& agent_table() const override { return inner_.agent_table(); }

    std::size_t calls() const { return calls_; }
    std::size_t distinct() const { return distinct_.size(); }

private:
    const ExpansionProvider& inner_;
    mutable std::size_t calls_ = 0;
    mutable std::set<MoleculeKey> distinct_;
};

/// Uniform simplex weight from sorted uniform gaps, renormalized.
inline WeightVector random_weight(std::mt19937_64& rng, std::size_t dims)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> cuts{0.0, 1.0};
    for (std::size_t i = 0; i + 1 < dims; ++i) {
        cuts.push_back(u(rng));
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> w;
    double sum = 0.0;
    for (std::size_t i = 0; i < dims; ++i) {
        w.push_back(cuts[i + 1] - cuts[i]);
        sum += w.back();
    }
    for (double& x : w) {
        x /= sum;
    }
    double rest = 1.0;
    for (std::size_t i = 0; i + 1 < dims; ++i) {
        rest -= w[i];
    }
    w.back() = std::max(0.0, rest);
    return WeightVector(w);
}

inline bool same_cost_set(std::vector<std::vector<double>> a, std::vector<std::vector<double>> b,
                          double tol = 1e-9)
{
    auto covered = [tol](const auto& xs, const auto& ys) {
        for (const auto& x : xs) {
            bool hit = false;
            for (const auto& y : ys) {
                bool eq = x.size() == y.size();
                for (std::size_t i = 0; eq && i < x.size(); ++i) {
                    eq = std::abs(x[i] - y[i]) <= tol;
                }
                hit = hit || eq;
            }
            if (!hit) {
                return false;
            }
        }
        return true;
    };
    return covered(a, b) && covered(b, a);
}

/// Every partial route below `m` in the graph as a tree: one child reaction per expanded
/// molecule, unexpanded molecules contributing their heuristic. Returns scalarized values.
inline std::vector<double> partial_values(const SearchGraph& g, MoleculeId m, const WeightVector& w)
{
    const auto& node = g.molecule(m);
    if (node.is_stock) {
        return {0.0};
    }
    if (!node.expanded) {
        double h = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            h += w[i] * node.heuristic[i];
        }
        return {h};
    }
    std::vector<double> out;
    for (ReactionId r : node.children) {
        const auto& rx = g.reaction(r);
        double own = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            own += w[i] * rx.cost[i];
        }
        std::vector<double> acc{own};
        for (MoleculeId c : rx.reactants) {
            std::vector<double> next;
            for (double a : acc) {
                for (double b : partial_values(g, c, w)) {
                    next.push_back(a + b);
                }
            }
            acc = std::move(next);
        }
        out.insert(out.end(), acc.begin(), acc.end());
    }
    return out;
}

/// Partial trees from the root: (scalarized value, molecules in the tree).
inline void root_trees(const SearchGraph& g, const WeightVector& w,
                       std::vector<std::pair<double, std::set<std::size_t>>>& out)
{
    using Tree = std::pair<double, std::set<std::size_t>>;
    std::function<std::vector<Tree>(MoleculeId)> below = [&](MoleculeId m) -> std::vector<Tree> {
        const auto& node = g.molecule(m);
        if (node.is_stock) {
            return {{0.0, {index(m)}}};
        }
        if (!node.expanded) {
            double h = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i) {
                h += w[i] * node.heuristic[i];
            }
            return {{h, {index(m)}}};
        }
        std::vector<Tree> out;
        for (ReactionId r : node.children) {
            const auto& rx = g.reaction(r);
            double own = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i) {
                own += w[i] * rx.cost[i];
            }
            std::vector<Tree> acc{{own, {index(m)}}};
            for (MoleculeId c : rx.reactants) {
                std::vector<Tree> next;
                for (const auto& a : acc) {
                    for (const auto& b : below(c)) {
                        Tree t = a;
                        t.first += b.first;
                        t.second.insert(b.second.begin(), b.second.end());
                        next.push_back(std::move(t));
                    }
                }
                acc = std::move(next);
            }
            out.insert(out.end(), acc.begin(), acc.end());
        }
        return out;
    };
    out = below(g.target());
}

/// Runs a search to termination on a synthetic world.
struct WorldRun {
    SyntheticWorld world;
    ObjectiveSet objectives = ObjectiveSet::standard();
    std::unique_ptr<Search> search;

    WorldRun(WorldSpec spec, SearchConfig config) : world(std::move(spec))
    {
        search = std::make_unique<Search>(std::move(config), world, objectives, world.spec().target);
    }
};

inline SearchConfig certify_config(double epsilon = 0.0, Strategy s = Strategy::MoretroBO)
{
    SearchConfig c = SearchConfig::for_strategy(s);
    c.use_heuristics = false;
    c.certify = true;
    c.epsilon = epsilon;
    c.expansion_budget = 1'000'000;
    return c;
}

} // namespace testkit
