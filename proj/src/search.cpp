#include "moretro/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "moretro/graph_routes.hpp"

namespace moretro {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t masked_dims(const Mask& mask)
{
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
}

} // namespace

double scalarize(std::span<const double> v, std::span<const double> w)
{
    if (v.size() != w.size()) {
        throw Error("scalarize: cost has " + std::to_string(v.size()) + " dimensions, weight has " +
                    std::to_string(w.size()));
    }
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += w[i] * v[i];
    }
    return s;
}

double scalarize(const CostVector& v, const WeightVector& w)
{
    return scalarize(v.values(), w.values());
}

// ---------------------------------------------------------------------------

ParetoArchive::ParetoArchive(Mask mask, std::vector<double> hv_reference)
    : mask_(std::move(mask)), reference_(std::move(hv_reference))
{
    if (reference_.size() != masked_dims(mask_)) {
        throw Error("archive HV reference needs one entry per masked dimension");
    }
}

std::vector<Point> ParetoArchive::masked_costs() const
{
    return masked_;
}

double ParetoArchive::recompute_hv() const
{
    return moretro::hypervolume(masked_, reference_);
}

ParetoArchive::Outcome ParetoArchive::insert(Route route)
{
    last_delta_ = 0.0;
    const Point cost = project(route.cost.values(), mask_);
    for (const auto& existing : masked_) {
        if (approx_equal(existing, cost)) {
            return Outcome::Duplicate;
        }
        if (weakly_dominates(existing, cost)) {
            return Outcome::Dominated;
        }
    }
    std::vector<Route> kept;
    std::vector<Point> kept_masked;
    for (std::size_t i = 0; i < routes_.size(); ++i) {
        if (!weakly_dominates(cost, masked_[i])) {
            kept.push_back(std::move(routes_[i]));
            kept_masked.push_back(std::move(masked_[i]));
        }
    }
    kept.push_back(std::move(route));
    kept_masked.push_back(cost);
    routes_ = std::move(kept);
    masked_ = std::move(kept_masked);
    const double hv = recompute_hv();
    last_delta_ = hv - hv_;
    hv_ = hv;
    return Outcome::Inserted;
}

// ---------------------------------------------------------------------------

std::string to_string(Strategy s)
{
    switch (s) {
    case Strategy::MoretroBO: return "moretro-bo";
    case Strategy::MoretroGrid: return "moretro-grid";
    case Strategy::MoretroSobol: return "moretro-sobol";
    case Strategy::RetroStar: return "retro-star";
    case Strategy::Fixed: return "fixed";
    }
    return "?";
}

Strategy strategy_from_string(const std::string& s)
{
    for (Strategy v : {Strategy::MoretroBO, Strategy::MoretroGrid, Strategy::MoretroSobol, Strategy::RetroStar,
                       Strategy::Fixed}) {
        if (to_string(v) == s) {
            return v;
        }
    }
    throw Error("unknown strategy '" + s + "' (expected moretro-bo, moretro-grid, moretro-sobol, retro-star or fixed)");
}

std::string to_string(Termination t)
{
    switch (t) {
    case Termination::None: return "running";
    case Termination::Budget: return "budget";
    case Termination::Time: return "time";
    case Termination::PoolExhausted: return "pool_exhausted";
    case Termination::Certified: return "certified";
    case Termination::FrontierEmpty: return "frontier_empty";
    case Termination::ScalarCertified: return "scalar_certified";
    case Termination::NoSelectable: return "no_selectable";
    }
    return "?";
}

SearchConfig SearchConfig::for_strategy(Strategy s)
{
    SearchConfig c;
    c.strategy = s;
    c.pool.n_active = 5;
    switch (s) {
    case Strategy::MoretroBO:
        c.pool.strategy = SamplingStrategy::BO;
        c.w_budget = 12;
        break;
    case Strategy::MoretroGrid:
        c.pool.strategy = SamplingStrategy::Grid;
        c.w_budget = 16;
        break;
    case Strategy::MoretroSobol:
        c.pool.strategy = SamplingStrategy::Sobol;
        c.w_budget = 10;
        break;
    case Strategy::RetroStar:
        c.pool.strategy = SamplingStrategy::Fixed;
        c.pool.n_active = 1;
        c.pool.fixed_weights = {{0.0, 0.0, 0.0, 1.0}};
        c.w_budget = 0;
        break;
    case Strategy::Fixed:
        c.pool.strategy = SamplingStrategy::Fixed;
        c.pool.n_active = 1;
        c.pool.fixed_weights = {{0.2, 0.2, 0.2, 0.4}};
        c.w_budget = 0;
        break;
    }
    return c;
}

void SearchConfig::validate(std::size_t dims) const
{
    if (!(epsilon >= 0.0)) {
        throw Error("epsilon must be >= 0");
    }
    if (!(time_budget >= 0.0)) {
        throw Error("time budget must be >= 0");
    }
    if (pool.n_active == 0) {
        throw Error("n_active must be >= 1");
    }
    if (pool.strategy == SamplingStrategy::Fixed) {
        for (const auto& w : pool.fixed_weights) {
            if (w.size() != dims) {
                throw Error("fixed weight dimension does not match the objectives");
            }
            WeightVector check(w);
        }
    }
    if (scalar_certify && !(pool.strategy == SamplingStrategy::Fixed && pool.fixed_weights.size() == 1)) {
        throw Error("scalar_certify requires a single fixed weight");
    }
}

// ---------------------------------------------------------------------------

void initialize_weight(SearchGraph& graph, std::size_t j, const WeightVector& w)
{
    auto& s = graph.weight_states().at(j);
    for (std::size_t i = 0; i < graph.molecule_count(); ++i) {
        const auto& node = graph.molecule(MoleculeId{static_cast<std::uint32_t>(i)});
        if (node.is_stock) {
            s.mol_rn[i] = 0.0;
        } else if (!node.expanded) {
            s.mol_rn[i] = scalarize(node.heuristic, w);
        }
    }
}

void propagate_up(SearchGraph& graph, std::size_t j, const WeightVector& w)
{
    auto& s = graph.weight_states().at(j);
    const auto& order = graph.topological_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const std::size_t m = index(*it);
        const auto& node = graph.molecule(*it);
        if (node.is_stock) {
            s.mol_rn[m] = 0.0;
            s.mol_sv[m] = 0.0;
            continue;
        }
        if (!node.expanded) {
            s.mol_rn[m] = scalarize(node.heuristic, w);
            s.mol_sv[m] = kInf;
            continue;
        }
        double rn = kInf;
        double sv = kInf;
        for (ReactionId r : node.children) {
            const auto& rxn = graph.reaction(r);
            const double own = scalarize(rxn.cost, w);
            double rr = own;
            double rs = own;
            for (MoleculeId c : rxn.reactants) {
                rr += s.mol_rn[index(c)];
                rs += s.mol_sv[index(c)];
            }
            s.rxn_rn[index(r)] = rr;
            s.rxn_sv[index(r)] = rs;
            rn = std::min(rn, rr);
            sv = std::min(sv, rs);
        }
        s.mol_rn[m] = rn;
        s.mol_sv[m] = sv;
    }
}

void propagate_down(SearchGraph& graph, std::size_t j)
{
    auto& s = graph.weight_states().at(j);
    std::fill(s.mol_vt.begin(), s.mol_vt.end(), kInf);
    std::fill(s.rxn_vt.begin(), s.rxn_vt.end(), kInf);
    const MoleculeId target = graph.target();
    s.mol_vt[index(target)] = s.mol_rn[index(target)];
    for (MoleculeId m : graph.topological_order()) {
        const auto& node = graph.molecule(m);
        double& vt = s.mol_vt[index(m)];
        if (m != target) {
            for (ReactionId r : node.parents) {
                vt = std::min(vt, s.rxn_vt[index(r)]);
            }
        }
        for (ReactionId r : node.children) {
            const double rr = s.rxn_rn[index(r)];
            s.rxn_vt[index(r)] = (rr == kInf || vt == kInf) ? kInf : rr - s.mol_rn[index(m)] + vt;
        }
    }
}

std::optional<MoleculeId> select_molecule(const SearchGraph& graph, std::size_t weight_index)
{
    const auto& vt = graph.weight_states().at(weight_index).mol_vt;
    std::optional<MoleculeId> best;
    for (MoleculeId m : graph.frontier()) {
        const double v = vt[index(m)];
        if (v == kInf) {
            continue;
        }
        if (!best || v < vt[index(*best)]) {
            best = m;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------

namespace {

SearchConfig effective(SearchConfig c)
{
    if (c.certify) {
        c.pruning = true;
        c.complete_archive = true;
    }
    return c;
}

} // namespace

Search::Search(SearchConfig config, const ExpansionProvider& provider, ObjectiveSet objectives, MoleculeKey target)
    : config_(effective(std::move(config))),
      provider_(provider),
      objectives_(std::move(objectives)),
      graph_(target, make_molecule(target)),
      pool_(config_.pool, objectives_.size(), objectives_.guidance_index()),
      archive_(objectives_.mask(), config_.archive_hv_reference),
      start_(std::chrono::steady_clock::now())
{
    config_.validate(objectives_.size());
    rebuild_states();
    propagate();
    record();
    prune();
    trace_.push_back({0, 0, 0, archive_.size(), archive_.hypervolume()});
}

NewMolecule Search::make_molecule(const MoleculeKey& key) const
{
    NewMolecule info;
    try {
        info.is_stock = provider_.in_stock(key);
        info.heuristic = config_.use_heuristics
                             ? molecule_heuristic(key, info.is_stock, provider_, objectives_)
                             : CostVector::zero(objectives_.mask());
    } catch (const Error& e) {
        throw Error("molecule '" + key + "': " + e.what());
    }
    return info;
}

double Search::elapsed() const
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
}

void Search::rebuild_states()
{
    graph_.reset_weight_states(pool_.active().size());
    hv_gain_.assign(pool_.active().size(), 0.0);
}

void Search::propagate()
{
    graph_.refresh_solved();
    const auto& active = pool_.active();
    for (std::size_t j = 0; j < active.size(); ++j) {
        propagate_up(graph_, j, active[j]);
        propagate_down(graph_, j);
    }
}

std::optional<Route> Search::best_route(std::size_t j) const
{
    return extract_best_route(graph_, j);
}

double Search::best_value(std::size_t j) const
{
    return graph_.weight_states().at(j).mol_sv[index(graph_.target())];
}

void Search::record()
{
    if (!graph_.solved(graph_.target())) {
        return;
    }
    std::set<std::vector<std::string>> seen;
    const auto& active = pool_.active();
    for (std::size_t j = 0; j < active.size(); ++j) {
        auto route = extract_best_route(graph_, j);
        if (!route || !seen.insert(route->identity()).second) {
            continue;
        }
        route->generating_weight = active[j].values();
        if (archive_.insert(std::move(*route)) == ParetoArchive::Outcome::Inserted) {
            hv_gain_[j] += archive_.last_delta();
            ++stats_.archive_inserts;
        }
    }
    if (config_.complete_archive) {
        for (auto& route : solved_pareto_routes(graph_)) {
            if (archive_.insert(std::move(route)) == ParetoArchive::Outcome::Inserted) {
                ++stats_.archive_inserts;
            }
        }
    }
}

void Search::prune()
{
    if (!config_.pruning) {
        return;
    }
    bounds_ = compute_bounds(graph_);
    stats_.pruning = prune_frontier(graph_, bounds_, archive_.masked_costs(), config_.epsilon);
}

bool Search::scalar_certified() const
{
    if (!graph_.solved(graph_.target())) {
        return false;
    }
    const auto& vt = graph_.weight_states().at(0).mol_vt;
    double lowest = kInf;
    for (MoleculeId m : graph_.frontier()) {
        lowest = std::min(lowest, vt[index(m)]);
    }
    return best_value(0) <= lowest + kCostTolerance;
}

std::optional<MoleculeId> Search::select(std::size_t j) const
{
    return select_molecule(graph_, j);
}

void Search::finish(Termination t)
{
    if (config_.strategy == Strategy::RetroStar) {
        for (auto& route : solved_pareto_routes(graph_)) {
            if (archive_.insert(std::move(route)) == ParetoArchive::Outcome::Inserted) {
                ++stats_.archive_inserts;
            }
        }
    }
    stats_.termination = t;
    stats_.cycle_discards = graph_.cycle_discards();
    stats_.resamples = pool_.resamples();
    stats_.wall_seconds = elapsed();
}

bool Search::step()
{
    if (done()) {
        return false;
    }
    if (stats_.expansions >= config_.expansion_budget) {
        finish(Termination::Budget);
        return false;
    }
    if (config_.time_budget > 0.0 && elapsed() >= config_.time_budget) {
        finish(Termination::Time);
        return false;
    }
    if (config_.certify && stats_.pruning.certified) {
        finish(Termination::Certified);
        return false;
    }
    if (config_.scalar_certify && scalar_certified()) {
        finish(Termination::ScalarCertified);
        return false;
    }
    if (config_.pool.strategy != SamplingStrategy::Fixed && WeightPool::resample_due(k_, config_.w_budget)) {
        const bool fresh = pool_.resample(k_, config_.w_budget, hv_gain_);
        if (!fresh && !config_.certify) {
            finish(Termination::PoolExhausted);
            return false;
        }
        rebuild_states();
        propagate();
    }
    if (graph_.frontier().empty()) {
        finish(Termination::FrontierEmpty);
        return false;
    }

    std::vector<MoleculeId> chosen;
    for (std::size_t j = 0; j < pool_.active().size(); ++j) {
        if (auto m = select(j); m && std::find(chosen.begin(), chosen.end(), *m) == chosen.end()) {
            chosen.push_back(*m);
        }
    }
    if (chosen.empty()) {
        finish(Termination::NoSelectable);
        return false;
    }
    const std::size_t remaining = config_.expansion_budget - stats_.expansions;
    if (chosen.size() > remaining) {
        chosen.resize(remaining);
    }

    for (MoleculeId m : chosen) {
        const MoleculeKey key = graph_.molecule(m).key;
        std::vector<CostedReaction> candidates;
        try {
            ++stats_.provider_calls;
            for (auto& rec : provider_.expand(key)) {
                CostVector cost = reaction_cost(rec, objectives_, provider_, provider_.agent_table());
                candidates.push_back({std::move(rec), std::move(cost)});
            }
        } catch (const Error& e) {
            throw Error("expansion of '" + key + "' failed: " + e.what());
        }
        graph_.add_expansion(m, candidates, [this](const MoleculeKey& k) { return make_molecule(k); });
        ++stats_.expansions;
    }

    propagate();
    record();
    prune();
    ++k_;
    stats_.iterations = k_;
    trace_.push_back({k_, stats_.expansions, chosen.size(), archive_.size(), archive_.hypervolume()});
    return true;
}

void Search::run()
{
    while (step()) {
    }
}

} // namespace moretro
