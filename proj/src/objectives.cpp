#include "moretro/objectives.hpp"

#include <algorithm>
#include <cmath>

namespace moretro {

namespace {

double clip01(double v)
{
    return std::clamp(v, 0.0, 1.0);
}

} // namespace

AgentTable::AgentTable(std::map<std::string, double> scores, ToxicityAggregation aggregation,
                       double unknown_score)
    : scores_(std::move(scores)), aggregation_(aggregation), unknown_score_(unknown_score)
{
    for (const auto& [agent, score] : scores_) {
        if (!(score >= 0.0 && score <= 1.0)) {
            throw Error("agent '" + agent + "' has toxicity score outside [0,1]");
        }
    }
}

AgentTable::AgentTable(const AgentTable& other)
    : scores_(other.scores_),
      aggregation_(other.aggregation_),
      unknown_score_(other.unknown_score_),
      unknown_hits_(other.unknown_hits_.load())
{
}

AgentTable& AgentTable::operator=(const AgentTable& other)
{
    scores_ = other.scores_;
    aggregation_ = other.aggregation_;
    unknown_score_ = other.unknown_score_;
    unknown_hits_.store(other.unknown_hits_.load());
    return *this;
}

double AgentTable::score(const std::string& agent) const
{
    auto it = scores_.find(agent);
    if (it == scores_.end()) {
        unknown_hits_.fetch_add(1);
        return unknown_score_;
    }
    return it->second;
}

ObjectiveSet ObjectiveSet::standard()
{
    return ObjectiveSet({{"sustainability", ObjectiveKind::Sustainability},
                         {"toxicity", ObjectiveKind::Toxicity},
                         {"scaleup", ObjectiveKind::ScaleUp},
                         {"guidance", ObjectiveKind::Guidance}},
                        3);
}

ObjectiveSet::ObjectiveSet(std::vector<Objective> objectives, std::size_t guidance_index)
    : objectives_(std::move(objectives)), guidance_index_(guidance_index)
{
    for (const auto& o : objectives_) {
        if (!(o.norm_min < o.norm_max)) {
            throw Error("objective '" + o.name + "': normalization bounds need min < max");
        }
    }
    mask_ = default_mask(objectives_.size(), guidance_index_);
}

void ObjectiveSet::set_mask(Mask mask)
{
    if (mask.size() != objectives_.size()) {
        throw Error("mask length does not match the number of objectives");
    }
    mask_ = std::move(mask);
}

double ObjectiveSet::normalize(std::size_t i, double raw) const
{
    const auto& o = objectives_.at(i);
    return clip01((raw - o.norm_min) / (o.norm_max - o.norm_min));
}

double temperature_penalty(double t)
{
    if (t >= 15.0 && t <= 25.0) {
        return 0.0;
    }
    if ((t >= 10.0 && t < 15.0) || (t > 25.0 && t <= 40.0)) {
        return 0.25;
    }
    if (t >= -20.0 && t < 10.0) {
        return 0.6;
    }
    if (t < -20.0) {
        return 1.0;
    }
    if (t > 40.0 && t <= 120.0) {
        return 0.4;
    }
    return 0.8;
}

double sustainability_cost(const ReactionRecord& reaction, const PropertyLookup& props)
{
    const int product_atoms = props.properties(reaction.product).heavy_atom_count;
    int reactant_atoms = 0;
    for (const auto& r : reaction.reactants) {
        reactant_atoms += props.properties(r).heavy_atom_count;
    }
    if (reactant_atoms <= 0) {
        throw ContractViolation("sustainability_cost: reactant heavy-atom total must be positive");
    }
    const double atom_economy = static_cast<double>(product_atoms) / reactant_atoms;
    return clip01(0.5 * temperature_penalty(reaction.temperature) + 0.5 * (1.0 - atom_economy));
}

double toxicity_cost(const ReactionRecord& reaction, const AgentTable& agents)
{
    if (reaction.agents.empty()) {
        return 0.0;
    }
    double worst = 0.0;
    double total = 0.0;
    for (const auto& a : reaction.agents) {
        const double s = agents.score(a);
        worst = std::max(worst, s);
        total += s;
    }
    if (agents.aggregation() == ToxicityAggregation::Mean) {
        return clip01(total / static_cast<double>(reaction.agents.size()));
    }
    return clip01(worst);
}

double separation_penalty(double p_diff)
{
    if (p_diff >= 3.0) {
        return 0.0;
    }
    if (p_diff >= 2.5) {
        return 0.2;
    }
    if (p_diff >= 2.0) {
        return 0.4;
    }
    if (p_diff >= 1.0) {
        return 0.6;
    }
    if (p_diff >= 0.5) {
        return 0.8;
    }
    return 1.0;
}

double scaleup_cost(const ReactionRecord& reaction, const PropertyLookup& props)
{
    if (reaction.reactants.empty()) {
        throw ContractViolation("scaleup_cost: reaction has no reactants");
    }
    const double product_logp = props.properties(reaction.product).logp;
    double sum = 0.0;
    for (const auto& r : reaction.reactants) {
        sum += std::abs(product_logp - props.properties(r).logp);
    }
    return separation_penalty(sum / static_cast<double>(reaction.reactants.size()));
}

double guidance_cost(double probability)
{
    if (!(probability > 0.0)) {
        throw Error("guidance_cost: reaction probability must be positive");
    }
    return clip01(-std::log(probability) / 10.0);
}

CostVector molecule_heuristic(const MoleculeKey& key, bool is_stock, const PropertyLookup& props,
                              const ObjectiveSet& objectives, double guidance_heuristic)
{
    CostVector v = CostVector::zero(objectives.mask());
    if (is_stock) {
        return v;
    }
    const MoleculeProperties p = props.properties(key);
    for (std::size_t i = 0; i < objectives.size(); ++i) {
        switch (objectives[i].kind) {
        case ObjectiveKind::Sustainability: v[i] = clip01(p.sa_score / 10.0); break;
        case ObjectiveKind::Toxicity: v[i] = clip01(p.toxicity_score); break;
        case ObjectiveKind::ScaleUp: v[i] = clip01(p.price_score / 15.0); break;
        case ObjectiveKind::Guidance: v[i] = clip01(guidance_heuristic); break;
        }
    }
    return v;
}

CostVector reaction_cost(const ReactionRecord& reaction, const ObjectiveSet& objectives,
                         const PropertyLookup& props, const AgentTable& agents)
{
    CostVector c = CostVector::zero(objectives.mask());
    for (std::size_t i = 0; i < objectives.size(); ++i) {
        double raw = 0.0;
        switch (objectives[i].kind) {
        case ObjectiveKind::Sustainability: raw = sustainability_cost(reaction, props); break;
        case ObjectiveKind::Toxicity: raw = toxicity_cost(reaction, agents); break;
        case ObjectiveKind::ScaleUp: raw = scaleup_cost(reaction, props); break;
        case ObjectiveKind::Guidance: raw = guidance_cost(reaction.probability); break;
        }
        c[i] = objectives.normalize(i, raw);
    }
    return c;
}

} // namespace moretro
