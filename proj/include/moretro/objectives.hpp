#pragma once

#include <atomic>
#include <map>
#include <string>
#include <vector>

#include "moretro/cost_vector.hpp"
#include "moretro/reaction.hpp"

namespace moretro {

enum class ToxicityAggregation { Max, Mean };

/// Agent ID -> hazard score in [0,1]. Unknown agents fall back to a neutral prior.
class AgentTable {
public:
    AgentTable() = default;
    explicit AgentTable(std::map<std::string, double> scores,
                        ToxicityAggregation aggregation = ToxicityAggregation::Max,
                        double unknown_score = 0.5);
    AgentTable(const AgentTable& other);
    AgentTable& operator=(const AgentTable& other);

    double score(const std::string& agent) const;
    bool contains(const std::string& agent) const { return scores_.count(agent) != 0; }

    ToxicityAggregation aggregation() const { return aggregation_; }
    void set_aggregation(ToxicityAggregation aggregation) { aggregation_ = aggregation; }
    double unknown_score() const { return unknown_score_; }
    void set_unknown_score(double score) { unknown_score_ = score; }

    /// Number of lookups that hit an unknown agent.
    std::size_t unknown_hits() const { return unknown_hits_.load(); }
    const std::map<std::string, double>& scores() const { return scores_; }

private:
    std::map<std::string, double> scores_;
    ToxicityAggregation aggregation_ = ToxicityAggregation::Max;
    double unknown_score_ = 0.5;
    mutable std::atomic<std::size_t> unknown_hits_{0};
};

enum class ObjectiveKind { Sustainability, Toxicity, ScaleUp, Guidance };

struct Objective {
    std::string name;
    ObjectiveKind kind;
    double norm_min = 0.0;
    double norm_max = 1.0;
};

/// Ordered objective collection. The guidance dimension steers the search but is
/// excluded from Pareto dominance.
class ObjectiveSet {
public:
    /// sustainability, toxicity, scale-up, guidance.
    static ObjectiveSet standard();

    ObjectiveSet(std::vector<Objective> objectives, std::size_t guidance_index);

    std::size_t size() const { return objectives_.size(); }
    const Objective& operator[](std::size_t i) const { return objectives_[i]; }
    const std::vector<Objective>& objectives() const { return objectives_; }
    std::size_t guidance_index() const { return guidance_index_; }
    const Mask& mask() const& { return mask_; }
    Mask mask() && { return std::move(mask_); }
    /// Overrides the default mask (guidance excluded).
    void set_mask(Mask mask);

    double normalize(std::size_t i, double raw) const;

private:
    std::vector<Objective> objectives_;
    std::size_t guidance_index_;
    Mask mask_;
};

/// Piecewise temperature penalty C(T), boundaries exactly as tabulated.
double temperature_penalty(double celsius);

/// 0.5 C(T) + 0.5 (1 - AE), AE = product heavy atoms / reactant heavy atoms, clipped to [0,1].
double sustainability_cost(const ReactionRecord& reaction, const PropertyLookup& props);

/// Aggregate agent hazard (max by default), 0 without agents.
double toxicity_cost(const ReactionRecord& reaction, const AgentTable& agents);

/// Threshold penalty on the mean |logP(product) - logP(reactant)|.
double separation_penalty(double p_diff);
double scaleup_cost(const ReactionRecord& reaction, const PropertyLookup& props);

/// clip(-ln p / 10, 0, 1); p must lie in (0, 1].
double guidance_cost(double probability);

/// [sa/10, tox, price/15, guidance] each clipped to [0,1]; zero for stock molecules.
CostVector molecule_heuristic(const MoleculeKey& key, bool is_stock, const PropertyLookup& props,
                              const ObjectiveSet& objectives, double guidance_heuristic = 0.0);

CostVector reaction_cost(const ReactionRecord& reaction, const ObjectiveSet& objectives,
                         const PropertyLookup& props, const AgentTable& agents);

} // namespace moretro
