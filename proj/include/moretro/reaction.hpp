#pragma once

#include <string>
#include <vector>

#include "moretro/cost_vector.hpp"

namespace moretro {

/// Opaque canonical molecule identifier. Equal keys denote the same molecule.
using MoleculeKey = std::string;

/// One predicted reaction (r, a, T, p, rule) plus the single-step model likelihood.
struct ReactionRecord {
    std::vector<MoleculeKey> reactants;
    std::vector<std::string> agents;
    double temperature = 20.0;
    MoleculeKey product;
    std::string rule_id;
    double probability = 1.0;

    /// product>sorted reactants|rule_id|sorted agents|temperature
    std::string signature() const;
    bool operator==(const ReactionRecord&) const = default;
};

struct MoleculeProperties {
    int heavy_atom_count = 1;
    double toxicity_score = 0.0;
    double price_score = 0.0;
    double sa_score = 0.0;
    double logp = 0.0;
};

class MissingPropertyError : public Error {
public:
    explicit MissingPropertyError(const MoleculeKey& key)
        : Error("no property record for molecule '" + key + "'"), key_(key) {}
    const MoleculeKey& key() const { return key_; }

private:
    MoleculeKey key_;
};

class PropertyLookup {
public:
    virtual ~PropertyLookup() = default;
    /// Throws MissingPropertyError when the molecule has no record.
    virtual MoleculeProperties properties(const MoleculeKey& key) const = 0;
};

} // namespace moretro
