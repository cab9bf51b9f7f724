#pragma once

#include <map>

#include "ins/overlay.hpp"
#include "ins/types.hpp"

namespace ins {

// Per-state categorical weights over outgoing transitions. Weights live on
// (state, transition) arcs so that overlay-added arcs can be weighted too.
class PlayerModel {
public:
    PlayerModel() = default;
    explicit PlayerModel(std::map<Arc, double> weights) : weights_(std::move(weights)) {}

    void set(const Arc& arc, double w) { weights_[arc] = w; }
    // 0 when the arc carries no entry.
    double weight(const Arc& arc) const {
        auto it = weights_.find(arc);
        return it == weights_.end() ? 0.0 : it->second;
    }
    const std::map<Arc, double>& weights() const { return weights_; }

    bool operator==(const PlayerModel&) const = default;

private:
    std::map<Arc, double> weights_;
};

// Overlay probability edits take precedence over the model's weights.
inline double effective_weight(const PlayerModel& model, const Overlay& overlay, const Arc& arc) {
    if (auto e = overlay.edit(arc)) return *e;
    return model.weight(arc);
}

}  // namespace ins
