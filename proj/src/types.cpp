#include "attn/types.hpp"

#include <cmath>
#include <string>

namespace attn {

void validate_example(const LabeledExample& ex) {
    if (ex.label != 1 && ex.label != -1)
        throw DataError("example " + std::to_string(ex.id) + ": label must be +1 or -1");
    std::uint32_t prev = 0;
    bool first = true;
    for (const Feature& f : ex.features) {
        if (!first && f.index <= prev)
            throw DataError("example " + std::to_string(ex.id) +
                            ": feature indices must be strictly increasing");
        if (!std::isfinite(f.value))
            throw DataError("example " + std::to_string(ex.id) + ": feature value at index " +
                            std::to_string(f.index) + " is not finite");
        prev = f.index;
        first = false;
    }
}

void validate_config(const FilterConfig& cfg) {
    if (!(cfg.delta > 0.0) || !(cfg.delta < 1.0))
        throw DomainError("delta must lie in (0,1)");
    if (!(cfg.decay > 0.0) || !(cfg.decay < 1.0))
        throw DomainError("decay must lie in (0,1)");
    if (!(cfg.min_std > 0.0))
        throw DomainError("min_std must be positive");
    if (cfg.stride < 1)
        throw DomainError("stride must be >= 1");
    if (!std::isfinite(cfg.theta))
        throw DomainError("theta must be finite");
}

namespace detail {

void require_fits(const LinearModel& model, const LabeledExample& ex) {
    // Indices are sorted, so checking the last one covers them all.
    if (!ex.features.empty() && ex.features.back().index >= model.dimension())
        throw DimensionError("feature index " + std::to_string(ex.features.back().index) +
                             " does not fit model dimension " +
                             std::to_string(model.dimension()));
}

}  // namespace detail

MarginTerm margin_term(const LinearModel& model, const LabeledExample& ex, std::size_t position) {
    if (position >= ex.features.size())
        throw DimensionError("margin_term: position " + std::to_string(position) +
                             " out of range for example with " +
                             std::to_string(ex.features.size()) + " features");
    if (ex.features[position].index >= model.dimension())
        throw DimensionError("margin_term: feature index " +
                             std::to_string(ex.features[position].index) +
                             " does not fit model dimension " +
                             std::to_string(model.dimension()));
    return MarginTerm{detail::term_value(model, ex, position)};
}

double full_margin(const LinearModel& model, const LabeledExample& ex) {
    detail::require_fits(model, ex);
    double acc = 0.0;
    const std::size_t n = ex.features.size();
    for (std::size_t i = 0; i < n; ++i) acc += detail::term_value(model, ex, i);
    return acc;
}

}  // namespace attn
