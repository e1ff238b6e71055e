#pragma once

#include <initializer_list>
#include <utility>
#include <vector>

#include "attn/rng.hpp"
#include "attn/types.hpp"

namespace testutil {

inline attn::LabeledExample make_ex(std::initializer_list<std::pair<std::uint32_t, double>> feats,
                                    int label, std::uint64_t id = 0) {
    attn::LabeledExample ex;
    ex.label = label;
    ex.id = id;
    for (const auto& [idx, val] : feats) ex.features.push_back(attn::Feature{idx, val});
    return ex;
}

inline attn::LinearModel make_model(std::initializer_list<double> weights) {
    attn::LinearModel m(static_cast<std::uint32_t>(weights.size()));
    std::size_t i = 0;
    for (double w : weights) m.weights[i++] = w;
    return m;
}

// Dense random example over indices 0..d-1 (index 0 kept as bias value 1.0).
inline attn::LabeledExample random_dense_example(attn::Rng& rng, std::uint32_t d,
                                                 std::uint64_t id) {
    attn::LabeledExample ex;
    ex.id = id;
    ex.label = rng.next_sign();
    ex.features.push_back(attn::Feature{0, 1.0});
    for (std::uint32_t j = 1; j < d; ++j)
        ex.features.push_back(attn::Feature{j, rng.next_normal()});
    return ex;
}

inline attn::LinearModel random_model(attn::Rng& rng, std::uint32_t d) {
    attn::LinearModel m(d);
    for (double& w : m.weights) w = rng.next_normal();
    return m;
}

}  // namespace testutil
