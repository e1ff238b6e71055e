#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "attn/types.hpp"

namespace attn {

struct Dataset {
    std::vector<LabeledExample> examples;
    std::uint32_t dimension = 1;  // 1 + max feature index
    std::string name;

    bool operator==(const Dataset&) const = default;
};

enum class SynthKind { GaussianSeparable, GaussianNoisy, RandomWalkTerms };

struct SynthSpec {
    SynthKind kind = SynthKind::GaussianSeparable;
    std::uint32_t n_examples = 0;
    std::uint32_t n_features = 0;
    double margin = 1.0;        // separation of the Gaussian kinds
    double flip_prob = 0.0;     // label noise, GaussianNoisy only
    std::uint64_t seed = 1;
};

struct ParseOptions {
    bool map01 = false;  // remap on-disk label 0 to -1 (and keep 1 as +1)
};

// One "LABEL idx:val idx:val ..." line. Labels +1/1/-1; indices 1-based on
// disk, strictly increasing; the bias feature (index 0, value 1.0) is inserted
// up front. Throws DataError on any malformed token.
LabeledExample parse_sparse_line(std::string_view line, std::uint64_t id,
                                 const ParseOptions& opts = {});

// Loads a sparse text file; .gz accepted by extension. Blank lines are
// skipped; errors carry the file name and line number.
Dataset load_dataset(const std::string& path, const ParseOptions& opts = {});

// Writes the same sparse text format, one example per line, "+1"/"-1" labels,
// shortest-round-trip reals, bias feature elided. Honors a .gz extension.
void save_dataset(const Dataset& ds, const std::string& path);

// Deterministic synthetic data; a pure function of the spec.
//   GaussianSeparable  unit teacher u from the seed, x ~ N(0,I), label =
//                      sign(u.x), then x shifted by margin*label*u so every
//                      example has teacher margin >= margin
//   GaussianNoisy      same, then each label flipped with flip_prob
//   RandomWalkTerms    iid +-1 feature values and labels
Dataset generate_synthetic(const SynthSpec& spec);

// The visit permutation behind shuffle(); train_epoch uses the same one, so
// training over shuffle(ds, s) in stored order equals training over ds with
// shuffle seed s.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

// Fisher-Yates permutation of the examples; same seed, same order.
Dataset shuffle(Dataset ds, std::uint64_t seed);

// Scales each example's non-bias features to unit L2 norm (zero rows kept).
void l2_normalize(Dataset& ds);

}  // namespace attn
