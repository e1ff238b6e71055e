#include "attn/data_io.hpp"

#include <zlib.h>

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <utility>

#include "attn/rng.hpp"

namespace attn {

namespace {

// substream tags for deterministic generation
constexpr std::uint64_t kTeacherStream = 0x7ea0c8e5ULL;
constexpr std::uint64_t kExampleStreamBase = 0x0e8a3b10ULL;
constexpr std::uint64_t kShuffleStream = 0x5f0c1ed5ULL;

bool has_gz_suffix(const std::string& path) {
    return path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
}

void append_double(std::string& out, double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

struct LineSource {
    virtual ~LineSource() = default;
    virtual bool next(std::string& line) = 0;
};

struct PlainSource final : LineSource {
    std::ifstream in;
    explicit PlainSource(const std::string& path) : in(path) {
        if (!in) throw DataError("cannot open " + path);
    }
    bool next(std::string& line) override { return static_cast<bool>(std::getline(in, line)); }
};

struct GzSource final : LineSource {
    gzFile f = nullptr;
    std::string path;
    explicit GzSource(const std::string& p) : path(p) {
        f = gzopen(p.c_str(), "rb");
        if (!f) throw DataError("cannot open " + p);
    }
    ~GzSource() override {
        if (f) gzclose(f);
    }
    bool next(std::string& line) override {
        line.clear();
        char buf[1 << 16];
        bool got_any = false;
        while (gzgets(f, buf, sizeof buf) != nullptr) {
            got_any = true;
            line += buf;
            if (!line.empty() && line.back() == '\n') {
                line.pop_back();
                return true;
            }
        }
        int errnum = 0;
        const char* msg = gzerror(f, &errnum);
        if (errnum != Z_OK && errnum != Z_STREAM_END)
            throw DataError(path + ": gzip read error: " + (msg ? msg : ""));
        return got_any;
    }
};

std::unique_ptr<LineSource> open_source(const std::string& path) {
    if (has_gz_suffix(path)) return std::make_unique<GzSource>(path);
    return std::make_unique<PlainSource>(path);
}

bool blank(std::string_view s) {
    for (char c : s)
        if (c != ' ' && c != '\t' && c != '\r') return false;
    return true;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

int parse_label(std::string_view tok, const ParseOptions& opts) {
    if (tok == "+1" || tok == "1") return +1;
    if (tok == "-1") return -1;
    if (tok == "0") {
        if (opts.map01) return -1;
        throw DataError("label 0 rejected (use --map01 to remap 0 to -1)");
    }
    throw DataError("unrecognized label '" + std::string(tok) + "'");
}

}  // namespace

LabeledExample parse_sparse_line(std::string_view line, std::uint64_t id,
                                 const ParseOptions& opts) {
    const auto tokens = split_ws(line);
    if (tokens.empty()) throw DataError("empty line");

    LabeledExample ex;
    ex.id = id;
    ex.label = parse_label(tokens[0], opts);
    ex.features.push_back(Feature{kBiasIndex, 1.0});

    std::uint32_t prev = kBiasIndex;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
        const std::string_view tok = tokens[t];
        const std::size_t colon = tok.find(':');
        if (colon == std::string_view::npos || colon == 0 || colon + 1 >= tok.size())
            throw DataError("expected index:value, got '" + std::string(tok) + "'");

        std::uint32_t idx = 0;
        const char* ib = tok.data();
        const char* ie = tok.data() + colon;
        const auto ir = std::from_chars(ib, ie, idx);
        if (ir.ec != std::errc{} || ir.ptr != ie)
            throw DataError("bad feature index in '" + std::string(tok) + "'");
        if (idx == kBiasIndex)
            throw DataError("feature index 0 is reserved for the bias (indices are 1-based)");
        if (idx <= prev)
            throw DataError("feature indices must be strictly increasing, got " +
                            std::to_string(idx) + " after " + std::to_string(prev));

        double val = 0.0;
        const char* vb = tok.data() + colon + 1;
        const char* ve = tok.data() + tok.size();
        const auto vr = std::from_chars(vb, ve, val);
        if (vr.ec != std::errc{} || vr.ptr != ve)
            throw DataError("bad feature value in '" + std::string(tok) + "'");
        if (!std::isfinite(val))
            throw DataError("feature value must be finite in '" + std::string(tok) + "'");

        ex.features.push_back(Feature{idx, val});
        prev = idx;
    }
    return ex;
}

Dataset load_dataset(const std::string& path, const ParseOptions& opts) {
    auto src = open_source(path);
    Dataset ds;
    ds.name = path;
    std::string line;
    std::uint64_t line_no = 0;
    std::uint32_t max_index = kBiasIndex;
    while (src->next(line)) {
        ++line_no;
        if (blank(line)) continue;
        try {
            LabeledExample ex = parse_sparse_line(line, ds.examples.size(), opts);
            max_index = std::max(max_index, ex.features.back().index);
            ds.examples.push_back(std::move(ex));
        } catch (const DataError& e) {
            throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    ds.dimension = max_index + 1;
    return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
    std::string buf;
    buf.reserve(1 << 20);

    const auto flush_plain = [&](std::ofstream& out) {
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        buf.clear();
    };

    if (has_gz_suffix(path)) {
        gzFile f = gzopen(path.c_str(), "wb");
        if (!f) throw DataError("cannot open " + path + " for writing");
        for (const LabeledExample& ex : ds.examples) {
            buf.append(ex.label > 0 ? "+1" : "-1");
            for (const Feature& feat : ex.features) {
                if (feat.index == kBiasIndex) continue;
                buf.push_back(' ');
                buf.append(std::to_string(feat.index));
                buf.push_back(':');
                append_double(buf, feat.value);
            }
            buf.push_back('\n');
            if (buf.size() > (1 << 20)) {
                if (gzwrite(f, buf.data(), static_cast<unsigned>(buf.size())) == 0) {
                    gzclose(f);
                    throw DataError("gzip write error on " + path);
                }
                buf.clear();
            }
        }
        if (!buf.empty() &&
            gzwrite(f, buf.data(), static_cast<unsigned>(buf.size())) == 0) {
            gzclose(f);
            throw DataError("gzip write error on " + path);
        }
        if (gzclose(f) != Z_OK) throw DataError("gzip close error on " + path);
        return;
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path + " for writing");
    for (const LabeledExample& ex : ds.examples) {
        buf.append(ex.label > 0 ? "+1" : "-1");
        for (const Feature& feat : ex.features) {
            if (feat.index == kBiasIndex) continue;
            buf.push_back(' ');
            buf.append(std::to_string(feat.index));
            buf.push_back(':');
            append_double(buf, feat.value);
        }
        buf.push_back('\n');
        if (buf.size() > (1 << 20)) flush_plain(out);
    }
    flush_plain(out);
    if (!out) throw DataError("write error on " + path);
}

namespace {

void validate_spec(const SynthSpec& spec) {
    if (spec.n_examples == 0) throw DomainError("synthetic spec: n_examples must be positive");
    if (spec.n_features == 0) throw DomainError("synthetic spec: n_features must be positive");
    if (spec.kind != SynthKind::RandomWalkTerms && !(spec.margin > 0.0))
        throw DomainError("synthetic spec: margin must be positive");
    if (!(spec.flip_prob >= 0.0) || spec.flip_prob >= 0.5)
        throw DomainError("synthetic spec: flip_prob must lie in [0, 0.5)");
}

std::string kind_name(SynthKind k) {
    switch (k) {
        case SynthKind::GaussianSeparable: return "gaussian-sep";
        case SynthKind::GaussianNoisy: return "gaussian-noisy";
        case SynthKind::RandomWalkTerms: return "walk";
    }
    return "?";
}

}  // namespace

Dataset generate_synthetic(const SynthSpec& spec) {
    validate_spec(spec);
    const std::uint32_t d = spec.n_features;

    Dataset ds;
    ds.dimension = d + 1;
    {
        std::string name = "synth:" + kind_name(spec.kind);
        name += ":n=" + std::to_string(spec.n_examples);
        name += ":d=" + std::to_string(d);
        if (spec.kind != SynthKind::RandomWalkTerms) {
            name += ":margin=";
            append_double(name, spec.margin);
            name += ":flip=";
            append_double(name, spec.flip_prob);
        }
        name += ":seed=" + std::to_string(spec.seed);
        ds.name = std::move(name);
    }
    ds.examples.reserve(spec.n_examples);

    std::vector<double> teacher;
    if (spec.kind != SynthKind::RandomWalkTerms) {
        Rng tr = Rng::keyed(spec.seed, kTeacherStream);
        teacher.resize(d);
        double norm2 = 0.0;
        for (double& u : teacher) {
            u = tr.next_normal();
            norm2 += u * u;
        }
        if (norm2 == 0.0) {
            teacher[0] = 1.0;
            norm2 = 1.0;
        }
        const double inv = 1.0 / std::sqrt(norm2);
        for (double& u : teacher) u *= inv;
    }

    for (std::uint32_t i = 0; i < spec.n_examples; ++i) {
        // One substream per example: generation is order-independent and the
        // Noisy kind's extra flip draw cannot shift later examples' features.
        Rng er = Rng::keyed(spec.seed, kExampleStreamBase + i);
        LabeledExample ex;
        ex.id = i;
        ex.features.reserve(d + 1);
        ex.features.push_back(Feature{kBiasIndex, 1.0});

        if (spec.kind == SynthKind::RandomWalkTerms) {
            ex.label = er.next_sign();
            for (std::uint32_t j = 0; j < d; ++j)
                ex.features.push_back(
                    Feature{j + 1, static_cast<double>(er.next_sign())});
        } else {
            std::vector<double> x(d);
            double t = 0.0;
            for (std::uint32_t j = 0; j < d; ++j) {
                x[j] = er.next_normal();
                t += teacher[j] * x[j];
            }
            const int label = t >= 0.0 ? +1 : -1;
            const double shift = spec.margin * static_cast<double>(label);
            ex.label = label;
            for (std::uint32_t j = 0; j < d; ++j)
                ex.features.push_back(Feature{j + 1, x[j] + shift * teacher[j]});
            if (spec.kind == SynthKind::GaussianNoisy && er.next_unit() < spec.flip_prob)
                ex.label = -ex.label;
        }
        ds.examples.push_back(std::move(ex));
    }
    return ds;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
    return random_permutation<std::size_t>(n, Rng::keyed(seed, kShuffleStream));
}

Dataset shuffle(Dataset ds, std::uint64_t seed) {
    const auto perm = shuffled_indices(ds.examples.size(), seed);
    std::vector<LabeledExample> out;
    out.reserve(ds.examples.size());
    for (const std::size_t idx : perm) out.push_back(std::move(ds.examples[idx]));
    ds.examples = std::move(out);
    return ds;
}

void l2_normalize(Dataset& ds) {
    for (LabeledExample& ex : ds.examples) {
        double norm2 = 0.0;
        for (const Feature& f : ex.features)
            if (f.index != kBiasIndex) norm2 += f.value * f.value;
        if (norm2 <= 0.0) continue;
        const double inv = 1.0 / std::sqrt(norm2);
        for (Feature& f : ex.features)
            if (f.index != kBiasIndex) f.value *= inv;
    }
}

}  // namespace attn
