#include "idrr/encoder.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "idrr/errors.hpp"
#include "idrr/random.hpp"
#include "idrr/sense_hierarchy.hpp"

namespace idrr {

Pooling parse_pooling(std::string_view name) {
    if (name == "first-token" || name == "first_token" || name == "cls") return Pooling::FirstToken;
    if (name == "mean") return Pooling::Mean;
    throw ConfigError("unknown pooling '" + std::string(name) + "' (expected first-token or mean)");
}

const char* pooling_name(Pooling pooling) { return pooling == Pooling::Mean ? "mean" : "first-token"; }

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) tokens.push_back(std::move(current));
        current.clear();
    };
    for (unsigned char c : text) {
        if (std::isalnum(c) || c >= 0x80) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else {
            flush();
            if (!std::isspace(c)) tokens.emplace_back(1, static_cast<char>(c));
        }
    }
    flush();
    return tokens;
}

PairInput make_pair_input(std::string_view arg1, std::string_view arg2, std::size_t max_tokens) {
    if (max_tokens < 16) throw ConfigError("max_tokens must be at least 16");
    auto a = tokenize(arg1);
    auto b = tokenize(arg2);
    if (a.empty() || b.empty()) throw InputError("both discourse arguments must contain text");
    const std::size_t budget = max_tokens - 3;
    if (a.size() + b.size() > budget) {
        const double share = static_cast<double>(a.size()) / static_cast<double>(a.size() + b.size());
        std::size_t keep_a = static_cast<std::size_t>(std::floor(share * static_cast<double>(budget)));
        keep_a = std::clamp<std::size_t>(keep_a, 1, budget - 1);
        const std::size_t keep_b = std::min(b.size(), budget - keep_a);
        a.resize(std::min(a.size(), keep_a));
        b.resize(keep_b);
    }
    PairInput in;
    in.tokens.push_back("[CLS]");
    in.segments.push_back(0);
    for (auto& t : a) {
        in.tokens.push_back(std::move(t));
        in.segments.push_back(0);
    }
    in.tokens.push_back("[SEP]");
    in.segments.push_back(0);
    for (auto& t : b) {
        in.tokens.push_back(std::move(t));
        in.segments.push_back(1);
    }
    in.tokens.push_back("[SEP]");
    in.segments.push_back(1);
    return in;
}

namespace {

class HashEncoder final : public Encoder {
public:
    HashEncoder(EncoderSpec spec, std::size_t width) : spec_(std::move(spec)), width_(width) {}

    const EncoderSpec& spec() const override { return spec_; }
    std::size_t width() const override { return width_; }

    std::vector<double> encode(std::string_view arg1, std::string_view arg2) const override {
        const PairInput in = make_pair_input(arg1, arg2, spec_.max_tokens);
        const std::size_t n = in.tokens.size();
        std::vector<std::vector<double>> emb;
        emb.reserve(n);
        std::vector<double> context(width_, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            emb.push_back(token_embedding(in.tokens[i], in.segments[i]));
            for (std::size_t d = 0; d < width_; ++d) context[d] += emb.back()[d];
        }
        for (double& c : context) c /= static_cast<double>(n);

        std::vector<double> out(width_, 0.0);
        if (spec_.pooling == Pooling::FirstToken) {
            for (std::size_t d = 0; d < width_; ++d) out[d] = std::tanh(emb[0][d] + context[d]);
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t d = 0; d < width_; ++d) out[d] += std::tanh(emb[i][d] + context[d]);
            }
            for (double& v : out) v /= static_cast<double>(n);
        }
        return out;
    }

private:
    std::vector<double> token_embedding(const std::string& token, int segment) const {
        Rng rng(mix_seed(fnv1a64(token), static_cast<std::uint64_t>(segment)));
        std::vector<double> e(width_);
        for (double& v : e) v = rng.normal();
        return e;
    }

    EncoderSpec spec_;
    std::size_t width_;
};

}  // namespace

std::unique_ptr<Encoder> make_encoder(const EncoderSpec& spec) {
    if (spec.max_tokens < 16) throw ConfigError("max_tokens must be at least 16");
    constexpr std::string_view prefix = "hash-encoder-";
    const std::string id = to_lower(spec.model_id);
    if (id.starts_with(prefix)) {
        std::size_t width = 0;
        const char* begin = id.data() + prefix.size();
        const char* end = id.data() + id.size();
        auto [ptr, ec] = std::from_chars(begin, end, width);
        if (ec == std::errc() && ptr == end && width >= 4 && width <= 4096) {
            return std::make_unique<HashEncoder>(spec, width);
        }
    }
    throw ProviderError("encoder '" + spec.model_id +
                        "' is not available from the built-in provider (supported: hash-encoder-<width>)");
}

}  // namespace idrr
