#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace idrr {

enum class Pooling { FirstToken, Mean };
Pooling parse_pooling(std::string_view name);
const char* pooling_name(Pooling pooling);

struct EncoderSpec {
    std::string model_id = "hash-encoder-128";
    std::size_t max_tokens = 256;
    Pooling pooling = Pooling::FirstToken;

    bool operator==(const EncoderSpec&) const = default;
};

// Sentence-pair input: [CLS] arg1 [SEP] arg2 [SEP], with segment ids 0/1.
struct PairInput {
    std::vector<std::string> tokens;
    std::vector<int> segments;
};

std::vector<std::string> tokenize(std::string_view text);

// Builds the pair input. When it would exceed `max_tokens`, each argument is cut from its end,
// the budget being shared in proportion to the argument lengths.
PairInput make_pair_input(std::string_view arg1, std::string_view arg2, std::size_t max_tokens);

// Text-pair encoder producing a fixed-width embedding. Implementations are deterministic and
// safe to call concurrently.
class Encoder {
public:
    virtual ~Encoder() = default;
    virtual const EncoderSpec& spec() const = 0;
    virtual std::size_t width() const = 0;
    // Throws InputError for empty text.
    virtual std::vector<double> encode(std::string_view arg1, std::string_view arg2) const = 0;
};

// Resolves `spec.model_id`. The built-in provider serves "hash-encoder-<width>", a frozen
// hashed-embedding encoder with one self-mixing layer. Anything else is a ProviderError.
std::unique_ptr<Encoder> make_encoder(const EncoderSpec& spec);

}  // namespace idrr
