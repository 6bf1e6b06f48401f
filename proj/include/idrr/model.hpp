#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "idrr/distribution.hpp"
#include "idrr/encoder.hpp"
#include "idrr/matrix.hpp"
#include "idrr/random.hpp"
#include "idrr/sense_hierarchy.hpp"

namespace idrr {

struct ModelConfig {
    EncoderSpec encoder;
    std::size_t trunk_width = 0;  // 0: the encoder width
    double dropout_rate = 0.1;
    std::uint64_t seed = 0;

    bool operator==(const ModelConfig&) const = default;
};

// Raw per-level scores for a batch: rows are instances, columns the level's senses.
struct HeadOutputs {
    std::array<Matrix, 3> scores;

    const Matrix& at(Level level) const { return scores[level_number(level) - 1]; }
    std::size_t batch_size() const { return scores[0].rows(); }
};

enum class Mode { Train, Eval };

// Trainable tensors in a fixed order: trunk weight, trunk bias, then weight and bias per head.
struct Parameters {
    std::vector<Matrix> tensors;

    Matrix& trunk_weight() { return tensors[0]; }
    const Matrix& trunk_weight() const { return tensors[0]; }
    Matrix& trunk_bias() { return tensors[1]; }
    const Matrix& trunk_bias() const { return tensors[1]; }
    Matrix& head_weight(std::size_t h) { return tensors[2 + 2 * h]; }
    const Matrix& head_weight(std::size_t h) const { return tensors[2 + 2 * h]; }
    Matrix& head_bias(std::size_t h) { return tensors[3 + 2 * h]; }
    const Matrix& head_bias(std::size_t h) const { return tensors[3 + 2 * h]; }

    Parameters zeros_like() const;
    bool operator==(const Parameters&) const = default;
};

// Activations kept from a forward pass for the backward pass.
struct ForwardCache {
    Matrix input;
    Matrix trunk;    // after linear, before dropout
    Matrix dropped;  // after dropout
    Matrix mask;     // dropout scale per unit (0 or 1/(1-p)); all ones in eval mode
};

// Encoder -> linear trunk -> dropout -> three linear heads (one per sense level).
// The encoder is frozen; only trunk and heads are trained.
class MultiTaskModel {
public:
    MultiTaskModel(const SenseHierarchy& hierarchy, const ModelConfig& config);
    // Adopts existing parameters; throws ShapeError if they disagree with the hierarchy.
    MultiTaskModel(const SenseHierarchy& hierarchy, const ModelConfig& config, Parameters parameters);

    const ModelConfig& config() const { return config_; }
    const Encoder& encoder() const { return *encoder_; }
    std::size_t input_width() const { return encoder_->width(); }
    std::size_t trunk_width() const { return trunk_width_; }
    std::size_t head_size(std::size_t h) const { return head_sizes_[h]; }

    Parameters& parameters() { return params_; }
    const Parameters& parameters() const { return params_; }

    std::vector<double> embed(std::string_view arg1, std::string_view arg2) const;

    // `dropout_rng` is required in train mode when dropout_rate > 0.
    HeadOutputs forward(const Matrix& embeddings, Mode mode, Rng* dropout_rng = nullptr,
                        ForwardCache* cache = nullptr) const;

    // Gradients of a scalar loss given its gradients with respect to each head's scores.
    Parameters backward(const ForwardCache& cache, const std::array<Matrix, 3>& score_grads) const;

private:
    void check_shapes() const;

    ModelConfig config_;
    std::shared_ptr<const Encoder> encoder_;
    std::size_t trunk_width_ = 0;
    std::array<std::size_t, 3> head_sizes_{};
    Parameters params_;
};

// Softmax of raw scores; throws NumericError on non-finite input.
std::vector<double> to_distribution(std::span<const double> scores);
LabelDistribution to_distribution(Level level, std::span<const double> scores);
Matrix to_distribution(const Matrix& scores);

// Single-label output: the sense with the highest probability (lowest index on ties).
std::size_t pool_single_label(const LabelDistribution& dist);

// ---- checkpoints ----

struct CheckpointInfo {
    std::string hierarchy_hash;
    std::string run_config_hash;
};

// Writes params.txt (hex floats), model.json, hierarchy.tsv and run_config.conf into `dir`.
void save_checkpoint(const std::string& dir, const MultiTaskModel& model, const SenseHierarchy& hierarchy,
                     const std::string& run_config_text);

// Verifies the stored hierarchy and run-config hashes before rebuilding the model.
MultiTaskModel load_checkpoint(const std::string& dir, const SenseHierarchy& hierarchy,
                               CheckpointInfo* info = nullptr);

}  // namespace idrr
