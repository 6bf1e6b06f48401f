#include "idrr/losses.hpp"

#include <cmath>
#include <string>

#include "idrr/distribution.hpp"
#include "idrr/errors.hpp"
#include "idrr/model.hpp"

namespace idrr {

LossKind parse_loss_kind(std::string_view name) {
    if (name == "ce") return LossKind::CrossEntropy;
    if (name == "mae") return LossKind::Mae;
    if (name == "mse") return LossKind::Mse;
    if (name == "huber") return LossKind::Huber;
    throw ConfigError("unknown loss '" + std::string(name) + "' (choices: ce, mae, mse, huber)");
}

const char* loss_name(LossKind kind) {
    switch (kind) {
        case LossKind::CrossEntropy: return "ce";
        case LossKind::Mae: return "mae";
        case LossKind::Mse: return "mse";
        case LossKind::Huber: return "huber";
    }
    return "?";
}

namespace {

void check_inputs(const Matrix& predicted, const Matrix& targets) {
    if (!predicted.same_shape(targets)) {
        throw ShapeError("prediction shape " + std::to_string(predicted.rows()) + "x" + std::to_string(predicted.cols()) +
                         " does not match target shape " + std::to_string(targets.rows()) + "x" +
                         std::to_string(targets.cols()));
    }
    if (predicted.rows() == 0 || predicted.cols() == 0) throw ShapeError("empty loss input");
    for (double v : predicted.data()) {
        if (!std::isfinite(v)) throw NumericError("non-finite prediction");
    }
    for (std::size_t r = 0; r < targets.rows(); ++r) validate_distribution(targets.row(r));
}

template <typename Element>
LossValue elementwise(const Matrix& predicted, const Matrix& targets, Element element) {
    check_inputs(predicted, targets);
    const double nc = static_cast<double>(predicted.rows() * predicted.cols());
    LossValue out{0.0, Matrix(predicted.rows(), predicted.cols())};
    for (std::size_t i = 0; i < predicted.data().size(); ++i) {
        const double delta = predicted.data()[i] - targets.data()[i];
        const auto [value, slope] = element(delta);
        out.value += value / nc;
        out.grad.data()[i] = slope / nc;
    }
    return out;
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

LossValue cross_entropy_loss(const Matrix& scores, const Matrix& targets) {
    check_inputs(scores, targets);
    const double n = static_cast<double>(scores.rows());
    LossValue out{0.0, Matrix(scores.rows(), scores.cols())};
    for (std::size_t r = 0; r < scores.rows(); ++r) {
        const auto s = scores.row(r);
        double max = s[0];
        for (double v : s) max = std::max(max, v);
        double z = 0.0;
        for (double v : s) z += std::exp(v - max);
        const double log_z = max + std::log(z);
        double target_mass = 0.0;
        for (std::size_t c = 0; c < s.size(); ++c) {
            const double y = targets(r, c);
            target_mass += y;
            if (y != 0.0) out.value -= (s[c] - log_z) * y / n;
        }
        for (std::size_t c = 0; c < s.size(); ++c) {
            out.grad(r, c) = (std::exp(s[c] - log_z) * target_mass - targets(r, c)) / n;
        }
    }
    return out;
}

LossValue mae_loss(const Matrix& predicted, const Matrix& targets) {
    return elementwise(predicted, targets, [](double d) { return std::pair{std::abs(d), sign(d)}; });
}

LossValue mse_loss(const Matrix& predicted, const Matrix& targets) {
    return elementwise(predicted, targets, [](double d) { return std::pair{d * d, 2.0 * d}; });
}

LossValue huber_loss(const Matrix& predicted, const Matrix& targets) {
    return elementwise(predicted, targets, [](double d) {
        if (std::abs(d) < 1.0) return std::pair{d * d / 2.0, d};
        return std::pair{(2.0 * std::abs(d) - 1.0) / 2.0, sign(d)};
    });
}

LossValue head_loss(LossKind kind, const Matrix& scores, const Matrix& targets) {
    if (kind == LossKind::CrossEntropy) return cross_entropy_loss(scores, targets);
    const Matrix probs = to_distribution(scores);
    LossValue on_probs;
    switch (kind) {
        case LossKind::Mae: on_probs = mae_loss(probs, targets); break;
        case LossKind::Mse: on_probs = mse_loss(probs, targets); break;
        default: on_probs = huber_loss(probs, targets); break;
    }
    // Chain through the softmax: ds_j = p_j * (g_j - sum_i g_i p_i).
    LossValue out{on_probs.value, Matrix(scores.rows(), scores.cols())};
    for (std::size_t r = 0; r < scores.rows(); ++r) {
        double inner = 0.0;
        for (std::size_t c = 0; c < scores.cols(); ++c) inner += on_probs.grad(r, c) * probs(r, c);
        for (std::size_t c = 0; c < scores.cols(); ++c) out.grad(r, c) = probs(r, c) * (on_probs.grad(r, c) - inner);
    }
    return out;
}

double total_loss(double level1, double level2, double level3) {
    if (!std::isfinite(level1) || !std::isfinite(level2) || !std::isfinite(level3)) {
        throw NumericError("non-finite head loss");
    }
    return level1 + level2 + level3;
}

}  // namespace idrr
