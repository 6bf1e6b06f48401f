#pragma once

#include <string_view>

#include "idrr/matrix.hpp"

namespace idrr {

enum class LossKind { CrossEntropy, Mae, Mse, Huber };
LossKind parse_loss_kind(std::string_view name);  // ce | mae | mse | huber
const char* loss_name(LossKind kind);

// Loss over a batch (rows = N instances, cols = C senses) and its gradient with respect to
// the first argument.
struct LossValue {
    double value = 0.0;
    Matrix grad;
};

// -(1/N) sum_n sum_c log(softmax(scores_n)_c) * y_nc, natural log. `scores` are raw.
LossValue cross_entropy_loss(const Matrix& scores, const Matrix& targets);
// (1/(N*C)) sum |p - y|
LossValue mae_loss(const Matrix& predicted, const Matrix& targets);
// (1/(N*C)) sum (p - y)^2
LossValue mse_loss(const Matrix& predicted, const Matrix& targets);
// sum of d^2/(2NC) where |d| < 1, else (2|d| - 1)/(2NC), with d = p - y
LossValue huber_loss(const Matrix& predicted, const Matrix& targets);

// One head's loss as used in training: cross-entropy consumes raw scores, the other kinds
// compare softmax(scores) with the targets. The gradient is always with respect to scores.
LossValue head_loss(LossKind kind, const Matrix& scores, const Matrix& targets);

// Unweighted sum of the three head losses.
double total_loss(double level1, double level2, double level3);

}  // namespace idrr
