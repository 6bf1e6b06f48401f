#pragma once
// Central finite-difference checks shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <functional>

#include "idrr/losses.hpp"
#include "idrr/matrix.hpp"
#include "idrr/model.hpp"
#include "idrr/random.hpp"

namespace idrr::testing {

inline double relative_error(double analytic, double numeric) {
    const double scale = std::max({std::fabs(analytic), std::fabs(numeric), 1e-7});
    return std::fabs(analytic - numeric) / scale;
}

// Worst relative error between `grad` and central differences of `f` around `x`.
inline double max_fd_error(Matrix x, const Matrix& grad, const std::function<double(const Matrix&)>& f,
                           double step = 1e-4) {
    double worst = 0.0;
    for (std::size_t i = 0; i < x.data().size(); ++i) {
        const double saved = x.data()[i];
        x.data()[i] = saved + step;
        const double up = f(x);
        x.data()[i] = saved - step;
        const double down = f(x);
        x.data()[i] = saved;
        worst = std::max(worst, relative_error(grad.data()[i], (up - down) / (2.0 * step)));
    }
    return worst;
}

inline Matrix random_scores(Rng& rng, std::size_t rows, std::size_t cols, double scale = 1.5) {
    Matrix m(rows, cols);
    for (double& v : m.data()) v = scale * rng.normal();
    return m;
}

inline Matrix random_targets(Rng& rng, std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        double total = 0.0;
        for (std::size_t c = 0; c < cols; ++c) total += (m(r, c) = rng.unit() + 0.05);
        for (std::size_t c = 0; c < cols; ++c) m(r, c) /= total;
    }
    return m;
}

// Gradient of head_loss with respect to the raw scores.
inline double head_loss_fd_error(LossKind kind, Rng& rng, std::size_t rows = 3, std::size_t cols = 5) {
    const Matrix scores = random_scores(rng, rows, cols);
    const Matrix targets = random_targets(rng, rows, cols);
    const LossValue lv = head_loss(kind, scores, targets);
    return max_fd_error(scores, lv.grad, [&](const Matrix& s) { return head_loss(kind, s, targets).value; });
}

// Gradient of the summed three-head loss with respect to every model parameter (dropout off).
inline double model_fd_error(LossKind kind, MultiTaskModel& model, const Matrix& embeddings,
                             const std::array<Matrix, 3>& targets) {
    auto total = [&](const MultiTaskModel& m) {
        const HeadOutputs out = m.forward(embeddings, Mode::Eval);
        double sum = 0.0;
        for (std::size_t h = 0; h < 3; ++h) sum += head_loss(kind, out.scores[h], targets[h]).value;
        return sum;
    };
    ForwardCache cache;
    const HeadOutputs out = model.forward(embeddings, Mode::Eval, nullptr, &cache);
    std::array<Matrix, 3> grads;
    for (std::size_t h = 0; h < 3; ++h) grads[h] = head_loss(kind, out.scores[h], targets[h]).grad;
    const Parameters analytic = model.backward(cache, grads);
    double worst = 0.0;
    for (std::size_t k = 0; k < analytic.tensors.size(); ++k) {
        Matrix& tensor = model.parameters().tensors[k];
        for (std::size_t i = 0; i < tensor.data().size(); ++i) {
            const double saved = tensor.data()[i];
            tensor.data()[i] = saved + 1e-4;
            const double up = total(model);
            tensor.data()[i] = saved - 1e-4;
            const double down = total(model);
            tensor.data()[i] = saved;
            worst = std::max(worst, relative_error(analytic.tensors[k].data()[i], (up - down) / 2e-4));
        }
    }
    return worst;
}

}  // namespace idrr::testing
