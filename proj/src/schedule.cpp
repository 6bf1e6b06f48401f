#include "idrr/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "idrr/errors.hpp"

namespace idrr {

ScheduleKind parse_schedule_kind(std::string_view name) {
    if (name == "none" || name == "constant") return ScheduleKind::None;
    if (name == "linear") return ScheduleKind::Linear;
    if (name == "cosine_annealing" || name == "cosine") return ScheduleKind::CosineAnnealing;
    throw ConfigError("unknown schedule '" + std::string(name) + "' (choices: none, linear, cosine_annealing)");
}

const char* schedule_name(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::None: return "none";
        case ScheduleKind::Linear: return "linear";
        case ScheduleKind::CosineAnnealing: return "cosine_annealing";
    }
    return "?";
}

Schedule make_schedule(ScheduleKind kind, double base_lr, int epochs, const ScheduleOptions& options) {
    if (!(base_lr > 0.0)) throw ConfigError("base learning rate must be positive");
    if (epochs < 1) throw ConfigError("epochs must be at least 1");
    switch (kind) {
        case ScheduleKind::None:
            return [base_lr](double) { return base_lr; };
        case ScheduleKind::Linear: {
            const double span = options.linear_decay_epochs;
            if (!(span > 0.0)) throw ConfigError("linear_decay_epochs must be positive");
            return [base_lr, span](double t) { return base_lr * (1.0 - 0.5 * std::clamp(t, 0.0, span) / span); };
        }
        case ScheduleKind::CosineAnnealing: {
            const double period = static_cast<double>(epochs) / 2.0;
            if (options.cosine_restarts) {
                return [base_lr, period](double t) {
                    const double phase = std::fmod(std::max(t, 0.0), period) / period;
                    return base_lr * (0.75 + 0.25 * std::cos(std::numbers::pi * phase));
                };
            }
            return [base_lr, period](double t) {
                return base_lr * (0.75 + 0.25 * std::cos(2.0 * std::numbers::pi * t / period));
            };
        }
    }
    throw ConfigError("unknown schedule kind");
}

}  // namespace idrr
