#pragma once

#include <functional>
#include <string_view>

namespace idrr {

enum class ScheduleKind { None, Linear, CosineAnnealing };
ScheduleKind parse_schedule_kind(std::string_view name);  // none | linear | cosine_annealing
const char* schedule_name(ScheduleKind kind);

struct ScheduleOptions {
    // Linear decay reaches base_lr/2 after this many epochs and stays there.
    double linear_decay_epochs = 5.0;
    // Cosine annealing: hard reset to base_lr at the start of each period instead of the
    // continuous two-period cosine.
    bool cosine_restarts = false;
};

// Learning rate as a function of fractional epoch t (epoch index + fraction of its steps done).
using Schedule = std::function<double(double)>;

// none:   base_lr
// linear: base_lr * (1 - 0.5 * min(t, D) / D), D = linear_decay_epochs
// cosine: base_lr * (0.75 + 0.25 * cos(2*pi*t / P)), P = epochs / 2 (two full periods)
//         restart variant: base_lr * (0.75 + 0.25 * cos(pi * (t mod P) / P))
Schedule make_schedule(ScheduleKind kind, double base_lr, int epochs, const ScheduleOptions& options = {});

}  // namespace idrr
