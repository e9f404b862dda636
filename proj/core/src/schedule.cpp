#include "provq/schedule.hpp"

#include <cmath>
#include <numbers>

#include "provq/errors.hpp"

namespace provq {

const char* to_string(SchedulerKind kind) {
  return kind == SchedulerKind::kCosine ? "cosine" : "hard";
}

SchedulerKind scheduler_from_string(const std::string& text) {
  if (text == "cosine") return SchedulerKind::kCosine;
  if (text == "hard") return SchedulerKind::kHard;
  throw ConfigError("schedule: unknown scheduler '" + text +
                    "' (expected cosine or hard)");
}

const char* to_string(StageTag tag) {
  switch (tag) {
    case StageTag::kWarmup:
      return "warmup";
    case StageTag::kTransition:
      return "transition";
    default:
      return "hard";
  }
}

StageTag stage_from_string(const std::string& text) {
  if (text == "warmup") return StageTag::kWarmup;
  if (text == "transition") return StageTag::kTransition;
  if (text == "hard") return StageTag::kHard;
  throw ConfigError("schedule: unknown stage '" + text + "'");
}

void Schedule::validate() const {
  // t_trans = 0 is the degenerate vanilla-VQ case (alpha == 0 from step 0).
  if (t_warm < 0) throw ConfigError("schedule: t_warm must be >= 0");
  if (t_trans < 0) throw ConfigError("schedule: t_trans must be >= 0");
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ConfigError("schedule: lambda must lie in [0, 1]");
  }
  if (!(beta >= 0.0)) throw ConfigError("schedule: beta must be >= 0");
}

Stage stage_of(long step, const Schedule& sched) {
  Stage stage;
  if (step < sched.t_warm) {
    stage.tag = StageTag::kWarmup;
    stage.step_in_stage = step;
  } else if (step < sched.t_warm + sched.t_trans) {
    stage.tag = StageTag::kTransition;
    stage.step_in_stage = step - sched.t_warm;
  } else {
    stage.tag = StageTag::kHard;
    stage.step_in_stage = step - sched.t_warm - sched.t_trans;
  }
  return stage;
}

double alpha_at(long step_in_transition, const Schedule& sched) {
  if (step_in_transition >= sched.t_trans) return 0.0;
  if (sched.scheduler == SchedulerKind::kHard) return 1.0;
  const double ratio = static_cast<double>(step_in_transition) /
                       static_cast<double>(sched.t_trans);
  return 0.5 * (1.0 + std::cos(std::numbers::pi * ratio));
}

double omega_at(double alpha, double lambda) {
  return lambda + (1.0 - lambda) * (1.0 - alpha);
}

}  // namespace provq
