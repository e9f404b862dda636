#pragma once

#include <string>

namespace provq {

enum class SchedulerKind { kCosine, kHard };

const char* to_string(SchedulerKind kind);
SchedulerKind scheduler_from_string(const std::string& text);

// Curriculum state: warmup horizon, transition horizon, initial coupling
// strength lambda and commitment weight beta. Steps are optimizer steps.
struct Schedule {
  long t_warm = 100;
  long t_trans = 150;
  double lambda = 0.5;
  double beta = 0.25;
  SchedulerKind scheduler = SchedulerKind::kCosine;

  void validate() const;
};

enum class StageTag { kWarmup, kTransition, kHard };

const char* to_string(StageTag tag);
StageTag stage_from_string(const std::string& text);

struct Stage {
  StageTag tag = StageTag::kWarmup;
  long step_in_stage = 0;
};

// Warmup for step < t_warm, Transition until t_warm + t_trans, Hard after.
Stage stage_of(long step, const Schedule& sched);

// Annealing coefficient at transition step t. Cosine: (1 + cos(pi t/T))/2
// until T_trans, then 0. Hard: 1 until T_trans, then 0.
double alpha_at(long step_in_transition, const Schedule& sched);

// Adaptive quantization-loss weight: lambda + (1 - lambda) * (1 - alpha).
double omega_at(double alpha, double lambda);

}  // namespace provq
