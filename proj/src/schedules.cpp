#include "eekd/schedules.hpp"

#include "eekd/tensor.hpp"

#include <cmath>
#include <numbers>

namespace eekd {

std::string_view to_string(ScheduleKind kind) {
  return kind == ScheduleKind::kCosine ? "cosine" : "cyclic-cosine";
}

ScheduleKind schedule_kind_from_string(std::string_view name) {
  if (name == "cosine") return ScheduleKind::kCosine;
  if (name == "cyclic-cosine") return ScheduleKind::kCyclicCosine;
  throw ConfigError("unknown schedule kind '" + std::string(name) +
                    "' (expected cosine or cyclic-cosine)");
}

ScheduleSpec ScheduleSpec::cosine(double eta0, int total_epochs) {
  ScheduleSpec s{ScheduleKind::kCosine, eta0, total_epochs, 0};
  s.validate();
  return s;
}

ScheduleSpec ScheduleSpec::cyclic(double eta0, int total_epochs, int cycle_length) {
  ScheduleSpec s{ScheduleKind::kCyclicCosine, eta0, total_epochs, cycle_length};
  s.validate();
  return s;
}

void ScheduleSpec::validate() const {
  if (!(eta0 > 0.0)) throw ConfigError("schedule: eta0 must be > 0");
  if (total_epochs <= 0) throw ConfigError("schedule: total_epochs must be positive");
  if (kind == ScheduleKind::kCyclicCosine) {
    if (cycle_length <= 0) throw ConfigError("schedule: cycle_length must be positive");
    if (total_epochs % cycle_length != 0)
      throw ConfigError("schedule: cycle_length " + std::to_string(cycle_length) +
                        " does not divide total_epochs " + std::to_string(total_epochs));
  }
}

double lr_at(const ScheduleSpec& spec, int epoch) {
  if (epoch < 0 || epoch >= spec.total_epochs)
    throw RangeError("lr_at: epoch " + std::to_string(epoch) + " outside [0, " +
                     std::to_string(spec.total_epochs) + ")");
  double phase = 0.0;
  if (spec.kind == ScheduleKind::kCosine) {
    phase = static_cast<double>(epoch) / spec.total_epochs;
  } else {
    phase = static_cast<double>(epoch % spec.cycle_length) / spec.cycle_length;
  }
  return spec.eta0 / 2.0 * (1.0 + std::cos(std::numbers::pi * phase));
}

}  // namespace eekd
