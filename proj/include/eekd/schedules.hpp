#ifndef EEKD_SCHEDULES_HPP
#define EEKD_SCHEDULES_HPP

#include <string>
#include <string_view>

namespace eekd {

enum class ScheduleKind { kCosine, kCyclicCosine };

std::string_view to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(std::string_view name);

/**
 * Epoch-granular learning-rate schedule.
 *
 *   cosine:         eta(e) = eta0 / 2 * (1 + cos(pi * e / total_epochs))
 *   cyclic-cosine:  eta(e) = eta0 / 2 * (1 + cos(pi * (e mod cycle) / cycle))
 */
struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::kCosine;
  double eta0 = 0.1;
  int total_epochs = 1;
  int cycle_length = 0;  // cyclic only; must divide total_epochs

  static ScheduleSpec cosine(double eta0, int total_epochs);
  static ScheduleSpec cyclic(double eta0, int total_epochs, int cycle_length);

  void validate() const;
};

/// Learning rate for a 0-based epoch in [0, total_epochs); RangeError otherwise.
double lr_at(const ScheduleSpec& spec, int epoch);

}  // namespace eekd

#endif  // EEKD_SCHEDULES_HPP
