#include <cmath>

#include "pfq/error.hpp"
#include "pfq/schedule.hpp"

namespace pfq {

double suzuki_u(int k) { return 1.0 / (4.0 - std::pow(4.0, 1.0 / (2.0 * k - 1.0))); }

namespace {

// Half steps forward then backward. Adjacent equal entries are not merged, so the
// entry count is always N_stage·slots.
std::vector<ScheduleEntry> second_order(std::size_t slots, double scale) {
  std::vector<ScheduleEntry> out;
  out.reserve(2 * slots);
  for (std::size_t l = 0; l < slots; ++l) out.push_back({l, 0.5 * scale});
  for (std::size_t l = slots; l-- > 0;) out.push_back({l, 0.5 * scale});
  return out;
}

std::vector<ScheduleEntry> recurse(int k, std::size_t slots, double scale) {
  if (k == 1) return second_order(slots, scale);
  const double u = suzuki_u(k);
  const auto outer = recurse(k - 1, slots, u * scale);
  const auto middle = recurse(k - 1, slots, (1.0 - 4.0 * u) * scale);
  std::vector<ScheduleEntry> out;
  out.reserve(4 * outer.size() + middle.size());
  for (int i = 0; i < 2; ++i) out.insert(out.end(), outer.begin(), outer.end());
  out.insert(out.end(), middle.begin(), middle.end());
  for (int i = 0; i < 2; ++i) out.insert(out.end(), outer.begin(), outer.end());
  return out;
}

}  // namespace

ProductFormulaSchedule suzuki_schedule(int order, std::size_t n_terms, bool include_randomized_slot) {
  if (order < 1 || (order > 1 && order % 2 != 0)) throw ConfigError("product formula order must be 1 or even, got " + std::to_string(order));
  ProductFormulaSchedule s;
  s.order = order;
  s.n_slots = n_terms + (include_randomized_slot ? 1 : 0);
  if (order == 1) {
    s.n_stages = 1;
    for (std::size_t l = 0; l < s.n_slots; ++l) s.entries.push_back({l, 1.0});
    return s;
  }
  const int k = order / 2;
  s.n_stages = 2;
  for (int i = 1; i < k; ++i) s.n_stages *= 5;
  s.entries = recurse(k, s.n_slots, 1.0);
  return s;
}

std::vector<double> slot_fraction_sums(const ProductFormulaSchedule& s) {
  std::vector<double> sums(s.n_slots, 0.0);
  for (const auto& e : s.entries) sums[e.term] += e.fraction;
  return sums;
}

}  // namespace pfq
