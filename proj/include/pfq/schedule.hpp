#pragma once

#include <cstddef>
#include <vector>

namespace pfq {

struct ScheduleEntry {
  std::size_t term = 0;   // 0-based; the lumped randomized slot uses index n_terms
  double fraction = 0.0;  // multiple of δ
};

// Symmetric Suzuki product formula of order p (or first order for p = 1) as a flat
// left-to-right list of exponentials e^{−i fraction·δ·H_term}. Entries are applied in
// list order, so the operator is the product with the last entry leftmost.
struct ProductFormulaSchedule {
  int order = 1;
  std::size_t n_slots = 0;  // n_terms, plus one when the randomized slot is included
  std::size_t n_stages = 1;
  std::vector<ScheduleEntry> entries;
};

// u_k = 1/(4 − 4^{1/(2k−1)}).
double suzuki_u(int k);

ProductFormulaSchedule suzuki_schedule(int order, std::size_t n_terms, bool include_randomized_slot = false);

// Σ fraction per slot; 1 for every slot in a valid schedule.
std::vector<double> slot_fraction_sums(const ProductFormulaSchedule& s);

}  // namespace pfq
