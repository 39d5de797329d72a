#pragma once

#include <vector>

#include "freemarkov/causal.hpp"

namespace testing {

using namespace freemarkov;

/// The members of {0..n-1} selected by a bit mask, ascending.
std::vector<int> subset(int n, unsigned mask);

/// Quasi-terminal nodes read straight off maximal paths: every path leaving
/// x dies at a terminal node (for a duplicate x: through one of its prongs).
std::vector<int> quasi_terminal_by_paths(const Diagram& d);
bool minimal_by_paths(const Diagram& d);

/// [T || S] for a restriction of height at most one, in closed form.
Diagram height_one_form(const CausalModel& m, const std::vector<int>& s, const std::vector<int>& t);

}  // namespace testing
