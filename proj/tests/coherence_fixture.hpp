#pragma once
// Twelve level-1/level-2 predictions with known hierarchy violations (rows 2, 6 and 10),
// gold labels, and the hand-computed reports. Level-1 indices: T=0 Ci=1 Cp=2 E=3.

#include <string>
#include <vector>

namespace idrr::testing::coherence {

enum L1 : std::size_t { T = 0, Ci = 1, Cp = 2, E = 3 };
enum L2 : std::size_t { Sync = 0, Async, Cause, Cond, Purp, Conc, Contr, Sim, Conj, Equiv, Inst, LoD, Manner, Subst };

inline const std::vector<std::size_t> pred1 = {T, T, T, Ci, Ci, Ci, Ci, E, E, E, E, E};
inline const std::vector<std::size_t> pred2 = {Async, Cause, Async, Cause, Cause, Conj, Cond, Conj, Conj, Contr, Inst, LoD};
inline const std::vector<std::size_t> gold1 = {T, T, T, Ci, Ci, Ci, Cp, E, E, Cp, E, E};
inline const std::vector<std::size_t> gold2 = {Async, Async, Cause, Cause, Cause, Conj, Cond, Conj, Sim, Contr, Inst, Conc};

// Coherence cells in canonical order.
inline const std::vector<std::string> level1_cells = {"66.67", "75.00", "n/a", "80.00"};
inline const std::vector<std::string> level2_cells = {"-",     "100.00", "66.67", "100.00", "-", "n/a", "0.00",
                                                      "n/a",   "66.67",  "-",     "100.00", "-", "-",   "-"};
inline const std::vector<double> level1_percent = {200.0 / 3.0, 75.0, 0.0, 80.0};

// Per-sense F1 at level 2 against gold2; "-" marks senses absent from gold.
inline const std::vector<std::string> level2_f1_cells = {"-",     "50.00", "66.67", "100.00", "-", "0.00", "100.00",
                                                         "0.00",  "80.00", "-",     "100.00", "-", "-",    "-"};
inline constexpr double level2_weighted_f1 = 760.0 / 12.0;
inline const std::vector<std::string> level1_f1_cells = {"100.00", "85.71", "0.00", "88.89"};
inline constexpr double level1_weighted_f1 = (300.0 + 1800.0 / 7.0 + 3200.0 / 9.0) / 12.0;

}  // namespace idrr::testing::coherence
