#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace resil {

using SetFamily = std::vector<std::vector<int>>;

struct HittingSetStats {
    std::size_t nodes = 0;
    std::size_t decision_solves = 0;
};

// Minimum hitting set by branch and bound. Elements are 0..n-1; the order of
// element ids defines the tie-break: among optimal solutions the one whose
// sorted id sequence is lexicographically least is returned.
// Returns nullopt if some set is empty.
std::optional<std::vector<int>> min_hitting_set(std::size_t n, const SetFamily& sets,
                                                HittingSetStats* stats = nullptr);

// Size of a minimum hitting set, or nullopt if some set is empty.
std::optional<int> min_hitting_set_size(const SetFamily& sets, HittingSetStats* stats = nullptr);

// Is there a hitting set of size <= budget that contains `include` and avoids `exclude`?
// On success the witness solution is written to *out.
bool hitting_set_within(std::size_t n, const SetFamily& sets, const std::vector<int>& include,
                        const std::vector<int>& exclude, int budget, std::vector<int>* out,
                        HittingSetStats* stats = nullptr);

}  // namespace resil
