#pragma once

#include <functional>

namespace beamstab {

// Worker cap for every parallel loop in the library; 0 means hardware concurrency.
void set_max_threads(int count);
int max_threads();

// Runs body(i) for i in [0, count). Each index is processed exactly once; callers
// write results by index so output never depends on the schedule.
void parallel_for(int count, const std::function<void(int)>& body);

}  // namespace beamstab
