#pragma once

#include <functional>

namespace tvflow {

// Worker count: TVFLOW_THREADS if set and positive, else hardware concurrency.
int thread_count();

// Runs body(i) for i in [0, count) on up to thread_count() threads.
void parallel_for(int count, const std::function<void(int)>& body);

}  // namespace tvflow
