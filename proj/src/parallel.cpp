#include "agp/parallel.hpp"

#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace agp {

int max_threads() {
    static const int cached = [] {
        const char* env = std::getenv("AGP_THREADS");
        if (!env) return 1;
        const int v = std::atoi(env);
        if (v < 1) return 1;
        const int hw = static_cast<int>(std::thread::hardware_concurrency());
        return hw > 0 ? std::min(v, hw) : v;
    }();
    return cached;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
    const int threads = std::min(max_threads(), n);
    if (threads <= 1 || n < 16) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }

    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int begin = t * chunk;
        const int end = std::min(n, begin + chunk);
        pool.emplace_back([&, t, begin, end] {
            try {
                for (int i = begin; i < end; ++i) fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace agp
