#include "reachset/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace reachset {

namespace {
std::atomic<int> g_override{0};
}

int worker_count() {
    if (int o = g_override.load(); o > 0) return o;
    if (const char* env = std::getenv("REACHSET_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<int>(std::min(v, 1024L));
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void set_worker_count(int n) { g_override.store(n > 0 ? n : 0); }

void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
    if (n == 0) return;
    const size_t workers = std::min<size_t>(static_cast<size_t>(worker_count()), n);
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    const size_t chunk = std::max<size_t>(1, n / (workers * 8));
    auto run = [&] {
        for (;;) {
            const size_t lo = next.fetch_add(chunk);
            if (lo >= n) return;
            const size_t hi = std::min(n, lo + chunk);
            try {
                for (size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (size_t w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace reachset
