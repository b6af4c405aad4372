#include "crio/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace crio {

int worker_count() {
    if (const char* env = std::getenv("CRIO_NUM_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) return static_cast<int>(v > 256 ? 256 : v);
        return 1;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<double> parallel_map(int n, const std::function<double(int)>& fn) {
    std::vector<double> out(static_cast<size_t>(n > 0 ? n : 0), 0.0);
    if (n <= 0) return out;
    const int workers = std::min(worker_count(), n);
    if (workers == 1) {
        for (int i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return out;
}

namespace {

double sum_range(const std::vector<double>& xs, size_t lo, size_t hi) {
    if (hi - lo == 1) return xs[lo];
    if (hi - lo == 2) return xs[lo] + xs[lo + 1];
    const size_t mid = lo + (hi - lo) / 2;
    return sum_range(xs, lo, mid) + sum_range(xs, mid, hi);
}

}  // namespace

double pairwise_sum(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    return sum_range(xs, 0, xs.size());
}

}  // namespace crio
