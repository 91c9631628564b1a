#include "mrlop/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace mrlop {

int evaluator_threads() {
    if (const char* env = std::getenv("MRLOP_THREADS")) {
        try {
            int n = std::stoi(env);
            if (n >= 1) return std::min(n, 64);
        } catch (const std::exception&) {
            // fall through to hardware default on junk values
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min<unsigned>(hw, 64));
}

void parallel_for(std::size_t n, bool parallel, const std::function<void(std::size_t)>& fn) {
    const int threads = parallel ? evaluator_threads() : 1;
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    };
    std::vector<std::thread> pool;
    const int spawn = std::min<std::size_t>(threads - 1, n - 1);
    pool.reserve(spawn);
    for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

}  // namespace mrlop
