#include "parallel.hpp"

#include <atomic>

namespace fw {

namespace {
std::atomic<int> g_threads{0};
}

int default_threads()
{
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : (int)hw;
}

void set_threads(int n) { g_threads = n; }

int threads()
{
    const int n = g_threads.load();
    return n > 0 ? n : default_threads();
}

}  // namespace fw
