#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace qwalk {

// Worker count from QWALK_THREADS, falling back to the hardware concurrency.
inline unsigned thread_count() {
    if (const char* env = std::getenv("QWALK_THREADS")) {
        try {
            const long n = std::stol(env);
            if (n >= 1) return static_cast<unsigned>(n);
        } catch (const std::exception&) {
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Splits [0, n) into `chunks` contiguous ranges and calls fn(chunk, begin, end)
// for each, running at most `threads` at once. The chunk layout depends only on
// n and chunks, so results indexed by chunk are reproducible for any thread count.
template <class Fn>
void for_chunks(std::size_t n, std::size_t chunks, unsigned threads, Fn&& fn) {
    chunks = std::max<std::size_t>(1, std::min(chunks, std::max<std::size_t>(n, 1)));
    auto range = [&](std::size_t c) {
        return std::pair<std::size_t, std::size_t>{n * c / chunks, n * (c + 1) / chunks};
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(chunks)));
    if (threads == 1) {
        for (std::size_t c = 0; c < chunks; ++c) {
            const auto [b, e] = range(c);
            fn(c, b, e);
        }
        return;
    }
    std::vector<std::exception_ptr> errors(chunks);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t c = w; c < chunks; c += threads) {
                const auto [b, e] = range(c);
                try {
                    fn(c, b, e);
                } catch (...) {
                    errors[c] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace qwalk
