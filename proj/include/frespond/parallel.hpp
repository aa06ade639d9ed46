// SPDX-License-Identifier: Apache-2.0
//
// frespond: body-shadowing diffraction and passive detection toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace frespond {

/// 0 means "all hardware threads".
inline unsigned resolve_threads(unsigned requested)
{
    if (requested != 0)
        return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Work items are
/// claimed dynamically, so fn must write only to slots owned by i. If any
/// item throws, the exception of the smallest failing index is rethrown.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn)
{
    threads = resolve_threads(threads);
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    std::size_t first_error_index = n;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n)
                return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(err_mutex);
                if (i < first_error_index) {
                    first_error_index = i;
                    first_error = std::current_exception();
                }
            }
        }
    };

    const unsigned count = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    {
        std::vector<std::jthread> pool;
        pool.reserve(count);
        for (unsigned t = 0; t < count; ++t)
            pool.emplace_back(worker);
    }
    if (first_error)
        std::rethrow_exception(first_error);
}

} // namespace frespond
