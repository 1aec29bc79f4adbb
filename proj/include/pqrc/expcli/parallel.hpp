// Copyright 2026 The pqrc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace pqrc::expcli {

/// out[i] = f(i) for i in [0, n) on up to `jobs` threads. Each result lands
/// at its own index, so the output does not depend on scheduling. The first
/// exception (lowest index) is rethrown after all workers finish.
template <class F>
[[nodiscard]] auto parallel_map(std::size_t n, std::size_t jobs, F &&f)
    -> std::vector<std::invoke_result_t<F &, std::size_t>> {
    using R = std::invoke_result_t<F &, std::size_t>;
    std::vector<std::optional<R>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            try {
                slots[i].emplace(f(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    for (const auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    std::vector<R> out;
    out.reserve(n);
    for (auto &s : slots) {
        out.push_back(std::move(*s));
    }
    return out;
}

} // namespace pqrc::expcli
