// Copyright 2026 The QFE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <new>
#include <vector>

namespace qfe {

/// Allocator returning 64-byte aligned storage. Vectorized kernels pick their
/// loop peeling from the data alignment, so buffers that feed them must be
/// aligned identically on every run for results to be bit-reproducible.
template <class T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::align_val_t kAlignment{64};

    AlignedAllocator() = default;
    template <class U>
    AlignedAllocator(const AlignedAllocator<U> &) {}

    T *allocate(std::size_t n) { return static_cast<T *>(::operator new(n * sizeof(T), kAlignment)); }
    void deallocate(T *p, std::size_t) { ::operator delete(p, kAlignment); }

    template <class U>
    bool operator==(const AlignedAllocator<U> &) const {
        return true;
    }
};

using AlignedVector = std::vector<double, AlignedAllocator<double>>;

}  // namespace qfe
