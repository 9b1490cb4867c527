// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace hlsim {

/// Keeps freed multi-megabyte activation buffers in the heap instead of
/// unmapping them after every batch. Call once at program start; no-op off
/// glibc.
inline void tune_allocator() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 256 * 1024 * 1024);
  mallopt(M_TRIM_THRESHOLD, 512 * 1024 * 1024);
#endif
}

}  // namespace hlsim
