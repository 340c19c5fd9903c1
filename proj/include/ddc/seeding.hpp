// Copyright 2026 The ddc Authors.
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

#include <cstdint>
#include <string_view>

namespace ddc {

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed for one sample of one experiment arm.
///
/// The value is mix64 chained over the master seed, the sample index and the
/// 64-bit FNV-1a hash of \p tag, so it depends only on these three inputs.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::string_view tag);

}  // namespace ddc
