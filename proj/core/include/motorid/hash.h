// Copyright 2026 The motorid Authors
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

#ifndef MOTORID_HASH_H_
#define MOTORID_HASH_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace motorid {

// 64-bit FNV-1a. Used to fingerprint configs and input files in reports;
// not a cryptographic hash.
std::uint64_t Fnv1a64(std::string_view bytes);

// Lower-case, zero-padded 16-digit hex rendering of Fnv1a64(bytes).
std::string HexDigest(std::string_view bytes);

}  // namespace motorid

#endif  // MOTORID_HASH_H_
