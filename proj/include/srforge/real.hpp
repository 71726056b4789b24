// Copyright 2026 The srforge Authors. All Rights Reserved.
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

// Scalar type of the neural-network core. The library is built twice: with
// 32-bit floats for normal use, and with SRFORGE_REAL_F64 defined for
// gradient verification. Everything precision-dependent lives in the inline
// namespace named by SRFORGE_PRECISION so both builds can link into one
// program.

#ifdef SRFORGE_REAL_F64
#define SRFORGE_PRECISION f64
#else
#define SRFORGE_PRECISION f32
#endif

namespace srforge {
inline namespace SRFORGE_PRECISION {

#ifdef SRFORGE_REAL_F64
using real = double;
#else
using real = float;
#endif

}  // namespace SRFORGE_PRECISION
}  // namespace srforge
