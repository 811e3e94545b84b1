// Copyright 2026 The matchaudit Authors
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

// Umbrella header: the whole matchaudit library.
//
// matchaudit decides, exactly and with machine-checkable witnesses, whether a
// (possibly randomized) two-sided matching mechanism is ex-post, interim, or
// ex-ante stable against coalitions that compare rank lotteries by strict
// first-order stochastic dominance. All arithmetic is exact rational (GMP);
// blocking is decided by an exact simplex over deviation lotteries.
//
// json_io.hpp additionally needs the vendored nlohmann json.hpp on the
// include path and is therefore not pulled in here.

#include "matchaudit/errors.hpp"     // IWYU pragma: export
#include "matchaudit/rational.hpp"   // IWYU pragma: export
#include "matchaudit/market.hpp"     // IWYU pragma: export
#include "matchaudit/profile.hpp"    // IWYU pragma: export
#include "matchaudit/matching.hpp"   // IWYU pragma: export
#include "matchaudit/prior.hpp"      // IWYU pragma: export
#include "matchaudit/dominance.hpp"  // IWYU pragma: export
#include "matchaudit/lp.hpp"         // IWYU pragma: export
#include "matchaudit/mechanism.hpp"  // IWYU pragma: export
#include "matchaudit/witness.hpp"    // IWYU pragma: export
#include "matchaudit/stability.hpp"  // IWYU pragma: export
#include "matchaudit/stability_search.hpp"  // IWYU pragma: export
#include "matchaudit/cases.hpp"      // IWYU pragma: export
