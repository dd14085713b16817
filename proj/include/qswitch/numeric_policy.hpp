// Copyright 2026 The qswitch-lab Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qswitch {

/**
 * Process-wide numeric tolerances and resource limits.
 *
 * `structural` bounds exact-by-construction quantities (norms, traces,
 * hermiticity); `spectral` bounds anything that goes through an eigen or
 * singular value solver. `max_dim` is the largest total Hilbert space
 * dimension a protocol or combinator may allocate.
 */
struct NumericPolicy {
    double structural = 1e-12;
    double spectral = 1e-10;
    /// Probabilities below this are reported as null branches.
    double null_branch = 1e-12;
    /// Max-abs entry below which a Kraus operator is dropped.
    double zero_operator = 1e-14;
    std::size_t max_dim = 4096;
};

namespace detail {
inline NumericPolicy &policy_storage() {
    static NumericPolicy p;
    return p;
}
} // namespace detail

inline const NumericPolicy &policy() { return detail::policy_storage(); }

/// Replace the global policy. Call before any concurrent use.
inline void set_policy(const NumericPolicy &p) { detail::policy_storage() = p; }

/// Thrown when a construction would exceed `NumericPolicy::max_dim` or an
/// enumeration cap.
class ResourceLimitError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline void check_resource(std::size_t dim, const std::string &what) {
    if (dim > policy().max_dim) {
        throw ResourceLimitError(what + ": dimension " + std::to_string(dim) +
                                 " exceeds max_dim " +
                                 std::to_string(policy().max_dim));
    }
}

/// Overflow-safe integer power; saturates at SIZE_MAX.
inline std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (base != 0 && r > static_cast<std::size_t>(-1) / base) {
            return static_cast<std::size_t>(-1);
        }
        r *= base;
    }
    return r;
}

} // namespace qswitch
