#pragma once

#include <stdexcept>
#include <string>

namespace treedyn {

// Caller broke a documented precondition.
struct contract_violation : std::logic_error {
    using std::logic_error::logic_error;
};

// Requested work exceeds a configured cost guard.
struct cost_guard_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A numerical routine left its validity envelope (monotonicity broken,
// negative radicand, domain violation).
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A series was detected to diverge.
struct divergence_error : numerical_error {
    using numerical_error::numerical_error;
};

// Bad user-supplied configuration.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace treedyn
