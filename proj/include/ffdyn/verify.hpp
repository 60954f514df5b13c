#ifndef FFDYN_VERIFY_HPP
#define FFDYN_VERIFY_HPP

#include <string>

namespace ffdyn {

struct VerifyResult {
    int checks = 0;
    int failures = 0;
    std::string log; // one line per check, deterministic for a fixed seed
    bool ok() const { return failures == 0; }
};

// Randomized invariant battery across all modules; deterministic for a
// fixed seed.  Failing cases are serialized into the log.
VerifyResult verify_suite(unsigned long long seed);

} // namespace ffdyn

#endif
