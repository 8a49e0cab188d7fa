// config.hpp — numeric tolerances and truncation parameters

#pragma once

#include "fibercat/error.hpp"

namespace fibercat {

struct Tolerances {
    double projection = 1e-8;      // ||p - p*||, ||p^2 - p|| acceptance bound
    double unitarity = 1e-8;       // ||u u* - 1|| acceptance bound
    double intertwiner = 1e-8;     // residual bound for intertwiner relations
    double support_cutoff = 1e-10; // singular values below this count as zero
};

// One record drives every module; all values checked by validate().
struct Config {
    Tolerances tol;
    int level_cap = 4;    // truncation level R for graded computations
    int grade_window = 4; // grades restricted to |k| <= grade_window
    int threads = 1;      // parallelism degree for per-point maps

    void validate() const {
        auto check_tol = [](double t, const char* name) {
            if (!(t > 0.0) || t > 1e-2)
                fail(ErrorKind::Validation,
                     std::string("tolerance '") + name + "' must lie in (0, 1e-2]");
        };
        check_tol(tol.projection, "projection");
        check_tol(tol.unitarity, "unitarity");
        check_tol(tol.intertwiner, "intertwiner");
        check_tol(tol.support_cutoff, "support_cutoff");
        if (level_cap < 1 || level_cap > 8)
            fail(ErrorKind::Validation, "level_cap must lie in [1, 8]");
        if (grade_window < 0)
            fail(ErrorKind::Validation, "grade_window must be nonnegative");
        if (threads < 1)
            fail(ErrorKind::Validation, "threads must be >= 1");
    }

    // Reads FIBERCAT_THREADS if set; everything else stays at defaults.
    static Config from_env();
};

} // namespace fibercat
