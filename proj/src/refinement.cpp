#include "actgram/refinement.hpp"

#include <cmath>

#include "actgram/error.hpp"

namespace actgram {

void FilterConfig::validate() const {
    if (!(min_duration_ratio > 0.0) || !(amp_ratio >= 1.0) || max_cycles < 1 || !(min_duration >= 0.0)) {
        throw Error(ErrorKind::Usage,
                    "filter config needs min_duration_ratio > 0, amp_ratio >= 1, max_cycles >= 1, min_duration >= 0");
    }
}

}  // namespace actgram
