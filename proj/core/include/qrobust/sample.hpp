#pragma once

#include <vector>

namespace qrobust {

// One classical input prepared for amplitude encoding: a unit-norm feature
// vector of length 2^n and its binary class label.
struct EncodedSample {
    std::vector<double> features;
    int label = 0;  // 0 or 1
};

}  // namespace qrobust
