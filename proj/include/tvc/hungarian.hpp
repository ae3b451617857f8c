#pragma once

#include <vector>

#include "tvc/mat.hpp"

namespace tvc {

// Injective row -> column mapping minimizing the summed cost. Requires
// rows <= cols and finite entries. Among cost ties the lexicographically
// smallest mapping (scanning rows in order) is returned; cost is the sum of
// the chosen entries taken in row order.
struct Assignment {
    std::vector<int> col_of_row;
    double cost = 0.0;
};

Assignment hungarian_assign(const Mat& cost);

}  // namespace tvc
