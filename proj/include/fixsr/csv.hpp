#pragma once

#include <string>

namespace fixsr {

// CSV rendering with 17 significant digits; NaN marks a missing cell as "NA".
std::string csv_num(double x);

}  // namespace fixsr
