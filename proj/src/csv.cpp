#include "fixsr/csv.hpp"

#include <cmath>
#include <cstdio>

namespace fixsr {

std::string csv_num(double x) {
    if (std::isnan(x)) return "NA";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace fixsr
