#include "speechdfa/numeric.hpp"

#include <algorithm>

#include "speechdfa/errors.hpp"

namespace speechdfa {

double median(std::vector<double> values) {
  if (values.empty()) {
    throw Error("numeric: median of empty set");
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) {
    return values[n / 2];
  }
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace speechdfa
