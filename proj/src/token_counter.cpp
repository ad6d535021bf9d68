#include "ie/token_counter.hpp"

#include <cmath>
#include <string>

#include "ie/errors.hpp"
#include "ie/text.hpp"

namespace ie {

ApproximateTokenCounter::ApproximateTokenCounter(double chars_per_token) : chars_per_token_(chars_per_token) {
  if (!(chars_per_token > 0)) throw RangeError("chars_per_token must be positive");
}

std::size_t ApproximateTokenCounter::count(std::string_view s) const {
  auto chars = static_cast<double>(text::length(s));
  return static_cast<std::size_t>(std::ceil(chars / chars_per_token_));
}

std::string ApproximateTokenCounter::identity() const {
  return "approximate(chars_per_token=" + std::to_string(chars_per_token_) + ")";
}

}  // namespace ie
