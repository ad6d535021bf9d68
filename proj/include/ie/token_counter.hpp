#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace ie {

/// Counts model input tokens. Implementations must return >= 1 for
/// non-empty text and be monotone under concatenation.
class TokenCounter {
 public:
  virtual ~TokenCounter() = default;
  virtual std::size_t count(std::string_view text) const = 0;
  virtual std::string identity() const = 0;
};

/// ceil(code points / chars_per_token).
class ApproximateTokenCounter final : public TokenCounter {
 public:
  explicit ApproximateTokenCounter(double chars_per_token = 3.5);
  std::size_t count(std::string_view text) const override;
  std::string identity() const override;
  double chars_per_token() const { return chars_per_token_; }

 private:
  double chars_per_token_;
};

}  // namespace ie
