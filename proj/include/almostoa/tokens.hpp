#pragma once

#include <cstdint>
#include <mutex>
#include <random>
#include <string>

namespace almostoa {

/// Bytes of randomness behind each decision token (256 bits).
inline constexpr std::size_t kTokenBytes = 32;

class TokenSource {
 public:
  virtual ~TokenSource() = default;
  /// A fresh URL-safe token.
  virtual std::string next() = 0;
};

/// Tokens drawn from the operating system CSPRNG via OpenSSL.
class SecureTokenSource final : public TokenSource {
 public:
  std::string next() override;
};

/// Reproducible tokens for simulations and tests. Not for live traffic.
class SeededTokenSource final : public TokenSource {
 public:
  explicit SeededTokenSource(std::uint64_t seed) : engine_(seed) {}
  std::string next() override;

 private:
  std::mutex mutex_;
  std::mt19937_64 engine_;
};

std::string base64url(const unsigned char* data, std::size_t n);

}  // namespace almostoa
