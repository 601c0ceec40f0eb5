#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ahc {

/// Dense index of an object in [0, n).
using ObjectId = std::uint32_t;

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

enum class ErrorCode {
  OutOfRange,
  InvalidArgument,
  NoSplits,
  InvalidBands,
  NoConvergence,
  DegenerateSample,
  DegenerateFeatures,
  NoQualifyingClusters,
  SplitFailed,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Number of unordered pairs among n objects.
constexpr std::uint64_t pair_count(std::uint64_t n) noexcept { return n < 2 ? 0 : n * (n - 1) / 2; }

}  // namespace ahc
