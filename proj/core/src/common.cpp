#include "puckplan/common.hpp"

#include <vector>

namespace puckplan {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::SingularCondition: return "SingularCondition";
    case ErrorCode::CoincidentCenters: return "CoincidentCenters";
    case ErrorCode::OutOfTable: return "OutOfTable";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::EmptyMode: return "EmptyMode";
    case ErrorCode::NoFeasibleShot: return "NoFeasibleShot";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Format: return "Format";
    case ErrorCode::Mismatch: return "Mismatch";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (path.size() + 1));
  auto push = [&](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(base);
  for (auto p : path) push(p);
  std::seed_seq seq(words.begin(), words.end());
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

}  // namespace puckplan
