#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mcp {

// A computation outgrew its configured budget (e.g. influence-cone replay).
class resource_error : public std::runtime_error {
 public:
  resource_error(const std::string& what, std::uint64_t size)
      : std::runtime_error(what + " (size " + std::to_string(size) + ")"), size_(size) {}
  std::uint64_t size() const { return size_; }

 private:
  std::uint64_t size_;
};

// An interface edge reached the moving-window buffer; results past this point
// would be corrupted, so the run stops hard instead of degrading silently.
class window_error : public std::runtime_error {
 public:
  explicit window_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mcp
