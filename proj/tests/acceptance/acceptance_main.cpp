// Full-scale statistical verification: one line per check, nonzero exit if
// anything fails.  Expect several minutes of single-core runtime.

#include <cstdio>
#include <exception>

#include "mcp/verify.hpp"

int main() {
  bool all = true;
  for (const mcp::CheckEntry& entry : mcp::check_registry()) {
    mcp::CheckResult r;
    try {
      r = entry.fn(1.0);
    } catch (const std::exception& e) {
      r.name = entry.label;
      r.pass = false;
      r.detail = std::string("unexpected exception: ") + e.what();
    }
    std::printf("[%s] %s: %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    std::fflush(stdout);
    all = all && r.pass;
  }
  return all ? 0 : 1;
}
