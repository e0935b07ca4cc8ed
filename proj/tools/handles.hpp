#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

#include "macroscope/macroscope.h"

namespace mcs_cli {

// Anything that should end the process with exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void check(int status, const std::string& context) {
  if (status == MCS_OK) return;
  std::string detail = mcs_last_error();
  if (detail.empty()) detail = mcs_status_string(status);
  throw ConfigError(context.empty() ? detail : context + ": " + detail);
}

using Structure = std::shared_ptr<mcs_structure_struct>;
using Macroscope = std::shared_ptr<mcs_macroscope_struct>;

inline Structure adopt(mcs_structure_t s) { return Structure(s, mcs_structure_destroy); }
inline Macroscope adopt(mcs_macroscope_t m) { return Macroscope(m, mcs_macroscope_destroy); }

struct RunDeleter {
  void operator()(mcs_run_t r) const { mcs_run_destroy(r); }
};
struct VerifyDeleter {
  void operator()(mcs_verify_t v) const { mcs_verify_destroy(v); }
};
struct SearchDeleter {
  void operator()(mcs_search_t s) const { mcs_search_destroy(s); }
};
using Run = std::unique_ptr<mcs_run_struct, RunDeleter>;
using Verify = std::unique_ptr<mcs_verify_struct, VerifyDeleter>;
using Search = std::unique_ptr<mcs_search_struct, SearchDeleter>;

// Two-pass read for the (buf, len, needed) convention.
template <typename F>
std::string read_text(F&& fill, const std::string& context) {
  size_t needed = 0;
  int status = fill(nullptr, 0, &needed);
  if (status != MCS_ERR_BUFFER_TOO_SMALL) check(status, context);
  std::string text(needed, '\0');
  check(fill(text.data(), text.size(), &needed), context);
  text.resize(needed > 0 ? needed - 1 : 0);
  return text;
}

inline std::string digest(mcs_structure_t s) {
  return read_text([&](char* b, size_t l, size_t* n) { return mcs_structure_digest(s, b, l, n); }, "digest");
}

inline std::string structure_json(mcs_structure_t s) {
  return read_text([&](char* b, size_t l, size_t* n) { return mcs_structure_to_json(s, b, l, n); }, "structure");
}

inline uint32_t component_count(mcs_structure_t s) {
  uint32_t r = 0;
  check(mcs_structure_component_count(s, &r), "component count");
  return r;
}

}  // namespace mcs_cli
