#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adg2/io.hpp"

namespace adg2 {

struct CheckResult {
  std::string id;
  std::string paper_ref;  // short description of the identity being checked
  bool pass = false;
  // Largest exact residual converted to double; for detection checks, the number of misses.
  double max_residual = 0;
  double runtime_ms = 0;
};

struct Report {
  std::string suite;
  std::vector<CheckResult> checks;

  bool all_pass() const;
  // runtime_ms is written as null unless `timing`, so reports are byte-identical for a fixed seed.
  Json to_json(bool timing = false) const;
};

struct VerifyOptions {
  std::uint64_t seed = 7;
  // Test hook: use a corrupted sign table in the hyperkähler cyclic-symmetry check.
  bool corrupt_conventions = false;
};

// excalc, g2lin, hk, spin or all; throws std::invalid_argument on any other name.
Report run_suite(const std::string& suite, const VerifyOptions& opt = {});
const std::vector<std::string>& suite_names();

}  // namespace adg2
