#pragma once

#include <cmath>
#include <fstream>
#include <string>

#include <json.hpp>

#include "iqmr/rng.hpp"

namespace testutil {

inline const nlohmann::json& derived() {
  static const nlohmann::json fixture = [] {
    std::ifstream in(std::string(IQMR_FIXTURE_DIR) + "/derived_expected.json");
    nlohmann::json j;
    in >> j;
    return j;
  }();
  return fixture;
}

inline double expected(const char* key) { return derived().at(key).get<double>(); }

inline bool rel_close(double actual, double expect, double tol = 1e-9) {
  const double scale = std::max(1.0, std::abs(expect));
  return std::abs(actual - expect) <= tol * scale;
}

/// Deterministic generator for property tests.
inline iqmr::SplitMix64 prop_rng(std::uint64_t salt = 0) {
  return iqmr::SplitMix64(0x5eedULL ^ (salt * 0x9e3779b97f4a7c15ULL));
}

}  // namespace testutil
