#pragma once

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace nbw {

/** Parameters of the acceptance battery. */
struct AcceptanceConfig {
  int window_min = -10;
  /** q-floor of the directly built full complexes at theta = 8. */
  int direct_top_min = 8;
  /** Worker count for complex construction and ranks (0: hardware count). */
  unsigned threads = 0;
};

/** Outcome of one numbered criterion. */
struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;

  /** "criterion <id> <name>: PASS|FAIL (<detail>)". */
  std::string line() const;
  nlohmann::json to_json() const;
};

/**
 * Runs the twelve acceptance criteria in order, calling `on_result` as each
 * one finishes.
 *
 * Homology at weight 8 with psi <= 2 is taken from dot_label_report, and the
 * full complex there is built directly only on q >= direct_top_min, where it
 * is checked to be a filtered deformation of the graded one and to have the
 * same homology. Every other complex is built directly on the whole window.
 */
std::vector<CriterionResult>
run_acceptance(const AcceptanceConfig &config,
               const std::function<void(const CriterionResult &)> &on_result = {});

} // namespace nbw
