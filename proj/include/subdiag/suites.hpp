#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "subdiag/algebra.hpp"
#include "subdiag/szego.hpp"

namespace subdiag {

inline constexpr const char* kToolVersion = "1.0.0";

// Verification suites: each one hammers a single statement with seeded
// random instances and reports pass counts plus the worst relative residual
// seen.  Residuals are recorded even when everything passes so regressions
// show up as numbers, not just as flips.

struct SuiteOptions {
  int trials = 25;
  double opt_tol = 1e-3;    // allowed relative gap between optimizer and determinant
  double det_floor = 1e-8;  // relative determinant floor when drawing factorable inputs
  double p = 2.0;           // exponents for the riesz and szego-lp suites
  double q = 1.0;
  // When nonempty, the szego suites optimize this fixed weight instead of
  // drawing one per instance; the optimizer seed still varies.
  CMatrix weight;
  SzegoOptions szego;
};

struct SuiteResult {
  std::string name;
  std::string theorem;  // the statement exercised, human readable
  int instances = 0;
  int passes = 0;
  int failures = 0;
  double max_residual = 0.0;
  double elapsed_ms = 0.0;
};

// Canonical order used when expanding "all".
const std::vector<std::string>& suite_names();

// Runs one named suite against the algebra.  Unknown names throw InputError.
SuiteResult run_suite(const std::string& name, const TracialSubalgebra& alg, std::uint64_t seed,
                      const SuiteOptions& opts = {});

struct Report {
  std::string version = kToolVersion;
  std::string rng;
  std::uint64_t seed = 0;
  std::string algebra;
  std::vector<SuiteResult> suites;
  bool overall = true;  // no suite recorded a failure
};

// Expands "all", runs every requested suite in canonical order, and fills
// the header fields.  Deterministic for fixed names, algebra, and seed up to
// the elapsed timings.
Report run_suites(const std::vector<std::string>& names, const TracialSubalgebra& alg,
                  std::uint64_t seed, const SuiteOptions& opts = {});

// Short human readable descriptor for report headers.
std::string describe_algebra(const TracialSubalgebra& alg);

}  // namespace subdiag
