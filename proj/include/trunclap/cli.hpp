#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "trunclap/geometry.hpp"
#include "trunclap/problem.hpp"

namespace trunclap::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kVerificationFail = 1,
  kDiverged = 2,
  kMaxIter = 3,
  kBracketFailure = 5,
  kUsage = 64,
};

/// Runs one subcommand. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

// Config parsing. All throw ConfigurationError on schema violations, including unknown keys.
DomainSpec parse_domain(const nlohmann::json& j);
ScalarField parse_field(const nlohmann::json& j);
HamiltonianSpec parse_hamiltonian(const nlohmann::json& j);
SchemeConfig parse_scheme(const nlohmann::json& j);

/// FNV-1a over the canonical (sorted-key, compact) serialization, as 16 hex digits.
std::string config_hash(const nlohmann::json& j);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

struct PropsSummary {
  int trials = 0;
  int checks = 0;
  std::map<std::string, int> failures;  // property -> count
  std::map<std::string, double> worst;  // property -> worst slack seen
  bool pass() const;
};

/// Random symmetric matrices of size 1..max_dim with all k: duality, trace at k = n, the
/// sum inequalities, Loewner monotonicity (on X <= X + B B^T pairs) and homogeneity.
PropsSummary random_matrix_suite(int trials, int max_dim, std::uint64_t seed);

}  // namespace trunclap::cli
