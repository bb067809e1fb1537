#pragma once

#include "deltarel/reductions.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace deltarel::cli {

using json = nlohmann::ordered_json;

enum ExitCode : int {
  kYes = 0,
  kNo = 1,
  kIndeterminate = 2,
  kUsage = 64,
  kCapRefused = 65,
  kInternal = 70,
};

struct Outcome {
  int exit_code = kYes;
  /// One JSON document (or help text), newline terminated.
  std::string report;
};

/// Runs one command line without the program name, e.g.
/// {"decide", "--formula", "x1", "--x", "1", "--k", "1", "--delta", "1"}.
/// Never throws; failures become an error report and exit code.
Outcome run(const std::vector<std::string>& args);

/// Instance file object: formula, arity, kind, x, k, m, delta, gamma, seed
/// and layout. Absent optional fields are omitted.
json instance_to_json(const ProblemInstance& inst, std::optional<std::uint64_t> seed = std::nullopt);

/// Accepts the object above, or a report whose "instance" member holds it.
/// Throws std::invalid_argument on missing or malformed fields.
ProblemInstance instance_from_json(const json& doc);

}  // namespace deltarel::cli
