#pragma once

#include <array>
#include <string>
#include <string_view>

#include "sprank/manifest.hpp"
#include "sprank/report.hpp"

namespace sprank {

inline constexpr int kExitHolds = 0;
inline constexpr int kExitFails = 1;
inline constexpr int kExitError = 2;

/// Scanned extremes must match the closed form to this for scan-curvature to pass.
inline constexpr double kScanAgreementTol = 1e-3;

inline constexpr std::array<std::string_view, 5> kCommandNames = {
    "scan-curvature", "geodesic", "conjugate", "rank", "berger-report"};

struct CommandOutput {
  Report report;
  std::string csv;  // header row plus data, '\n' line ends
  int exit_code = kExitHolds;
};

/// Initial state named by manifest.direction:
///   first-sample | sample:K | fiber | horizontal | ambient:x0,x1,...
/// fiber and horizontal are the Berger directions i and j at the identity;
/// ambient vectors are projected at the default point. Unit speed.
GeodesicState resolve_direction(const ManifoldModel& model, const RunManifest& manifest);

CommandOutput cmd_scan_curvature(const RunManifest& manifest);
CommandOutput cmd_geodesic(const RunManifest& manifest);
CommandOutput cmd_conjugate(const RunManifest& manifest);
CommandOutput cmd_rank(const RunManifest& manifest);
CommandOutput cmd_berger_report(const RunManifest& manifest);

/// Dispatch by subcommand name; unknown names throw ParameterError.
CommandOutput run_command(std::string_view name, const RunManifest& manifest);

}  // namespace sprank
