#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "viscoflow/integrators.hpp"
#include "viscoflow/loading.hpp"
#include "viscoflow/material.hpp"
#include "viscoflow/trajectory.hpp"

namespace viscoflow {

/// Version tag written into every cache file; bumping it invalidates caches.
inline constexpr int kCacheFormatVersion = 1;

/// Hex FNV-1a hash over an exact (hex-float) rendering of loading, params and dt_ref.
std::string reference_cache_key(const LoadingProgram& loading, const MaterialParams& params, double dt_ref);

/// MEBM trajectory over the whole loading program at dt_ref. With a cache
/// directory, a previously stored run with the same key is loaded instead;
/// a fresh run is written atomically (temp file + rename).
Trajectory reference_solution(const LoadingProgram& loading, const MaterialParams& params, double dt_ref,
                              const std::optional<std::filesystem::path>& cache_dir = std::nullopt);

void write_trajectory_cache(const Trajectory& traj, const std::filesystem::path& path);
/// Throws IoError on a missing file, a version mismatch or malformed content.
Trajectory read_trajectory_cache(const std::filesystem::path& path);

/// ‖Ci_numer − Ci_exact‖ at every `interval` seconds present on both grids.
ErrorCurve error_curve(const Trajectory& numer, const Trajectory& exact, double interval = 1.0);

/// All (kind, dt) runs against a given reference, in parallel. Curves come
/// back ordered kind-major, then by dt as listed.
std::vector<ErrorCurve> error_study(const LoadingProgram& loading, const MaterialParams& params,
                                    std::span<const IntegratorKind> kinds, std::span<const double> dts,
                                    const Trajectory& reference, unsigned threads = 0);

/// Same, computing (or loading) the reference first. Requires every dt >= 10·dt_ref.
std::vector<ErrorCurve> error_study(const LoadingProgram& loading, const MaterialParams& params,
                                    std::span<const IntegratorKind> kinds, std::span<const double> dts,
                                    double dt_ref,
                                    const std::optional<std::filesystem::path>& cache_dir = std::nullopt,
                                    unsigned threads = 0);

/// Columns t,value,method,dt; one row per curve point, curves in order.
void emit_csv(std::span<const ErrorCurve> curves, const std::filesystem::path& path);

/// Columns t, Ci11, Ci22, Ci33, Ci12, Ci13, Ci23, det_Ci, f, xi, iterations, method, dt.
void emit_csv(const Trajectory& traj, const std::filesystem::path& path);

/// Parses a file written by emit_csv(curves, ...); consecutive rows with the
/// same (method, dt) form one curve.
std::vector<ErrorCurve> read_curves_csv(const std::filesystem::path& path);

/// Windowed maxima per curve: max over [0,100], [50,150], [150,300],
/// [200,300] (when covered) and the final error.
void emit_summary_csv(std::span<const ErrorCurve> curves, const std::filesystem::path& path);

/// printf("%.16e"): 17 significant digits, exact round trip.
std::string format_double(double v);

}  // namespace viscoflow
