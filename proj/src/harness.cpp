#include "viscoflow/harness.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <system_error>
#include <thread>

#include "viscoflow/errors.hpp"
#include "viscoflow/parallel.hpp"

namespace viscoflow {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

namespace {

std::string hex_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

double parse_double(const std::string& s, const fs::path& path) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw IoError("malformed number '" + s + "' in " + path.string());
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::ofstream open_for_write(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish_write(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("write to " + path.string() + " failed");
}

}  // namespace

std::string reference_cache_key(const LoadingProgram& loading, const MaterialParams& params, double dt_ref) {
  std::string s = "v" + std::to_string(kCacheFormatVersion) + ";MEBM;";
  for (const auto& k : loading.knots()) {
    s += hex_float(k.t) + ":";
    for (double v : k.F.data()) s += hex_float(v) + ",";
    s += ";";
  }
  for (double v : {params.k, params.mu, params.K, params.m, params.eta, params.k0, params.rho_R})
    s += hex_float(v) + ",";
  s += hex_float(dt_ref);
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(s)));
  return buf;
}

void write_trajectory_cache(const Trajectory& traj, const fs::path& path) {
  auto out = open_for_write(path);
  out << "viscoflow-trajectory " << kCacheFormatVersion << "\n";
  out << "method " << to_string(traj.method) << "\n";
  out << "dt " << format_double(traj.dt) << "\n";
  out << "samples " << traj.samples.size() << "\n";
  for (const auto& s : traj.samples) {
    out << format_double(s.t);
    for (double c : s.Ci.components()) out << ' ' << format_double(c);
    out << ' ' << format_double(s.det_Ci) << ' ' << format_double(s.overstress) << ' ' << format_double(s.xi)
        << ' ' << s.newton_iterations << "\n";
  }
  finish_write(out, path);
}

Trajectory read_trajectory_cache(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "viscoflow-trajectory")
    throw IoError(path.string() + " is not a trajectory cache");
  if (version != kCacheFormatVersion)
    throw IoError(path.string() + ": cache format version " + std::to_string(version) + " is not supported");

  Trajectory traj;
  std::string key, value;
  std::size_t count = 0;
  if (!(in >> key >> value) || key != "method") throw IoError(path.string() + ": missing method");
  try {
    traj.method = parse_integrator_kind(value);
  } catch (const InvalidArgument& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  if (!(in >> key >> value) || key != "dt") throw IoError(path.string() + ": missing dt");
  traj.dt = parse_double(value, path);
  if (!(in >> key >> count) || key != "samples") throw IoError(path.string() + ": missing sample count");

  traj.samples.resize(count);
  for (auto& s : traj.samples) {
    std::array<std::string, 10> f;
    for (auto& x : f)
      if (!(in >> x)) throw IoError(path.string() + ": truncated");
    int iterations = 0;
    if (!(in >> iterations)) throw IoError(path.string() + ": truncated");
    s.t = parse_double(f[0], path);
    std::array<double, 6> c{};
    for (std::size_t i = 0; i < 6; ++i) c[i] = parse_double(f[i + 1], path);
    s.Ci = SymTensor3(c);
    s.det_Ci = parse_double(f[7], path);
    s.overstress = parse_double(f[8], path);
    s.xi = parse_double(f[9], path);
    s.newton_iterations = iterations;
  }
  return traj;
}

Trajectory reference_solution(const LoadingProgram& loading, const MaterialParams& params, double dt_ref,
                              const std::optional<fs::path>& cache_dir) {
  const double span = loading.end_time() - loading.start_time();
  fs::path cache_file;
  if (cache_dir) {
    cache_file = *cache_dir / ("reference-" + reference_cache_key(loading, params, dt_ref) + ".txt");
    if (fs::exists(cache_file)) {
      try {
        return read_trajectory_cache(cache_file);
      } catch (const IoError&) {
        // stale or corrupt entry: recompute and overwrite below
      }
    }
  }

  Trajectory traj = integrate(loading, params, IntegratorKind::MEBM, dt_ref, span);

  if (cache_dir) {
    std::error_code ec;
    fs::create_directories(*cache_dir, ec);
    const auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
    fs::path tmp = cache_file;
    tmp += ".tmp." + std::to_string(tid);
    write_trajectory_cache(traj, tmp);
    fs::rename(tmp, cache_file, ec);
    if (ec) throw IoError("cannot move cache file into place: " + ec.message());
  }
  return traj;
}

ErrorCurve error_curve(const Trajectory& numer, const Trajectory& exact, double interval) {
  if (!(interval > 0.0)) throw InvalidArgument("sampling interval must be positive");
  if (numer.samples.empty() || exact.samples.empty()) throw InvalidArgument("empty trajectory");
  ErrorCurve curve;
  curve.method = numer.method;
  curve.dt = numer.dt;
  const double t0 = numer.samples.front().t;
  const double t_last = std::min(numer.samples.back().t, exact.samples.back().t);
  const long count = static_cast<long>(std::floor((t_last - t0) / interval + 1e-9));
  for (long k = 0; k <= count; ++k) {
    const double t = t0 + static_cast<double>(k) * interval;
    const long i = numer.index_of(t);
    const long j = exact.index_of(t);
    if (i < 0 || j < 0) continue;
    const auto& a = numer.samples[static_cast<std::size_t>(i)].Ci;
    const auto& b = exact.samples[static_cast<std::size_t>(j)].Ci;
    curve.times.push_back(t);
    curve.errors.push_back(frobenius_norm(a - b));
  }
  return curve;
}

std::vector<ErrorCurve> error_study(const LoadingProgram& loading, const MaterialParams& params,
                                    std::span<const IntegratorKind> kinds, std::span<const double> dts,
                                    const Trajectory& reference, unsigned threads) {
  const double span = loading.end_time() - loading.start_time();
  std::vector<ErrorCurve> curves(kinds.size() * dts.size());
  parallel_for(curves.size(), threads, [&](std::size_t n) {
    const auto kind = kinds[n / dts.size()];
    const double dt = dts[n % dts.size()];
    curves[n] = error_curve(integrate(loading, params, kind, dt, span), reference);
  });
  return curves;
}

std::vector<ErrorCurve> error_study(const LoadingProgram& loading, const MaterialParams& params,
                                    std::span<const IntegratorKind> kinds, std::span<const double> dts,
                                    double dt_ref, const std::optional<fs::path>& cache_dir, unsigned threads) {
  if (!(dt_ref > 0.0)) throw InvalidArgument("dt_ref must be positive");
  for (double dt : dts)
    if (!(dt >= 10.0 * dt_ref * (1.0 - 1e-12)))
      throw InvalidArgument("dt_ref must not exceed a tenth of the smallest study step");
  const Trajectory reference = reference_solution(loading, params, dt_ref, cache_dir);
  return error_study(loading, params, kinds, dts, reference, threads);
}

void emit_csv(std::span<const ErrorCurve> curves, const fs::path& path) {
  auto out = open_for_write(path);
  out << "t,value,method,dt\n";
  for (const auto& c : curves) {
    const std::string tail = "," + std::string(to_string(c.method)) + "," + format_double(c.dt) + "\n";
    for (std::size_t i = 0; i < c.times.size(); ++i)
      out << format_double(c.times[i]) << ',' << format_double(c.errors[i]) << tail;
  }
  finish_write(out, path);
}

void emit_csv(const Trajectory& traj, const fs::path& path) {
  auto out = open_for_write(path);
  out << "t,Ci11,Ci22,Ci33,Ci12,Ci13,Ci23,det_Ci,f,xi,iterations,method,dt\n";
  const std::string tail = "," + std::string(to_string(traj.method)) + "," + format_double(traj.dt) + "\n";
  for (const auto& s : traj.samples) {
    out << format_double(s.t);
    for (double c : s.Ci.components()) out << ',' << format_double(c);
    out << ',' << format_double(s.det_Ci) << ',' << format_double(s.overstress) << ',' << format_double(s.xi) << ','
        << s.newton_iterations << tail;
  }
  finish_write(out, path);
}

std::vector<ErrorCurve> read_curves_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "t,value,method,dt")
    throw IoError(path.string() + ": unexpected header");
  std::vector<ErrorCurve> curves;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 4) throw IoError(path.string() + ": expected 4 fields in '" + line + "'");
    IntegratorKind kind;
    try {
      kind = parse_integrator_kind(f[2]);
    } catch (const InvalidArgument& e) {
      throw IoError(path.string() + ": " + e.what());
    }
    const double dt = parse_double(f[3], path);
    if (curves.empty() || curves.back().method != kind || curves.back().dt != dt) {
      curves.emplace_back();
      curves.back().method = kind;
      curves.back().dt = dt;
    }
    curves.back().times.push_back(parse_double(f[0], path));
    curves.back().errors.push_back(parse_double(f[1], path));
  }
  return curves;
}

void emit_summary_csv(std::span<const ErrorCurve> curves, const fs::path& path) {
  auto out = open_for_write(path);
  out << "method,dt,max_0_100,max_50_150,max_150_300,max_200_300,final_t,final_error\n";
  auto window = [](const ErrorCurve& c, double lo, double hi) -> std::string {
    if (c.times.empty() || c.times.front() > lo + 1e-9 || c.times.back() < hi - 1e-9) return "";
    return format_double(c.window_max(lo, hi));
  };
  for (const auto& c : curves) {
    out << to_string(c.method) << ',' << format_double(c.dt) << ',' << window(c, 0, 100) << ','
        << window(c, 50, 150) << ',' << window(c, 150, 300) << ',' << window(c, 200, 300) << ',';
    if (c.times.empty())
      out << ",\n";
    else
      out << format_double(c.times.back()) << ',' << format_double(c.errors.back()) << "\n";
  }
  finish_write(out, path);
}

}  // namespace viscoflow
