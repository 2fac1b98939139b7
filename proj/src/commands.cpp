#include "viscoflow/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "viscoflow/errors.hpp"
#include "viscoflow/harness.hpp"
#include "viscoflow/integrators.hpp"
#include "viscoflow/stability.hpp"

namespace viscoflow {

namespace fs = std::filesystem;

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InvalidArgument*>(&e) ||
      dynamic_cast<const IoError*>(&e))
    return kExitConfig;
  return kExitNumerical;
}

namespace {

template <class Body>
int guarded(const char* name, std::ostream& err, Body&& body) {
  try {
    body();
    return kExitOk;
  } catch (const NoConvergence& e) {
    err << name << ": " << e.what();
    if (e.step() >= 0) err << " (step " << e.step() << ")";
    err << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << name << ": " << e.what() << "\n";
    return exit_code_for(e);
  }
}

fs::path output_dir(const RunConfig& config) {
  fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::ofstream open_csv(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

int cmd_simulate(const RunConfig& config, std::ostream& log, std::ostream& err) {
  return guarded("simulate", err, [&] {
    config.validate();
    const auto dir = output_dir(config);
    const auto traj = integrate(config.loading(), config.material, config.simulate.method, config.simulate.dt,
                                config.t_end);
    double drift = 0.0;
    for (const auto& s : traj.samples) drift = std::max(drift, std::abs(s.det_Ci - 1.0));
    const auto path = dir / "trajectory.csv";
    emit_csv(traj, path);
    log << "simulate: " << to_string(traj.method) << " dt=" << short_number(traj.dt) << ", "
        << traj.samples.size() << " samples, max |det Ci - 1| = " << format_double(drift) << "\n"
        << "  wrote " << path.string() << "\n";
  });
}

int cmd_error_study(const RunConfig& config, std::ostream& log, std::ostream& err) {
  return guarded("error-study", err, [&] {
    config.validate();
    if (!config.dt_ref) throw ConfigError("error-study requires dt_ref");
    const auto dir = output_dir(config);
    std::optional<fs::path> cache;
    if (config.cache_reference) cache = dir / "cache";
    const auto curves =
        error_study(config.loading(), config.material, config.methods, config.dts, *config.dt_ref, cache);
    for (const auto& c : curves) {
      const auto path = dir / ("error_" + std::string(to_string(c.method)) + "_dt" + short_number(c.dt) + ".csv");
      emit_csv(std::span<const ErrorCurve>(&c, 1), path);
      log << "error-study: " << to_string(c.method) << " dt=" << short_number(c.dt)
          << " final error = " << (c.errors.empty() ? std::string("n/a") : format_double(c.errors.back()))
          << "\n  wrote " << path.string() << "\n";
    }
    const auto summary = dir / "error_summary.csv";
    emit_summary_csv(curves, summary);
    log << "  wrote " << summary.string() << " (reference: MEBM, dt_ref=" << short_number(*config.dt_ref) << ")\n";
  });
}

int cmd_stability(const RunConfig& config, std::ostream& log, std::ostream& err) {
  return guarded("stability", err, [&] {
    config.validate();
    const auto dir = output_dir(config);
    QThetaSettings grid;
    grid.resolution = config.stability.resolution;
    grid.refinement = config.stability.refinement;

    const auto curve_path = dir / "q_theta.csv";
    {
      auto out = open_csv(curve_path);
      out << "theta,q\n";
      out << format_double(0.0) << ',' << format_double(0.0) << "\n";
      const int n = config.stability.theta_points;
      for (int i = 1; i <= n; ++i) {
        const double theta = config.stability.theta_max * static_cast<double>(i) / n;
        out << format_double(theta) << ',' << format_double(q_theta(theta, grid)) << "\n";
      }
      if (!out) throw IoError("write to " + curve_path.string() + " failed");
    }

    struct Row {
      std::string label;
      MaterialParams params;
      double theta;
    };
    MaterialParams alu = config.material;
    alu.K = 300.0;
    alu.mu = 25000.0;
    const std::vector<Row> rows{
        {"material", config.material, stability_theta(config.material)},
        {"aluminium", alu, stability_theta(alu)},
        {"aluminium_reported_theta", alu, 0.014},
    };

    const auto domain_path = dir / "stability.csv";
    auto out = open_csv(domain_path);
    out << "label,K,mu,m,theta,q_theta,x_cr,f_cr,x_cr_estimate,f_cr_estimate,f_cr_per_m\n";
    for (const auto& r : rows) {
      auto d = critical_values(r.params, q_theta(r.theta, grid));
      d.theta = r.theta;
      out << r.label << ',' << format_double(r.params.K) << ',' << format_double(r.params.mu) << ','
          << format_double(r.params.m) << ',' << format_double(d.theta) << ',' << format_double(d.q_theta) << ','
          << format_double(d.x_cr) << ',' << format_double(d.f_cr) << ',' << format_double(d.x_cr_estimate)
          << ',' << format_double(d.f_cr_estimate) << ',' << format_double(d.f_cr / r.params.m) << "\n";
      log << "stability: " << r.label << " theta=" << short_number(d.theta) << " q=" << short_number(d.q_theta)
          << " x_cr=" << short_number(d.x_cr) << " f_cr=" << short_number(d.f_cr)
          << " MPa (f_cr/m=" << short_number(d.f_cr / r.params.m) << ")\n";
    }
    if (!out) throw IoError("write to " + domain_path.string() + " failed");
    log << "  wrote " << curve_path.string() << "\n  wrote " << domain_path.string() << "\n";
  });
}

int cmd_demo_1d(const RunConfig& config, std::ostream& log, std::ostream& err) {
  return guarded("demo-1d", err, [&] {
    config.validate();
    const auto dir = output_dir(config);
    const auto& d = config.demo_1d;
    const auto a = simulate_1d(d.params, d.eps_i0_first, d.t_end, d.dt);
    const auto b = simulate_1d(d.params, d.eps_i0_second, d.t_end, d.dt);

    const auto traj_path = dir / "demo_1d.csv";
    {
      auto out = open_csv(traj_path);
      out << "t,eps_i_1,eps_i_2,distance,log_distance\n";
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double dist = std::abs(a[i].eps_i - b[i].eps_i);
        out << format_double(a[i].t) << ',' << format_double(a[i].eps_i) << ',' << format_double(b[i].eps_i) << ','
            << format_double(dist) << ',' << (dist > 0.0 ? format_double(std::log(dist)) : std::string()) << "\n";
      }
      if (!out) throw IoError("write to " + traj_path.string() + " failed");
    }
    log << "  wrote " << traj_path.string() << "\n";

    const auto window = d.window.value_or(default_fit_window(a.front().t, a.back().t));
    auto flows = [&](const std::vector<Rheo1DSample>& traj) {
      std::optional<double> first;
      for (const auto& s : traj) {
        if (s.t < window.t_lo || s.t > window.t_hi) continue;
        if (!first) first = s.eps_i;
        else if (s.eps_i != *first) return true;
      }
      return false;
    };
    if (!flows(a) || !flows(b))
      throw NonPositiveDistance("no inelastic flow in the fit window: the distance does not decay, nothing to fit");

    const auto fit = estimate_decay_rate<Rheo1DSample>(
        a, b, [](const Rheo1DSample& s) { return s.t; },
        [](const Rheo1DSample& x, const Rheo1DSample& y) { return std::abs(x.eps_i - y.eps_i); }, window);
    const double analytic = d.params.E / d.params.eta;

    const auto fit_path = dir / "demo_1d_fit.csv";
    auto out = open_csv(fit_path);
    out << "gamma,analytic_rate,relative_error,t_lo,t_hi,points\n";
    out << format_double(fit.gamma) << ',' << format_double(analytic) << ','
        << format_double(std::abs(fit.gamma - analytic) / analytic) << ',' << format_double(window.t_lo) << ','
        << format_double(window.t_hi) << ',' << fit.points << "\n";
    if (!out) throw IoError("write to " + fit_path.string() + " failed");
    log << "demo-1d: fitted gamma = " << short_number(fit.gamma) << ", E/eta = " << short_number(analytic)
        << " (" << fit.points << " points in [" << short_number(window.t_lo) << ", " << short_number(window.t_hi)
        << "])\n  wrote " << fit_path.string() << "\n";
  });
}

}  // namespace viscoflow
