#include "viscoflow/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include "viscoflow/errors.hpp"

namespace viscoflow {

using nlohmann::json;

namespace {

// Reads keys of one JSON object and rejects whatever is left unread.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  const json* find(const std::string& key) {
    const auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  void number(const std::string& key, double& out) {
    if (const auto* v = find(key)) out = as_number(*v, child(key));
  }

  void integer(const std::string& key, int& out) {
    if (const auto* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(child(key) + " must be an integer");
      out = v->get<int>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const auto* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(child(key) + " must be true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const auto* v = find(key)) {
      if (!v->is_string()) throw ConfigError(child(key) + " must be a string");
      out = v->get<std::string>();
    }
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw ConfigError("unknown key '" + child(key) + "'");
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "configuration" : "'" + path_ + "'"; }

  static double as_number(const json& v, const std::string& name) {
    if (!v.is_number()) throw ConfigError(name + " must be a number");
    return v.get<double>();
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

IntegratorKind parse_kind(const json& v, const std::string& name) {
  if (!v.is_string()) throw ConfigError(name + " must be a method name");
  try {
    return parse_integrator_kind(v.get<std::string>());
  } catch (const InvalidArgument& e) {
    throw ConfigError(name + ": " + e.what());
  }
}

Tensor3 parse_matrix(const json& v, const std::string& name) {
  if (!v.is_array() || v.size() != 3) throw ConfigError(name + " must be a 3x3 array of rows");
  Tensor3 f;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!v[i].is_array() || v[i].size() != 3) throw ConfigError(name + " must be a 3x3 array of rows");
    for (std::size_t j = 0; j < 3; ++j) f(i, j) = Section::as_number(v[i][j], name);
  }
  return f;
}

json matrix_json(const Tensor3& f) {
  json rows = json::array();
  for (std::size_t i = 0; i < 3; ++i) rows.push_back({f(i, 0), f(i, 1), f(i, 2)});
  return rows;
}

bool is_multiple(double total, double step) {
  const double n = std::round(total / step);
  return n >= 1.0 && std::abs(n * step - total) <= 1e-9 * std::max(1.0, total);
}

}  // namespace

LoadingProgram RunConfig::loading() const { return knots.empty() ? paper_loading() : LoadingProgram(knots); }

void RunConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  try {
    material.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  try {
    (void)loading();
  } catch (const Error& e) {
    throw ConfigError(std::string("loading: ") + e.what());
  }
  require(!methods.empty(), "methods must list at least one integrator");
  require(!dts.empty(), "dts must list at least one time step");
  for (double dt : dts) require(std::isfinite(dt) && dt > 0.0, "dts entries must be positive");
  if (dt_ref) {
    require(std::isfinite(*dt_ref) && *dt_ref > 0.0, "dt_ref must be positive");
    for (double dt : dts)
      require(dt >= 10.0 * *dt_ref * (1.0 - 1e-12), "dt_ref must not exceed a tenth of the smallest entry of dts");
  }
  require(std::isfinite(t_end) && t_end > 0.0, "t_end must be positive");
  require(std::isfinite(simulate.dt) && simulate.dt > 0.0, "simulate.dt must be positive");
  require(is_multiple(t_end, simulate.dt), "t_end must be a positive multiple of simulate.dt");
  require(!output_dir.empty(), "output_dir must not be empty");

  require(std::isfinite(stability.theta_max) && stability.theta_max > 0.0, "stability.theta_max must be positive");
  require(stability.theta_points >= 1, "stability.theta_points must be >= 1");
  require(stability.resolution >= 2, "stability.resolution must be >= 2");
  require(stability.refinement >= 1, "stability.refinement must be >= 1");

  try {
    demo_1d.params.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("demo_1d: ") + e.what());
  }
  require(std::isfinite(demo_1d.dt) && demo_1d.dt > 0.0, "demo_1d.dt must be positive");
  require(std::isfinite(demo_1d.t_end) && demo_1d.t_end > 0.0, "demo_1d.t_end must be positive");
  require(is_multiple(demo_1d.t_end, demo_1d.dt), "demo_1d.t_end must be a multiple of demo_1d.dt");
  require(std::isfinite(demo_1d.eps_i0_first) && std::isfinite(demo_1d.eps_i0_second),
          "demo_1d.eps_i0 entries must be finite");
  if (demo_1d.window)
    require(demo_1d.window->t_lo < demo_1d.window->t_hi, "demo_1d.window must satisfy lo < hi");
}

RunConfig parse_config(const json& j) {
  RunConfig c;
  Section top(j, "");

  if (const auto* m = top.find("material")) {
    Section s(*m, "material");
    s.number("k", c.material.k);
    s.number("mu", c.material.mu);
    s.number("K", c.material.K);
    s.number("m", c.material.m);
    s.number("eta", c.material.eta);
    s.number("k0", c.material.k0);
    s.number("rho_R", c.material.rho_R);
    s.finish();
  }

  if (const auto* l = top.find("loading")) {
    if (l->is_string()) {
      if (l->get<std::string>() != "paper") throw ConfigError("loading must be \"paper\" or an object with knots");
    } else {
      Section s(*l, "loading");
      const auto* k = s.find("knots");
      if (!k || !k->is_array() || k->empty()) throw ConfigError("loading.knots must be a non-empty array");
      for (std::size_t i = 0; i < k->size(); ++i) {
        const std::string name = "loading.knots[" + std::to_string(i) + "]";
        Section ks((*k)[i], name);
        const auto* t = ks.find("t");
        const auto* f = ks.find("F");
        if (!t || !f) throw ConfigError(name + " needs both t and F");
        c.knots.push_back({Section::as_number(*t, name + ".t"), parse_matrix(*f, name + ".F")});
        ks.finish();
      }
      s.finish();
    }
  }

  if (const auto* m = top.find("methods")) {
    if (!m->is_array()) throw ConfigError("methods must be an array");
    c.methods.clear();
    for (const auto& v : *m) c.methods.push_back(parse_kind(v, "methods"));
  }
  if (const auto* d = top.find("dts")) {
    if (!d->is_array()) throw ConfigError("dts must be an array");
    c.dts.clear();
    for (const auto& v : *d) c.dts.push_back(Section::as_number(v, "dts"));
  }
  if (const auto* d = top.find("dt_ref"); d && !d->is_null()) c.dt_ref = Section::as_number(*d, "dt_ref");
  top.number("t_end", c.t_end);
  top.string("output_dir", c.output_dir);
  top.boolean("cache_reference", c.cache_reference);

  if (const auto* v = top.find("simulate")) {
    Section s(*v, "simulate");
    if (const auto* m = s.find("method")) c.simulate.method = parse_kind(*m, "simulate.method");
    s.number("dt", c.simulate.dt);
    s.finish();
  }

  if (const auto* v = top.find("stability")) {
    Section s(*v, "stability");
    s.number("theta_max", c.stability.theta_max);
    s.integer("theta_points", c.stability.theta_points);
    s.integer("resolution", c.stability.resolution);
    s.integer("refinement", c.stability.refinement);
    s.finish();
  }

  if (const auto* v = top.find("demo_1d")) {
    Section s(*v, "demo_1d");
    auto& p = c.demo_1d.params;
    s.number("E", p.E);
    s.number("K", p.K);
    s.number("eta", p.eta);
    s.number("strain_rate", p.strain_rate);
    s.number("strain_amplitude", p.strain_amplitude);
    s.number("strain_period", p.strain_period);
    if (const auto* e = s.find("eps_i0")) {
      if (!e->is_array() || e->size() != 2) throw ConfigError("demo_1d.eps_i0 must be a pair");
      c.demo_1d.eps_i0_first = Section::as_number((*e)[0], "demo_1d.eps_i0");
      c.demo_1d.eps_i0_second = Section::as_number((*e)[1], "demo_1d.eps_i0");
    }
    s.number("t_end", c.demo_1d.t_end);
    s.number("dt", c.demo_1d.dt);
    if (const auto* w = s.find("window"); w && !w->is_null()) {
      if (!w->is_array() || w->size() != 2) throw ConfigError("demo_1d.window must be [t_lo, t_hi] or null");
      c.demo_1d.window = FitWindow{Section::as_number((*w)[0], "demo_1d.window"),
                                   Section::as_number((*w)[1], "demo_1d.window")};
    }
    s.finish();
  }

  top.finish();
  c.validate();
  return c;
}

json to_json(const RunConfig& c) {
  json j;
  j["material"] = {{"k", c.material.k},     {"mu", c.material.mu}, {"K", c.material.K},
                   {"m", c.material.m},     {"eta", c.material.eta}, {"k0", c.material.k0},
                   {"rho_R", c.material.rho_R}};
  if (c.knots.empty()) {
    j["loading"] = "paper";
  } else {
    json knots = json::array();
    for (const auto& k : c.knots) knots.push_back({{"t", k.t}, {"F", matrix_json(k.F)}});
    j["loading"] = {{"knots", knots}};
  }
  j["methods"] = json::array();
  for (auto m : c.methods) j["methods"].push_back(std::string(to_string(m)));
  j["dts"] = c.dts;
  j["dt_ref"] = c.dt_ref ? json(*c.dt_ref) : json(nullptr);
  j["t_end"] = c.t_end;
  j["output_dir"] = c.output_dir;
  j["cache_reference"] = c.cache_reference;
  j["simulate"] = {{"method", std::string(to_string(c.simulate.method))}, {"dt", c.simulate.dt}};
  j["stability"] = {{"theta_max", c.stability.theta_max},
                    {"theta_points", c.stability.theta_points},
                    {"resolution", c.stability.resolution},
                    {"refinement", c.stability.refinement}};
  const auto& d = c.demo_1d;
  j["demo_1d"] = {{"E", d.params.E},
                  {"K", d.params.K},
                  {"eta", d.params.eta},
                  {"strain_rate", d.params.strain_rate},
                  {"strain_amplitude", d.params.strain_amplitude},
                  {"strain_period", d.params.strain_period},
                  {"eps_i0", {d.eps_i0_first, d.eps_i0_second}},
                  {"t_end", d.t_end},
                  {"dt", d.dt},
                  {"window", d.window ? json{d.window->t_lo, d.window->t_hi} : json(nullptr)}};
  return j;
}

nlohmann::json default_config_json() {
  static const char* const kDefault = R"({
  "material": {"k": 73500, "mu": 28200, "K": 270, "m": 3.6, "eta": 2e6, "k0": 1, "rho_R": 1},
  "loading": "paper",
  "methods": ["EBM", "MEBM", "EM"],
  "dts": [1, 0.5],
  "dt_ref": 0.01,
  "t_end": 300,
  "output_dir": "out",
  "cache_reference": true,
  "simulate": {"method": "MEBM", "dt": 1},
  "stability": {"theta_max": 0.03, "theta_points": 30, "resolution": 400, "refinement": 10},
  "demo_1d": {"E": 1000, "K": 1, "eta": 100, "strain_rate": 0.01, "strain_amplitude": 0,
              "strain_period": 0, "eps_i0": [0, 0.001], "t_end": 2.5, "dt": 0.001, "window": null}
})";
  return json::parse(kDefault);
}

RunConfig default_config() { return parse_config(default_config_json()); }

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

}  // namespace viscoflow
