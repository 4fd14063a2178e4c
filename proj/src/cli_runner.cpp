#include "gbm/cli_runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gbm/errors.hpp"
#include "gbm/exit_time.hpp"
#include "gbm/fd_reference.hpp"
#include "gbm/feynman_kac.hpp"
#include "gbm/io.hpp"
#include "gbm/validators.hpp"

namespace gbm::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kGenerator = "mt19937_64 seeded by seed_seq(seed, stream, batch)";

Error config_error(const std::string& msg) { return Error(ErrorKind::ConfigError, msg); }

void check(bool ok, const std::string& msg) {
  if (!ok) throw config_error(msg);
}

void validate_config(const RunConfig& c) {
  static const std::set<std::string> commands{"solve-cauchy", "solve-elliptic", "mode-factor", "validate", "lame-demo"};
  check(commands.count(c.command) == 1, "unknown command '" + c.command + "'");
  check(c.seed.has_value(), "--seed is required");
  check(c.dim >= 1 && c.dim <= 6, "--dim must be in [1, 6]");
  check(c.trunc_k >= 0 && c.trunc_k <= 64, "--trunc-k must be in [0, 64]");
  check(c.grid >= 4, "--grid must be at least 4");
  check(std::isfinite(c.dt) && c.dt > 0, "--dt must be positive");
  check(std::isfinite(c.time) && c.time > 0, "--time must be positive");
  check(std::isfinite(c.nu), "--nu must be finite");
  check(c.samples >= 1, "--samples must be at least 1");
  check(c.workers >= 1, "--workers must be at least 1");
  check(!c.out.empty(), "--out must not be empty");
  check(c.init == "cos" || c.init == "random", "--init must be cos or random");
  check(c.init_k >= 0 && c.init_k <= c.trunc_k, "--init-k must be in [0, trunc-k]");
  check(c.eval_points >= 1, "--eval-points must be at least 1");
  check(c.elliptic == "scalar" || c.elliptic == "system", "--elliptic must be scalar or system");
  check(c.cells >= 2, "--cells must be at least 2");
  check(c.start.empty() || static_cast<int>(c.start.size()) == c.dim, "--start needs one entry per dimension");
  check(c.boundary == "linear" || c.boundary == "cos", "--boundary must be linear or cos");
  check(c.levels >= 1 && c.levels <= 12, "--levels must be in [1, 12]");
  check(c.clt_trials >= 1, "--clt-trials must be at least 1");
  check(c.clt_p > 0 && c.clt_p < 1, "--clt-p must be in (0, 1)");
  check(c.clt_tol > 0, "--clt-tol must be positive");
  check(c.steps >= 1, "--steps must be at least 1");
  check(c.paths >= 1, "--paths must be at least 1");
  if (c.command == "validate")
    check(c.validator == "clt" || c.validator == "ito" || c.validator == "density",
          "validate needs one of clt, ito, density");
  if (c.tensor != "lame" && c.tensor != "scalar")
    check(fs::is_regular_file(c.tensor), "tensor file '" + c.tensor + "' not found");
  if (!c.field_file.empty()) check(fs::is_regular_file(c.field_file), "field file '" + c.field_file + "' not found");
  if (!c.spectral_file.empty())
    check(fs::is_regular_file(c.spectral_file), "spectral file '" + c.spectral_file + "' not found");
}

json config_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  if (!c.validator.empty()) j["validator"] = c.validator;
  j["tensor"] = c.tensor;
  j["nu"] = c.nu;
  j["dim"] = c.dim;
  j["trunc_k"] = c.trunc_k;
  j["grid"] = c.grid;
  j["dt"] = c.dt;
  j["time"] = c.time;
  j["samples"] = c.samples;
  j["seed"] = *c.seed;
  j["workers"] = c.workers;
  j["out"] = c.out;
  j["init"] = c.init;
  j["init_k"] = c.init_k;
  j["field_file"] = c.field_file;
  j["spectral_file"] = c.spectral_file;
  j["eval_points"] = c.eval_points;
  j["fd"] = c.fd;
  j["antithetic"] = c.antithetic;
  j["elliptic"] = c.elliptic;
  j["cells"] = c.cells;
  j["start"] = c.start;
  j["boundary"] = c.boundary;
  j["levels"] = c.levels;
  j["clt_trials"] = c.clt_trials;
  j["clt_p"] = c.clt_p;
  j["clt_tol"] = c.clt_tol;
  j["steps"] = c.steps;
  j["paths"] = c.paths;
  return j;
}

/// Output directory; every file written through it is listed with its checksum.
class Artifacts {
 public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void write(const std::string& name, const std::string& content) {
    write_raw(name, content);
    files_.push_back({{"file", name}, {"bytes", content.size()}, {"sha256", io::sha256_hex(content)}});
  }

  void write_raw(const std::string& name, const std::string& content) const {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + (dir_ / name).string());
    out << content;
    if (!out) throw Error(ErrorKind::IoError, "write failed for " + (dir_ / name).string());
  }

  const json& files() const { return files_; }

 private:
  fs::path dir_;
  json files_ = json::array();
};

std::string num(double v) { return io::format_double(v); }

json complex_json(const Eigen::VectorXcd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json rng_json(std::uint64_t seed) { return {{"generator", kGenerator}, {"seed", seed}}; }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

CoefficientTensor<double> make_tensor(const RunConfig& c, json& m) {
  if (c.tensor == "lame") {
    const double a = lame_coefficient(c.dim, c.nu);
    m["tensor"] = {{"family", "lame"}, {"dim", c.dim}, {"nu", c.nu}, {"a", a}};
    return lame_tensor(c.dim, a);
  }
  if (c.tensor == "scalar") {
    m["tensor"] = {{"family", "scalar"}, {"dim", c.dim}};
    return scalar_tensor(c.dim, 1.0);
  }
  auto tensor = io::read_tensor(fs::path(c.tensor));
  m["tensor"] = {{"file", c.tensor}, {"dim", tensor.dim()}, {"sha256", io::sha256_file(c.tensor)}};
  return tensor;
}

SpectralField<double> make_initial(const RunConfig& c, int n, json& m) {
  if (!c.spectral_file.empty()) {
    auto f = io::read_spectral_csv(fs::path(c.spectral_file));
    check(f.dim == n && f.components == n, "spectral file does not match the tensor dimension");
    m["initial"] = {{"source", "spectral_file"}, {"file", c.spectral_file},
                    {"sha256", io::sha256_file(c.spectral_file)}, {"radius", f.radius}};
    return f;
  }
  if (!c.field_file.empty()) {
    const auto g = io::read_field_csv(fs::path(c.field_file));
    check(g.grid.dim() == n && g.values.cols() == n, "field file does not match the tensor dimension");
    auto f = forward(g, c.trunc_k);
    m["initial"] = {{"source", "field_file"}, {"file", c.field_file}, {"sha256", io::sha256_file(c.field_file)},
                    {"radius", f.radius}, {"tail_mass", f.tail_mass}};
    return f;
  }
  if (c.init == "cos") {
    m["initial"] = {{"source", "cos"}, {"radius", c.trunc_k}};
    return cosine_field(n, c.trunc_k);
  }
  m["initial"] = {{"source", "random"}, {"data_radius", c.init_k}, {"radius", c.trunc_k},
                  {"rng", {{"generator", kGenerator}, {"seed", *c.seed}, {"stream", "2^64-1"}, {"batch", 0}}}};
  return random_real_field(n, c.init_k, c.trunc_k, *c.seed);
}

std::string ellipticity_csv(const EllipticityReport<double>& report, int n) {
  std::ostringstream s;
  for (int i = 0; i < n; ++i) s << "alpha" << i + 1 << ",";
  s << "lambda_min,exempt,flagged\n";
  for (const auto& e : report.entries) {
    for (int i = 0; i < n; ++i) s << e.alpha(i) << ",";
    s << num(e.lambda_min) << "," << int(e.exempt) << "," << int(e.flagged) << "\n";
  }
  return s.str();
}

std::string solution_csv(const SolveReport& r, int n) {
  std::ostringstream s;
  for (int i = 0; i < n; ++i) s << "x" << i + 1 << ",";
  for (int i = 0; i < n; ++i) {
    const auto c = std::to_string(i + 1);
    s << "mc_re" << c << ",mc_im" << c << ",std_error" << c << ",oracle_re" << c << ",closed_form_re" << c;
    s << (i + 1 < n ? "," : "\n");
  }
  for (std::size_t p = 0; p < r.points.size(); ++p) {
    for (int i = 0; i < n; ++i) s << num(r.points[p](i)) << ",";
    for (int i = 0; i < n; ++i) {
      s << num(r.mc_values[p](i).real()) << "," << num(r.mc_values[p](i).imag()) << "," << num(r.std_errors[p](i))
        << "," << num(r.oracle_values[p](i).real()) << "," << num(r.closed_form_values[p](i).real());
      s << (i + 1 < n ? "," : "\n");
    }
  }
  return s.str();
}

/// Spectral solution exp(-A_alpha t) f_alpha.
SpectralField<double> evolve_spectral(const CauchyProblem& problem) {
  SpectralField<double> u = problem.initial;
  const ModeBox box = u.box();
  for (std::size_t m = 0; m < box.size(); ++m) {
    const auto spec = make_spectrum(problem.tensor, box[m]);
    u.coeffs[m] = propagator(spec, problem.t).cast<std::complex<double>>() * u.coeffs[m];
  }
  return u;
}

json fd_cross_check(const RunConfig& c, const CauchyProblem& problem, Artifacts& out) {
  const TorusGrid grid(problem.dim(), c.grid);
  const auto start = std::chrono::steady_clock::now();
  const GridField<double> initial = inverse_on_grid(problem.initial, grid);
  const double dt = stable_time_step(problem.tensor, grid);
  const GridField<double> fd = march(problem.tensor, initial, problem.t, dt);
  const GridField<double> spectral = inverse_on_grid(evolve_spectral(problem), grid);
  const double denom = spectral.values.norm();
  const double rel = denom > 0 ? (fd.values - spectral.values).norm() / denom : (fd.values - spectral.values).norm();
  std::ostringstream s;
  io::write_field_csv(s, fd);
  out.write("fd.csv", s.str());
  return {{"grid", c.grid},
          {"dt", dt},
          {"steps", static_cast<long>(std::ceil(problem.t / dt - 1e-9))},
          {"relative_l2_vs_oracle", rel},
          {"seconds", seconds_since(start)}};
}

int solve_cauchy(const RunConfig& c, json& m, Artifacts& out) {
  const auto tensor = make_tensor(c, m);
  const int n = tensor.dim();
  CauchyProblem problem{tensor, make_initial(c, n, m), c.time};
  const int radius = problem.radius();

  const auto report = ellipticity_report(tensor, std::max(radius, 1));
  out.write("ellipticity.csv", ellipticity_csv(report, n));
  m["ellipticity"] = {{"radius", std::max(radius, 1)}, {"violations", report.violations().size()}};
  problem.validate();

  {
    std::ostringstream s;
    io::write_spectral_csv(s, problem.initial);
    out.write("initial_spectral.csv", s.str());
  }

  MonteCarloOptions options;
  options.samples = c.samples;
  options.seed = *c.seed;
  options.dt = c.dt;
  options.workers = c.workers;
  options.antithetic = c.antithetic;
  const auto points = lattice_points(n, c.eval_points);
  const SolveReport r = solve_monte_carlo(problem, points, options);
  out.write("solution.csv", solution_csv(r, n));

  std::size_t within = 0;
  std::size_t total = 0;
  json per_point = json::array();
  for (std::size_t p = 0; p < r.points.size(); ++p) {
    for (int i = 0; i < n; ++i) {
      const double diff = std::abs(r.mc_values[p](i) - r.oracle_values[p](i));
      within += diff <= 3 * r.std_errors[p](i) + 1e-12 ? 1 : 0;
      ++total;
    }
    per_point.push_back({{"x", vector_json(r.points[p])},
                         {"mc", complex_json(r.mc_values[p])},
                         {"std_error", vector_json(r.std_errors[p])},
                         {"oracle", complex_json(r.oracle_values[p])},
                         {"closed_form", complex_json(r.closed_form_values[p])}});
  }
  m["rng"] = rng_json(r.rng.seed);
  m["rng"]["samples"] = r.rng.samples;
  m["rng"]["units"] = r.rng.units;
  m["rng"]["batch_size"] = r.rng.batch_size;
  m["rng"]["batches"] = r.rng.batches;
  m["rng"]["streams"] = r.rng.streams;
  m["rng"]["antithetic"] = r.rng.antithetic;
  m["rng"]["stream_key"] = "(seed, canonical mode index of {alpha,-alpha}, batch)";
  m["result"] = {{"dim", n},
                 {"K", radius},
                 {"t", c.time},
                 {"dt", r.dt},
                 {"M", r.steps},
                 {"S", c.samples},
                 {"points", per_point},
                 {"within_3_sigma", within},
                 {"component_values", total},
                 {"truncation_tail", r.truncation_tail},
                 {"discretization_bias", r.discretization_bias},
                 {"max_imag", r.max_imag},
                 {"oracle_seconds", r.oracle_seconds},
                 {"mc_seconds", r.mc_seconds}};
  if (c.fd) m["fd"] = fd_cross_check(c, problem, out);
  return kExitOk;
}

double boundary_value(const std::string& kind, const Eigen::VectorXd& x) {
  return kind == "linear" ? x(0) : std::cos(2 * kPi<double> * x(0));
}

int solve_elliptic(const RunConfig& c, json& m, Artifacts& out) {
  ExitOptions options;
  options.samples = c.samples;
  options.seed = *c.seed;
  options.workers = c.workers;
  std::ostringstream s;

  if (c.elliptic == "scalar") {
    const int n = c.dim;
    const LatticePoint lo = LatticePoint::Zero(n);
    const LatticePoint hi = LatticePoint::Constant(n, c.cells);
    const auto domain = LatticeDomain::box(lo, hi, 1.0 / c.cells);
    LatticePoint start = LatticePoint::Constant(n, c.cells / 2);
    if (!c.start.empty())
      for (int i = 0; i < n; ++i) start(i) = c.start[static_cast<std::size_t>(i)];
    const std::string kind = c.boundary;
    const ExitResult r =
        solve_dirichlet_scalar(domain, [&](const Eigen::VectorXd& x) { return boundary_value(kind, x); }, start, options);
    const Eigen::VectorXd x = domain.position(start);
    s << "value,std_error,mean_exit_steps,exit_steps_std_error\n"
      << num(r.value) << "," << num(r.std_error) << "," << num(r.mean_exit_steps) << ","
      << num(r.exit_steps_std_error) << "\n";
    m["domain"] = {{"shape", "box"}, {"cells", c.cells}, {"spacing", domain.spacing()}, {"dt", domain.dt()}};
    m["result"] = {{"start", vector_json(x)},
                   {"value", r.value},
                   {"std_error", r.std_error},
                   {"mean_exit_steps", r.mean_exit_steps},
                   {"samples", r.samples}};
    // x_1 is discrete harmonic for the diagonal walk, so the linear problem has an exact answer
    if (kind == "linear") m["result"]["exact"] = x(0);
  } else {
    const auto tensor = make_tensor(c, m);
    const int n = tensor.dim();
    const TorusGrid grid(n, c.grid);
    std::vector<bool> inside(grid.size());
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const Eigen::VectorXi cell = grid.cell(p);
      bool in = true;
      for (int i = 0; i < n; ++i) in = in && 2 * std::abs(cell(i) - c.grid / 2) < c.cells;
      inside[p] = in;
    }
    const auto domain = LatticeDomain::mask(grid, inside);
    LatticePoint start = LatticePoint::Constant(n, c.grid / 2);
    if (!c.start.empty())
      for (int i = 0; i < n; ++i) start(i) = c.start[static_cast<std::size_t>(i)];
    const SpectralField<double> boundary = c.init == "cos" ? cosine_field(n, std::max(c.trunc_k, 1))
                                                           : random_real_field(n, c.init_k, c.trunc_k, *c.seed);
    const auto r = solve_dirichlet_system_experimental(tensor, domain, boundary, start, options);
    s << "component,value_re,value_im,std_error\n";
    for (int i = 0; i < n; ++i)
      s << i + 1 << "," << num(r.value(i).real()) << "," << num(r.value(i).imag()) << "," << num(r.std_error(i))
        << "\n";
    m["domain"] = {{"shape", "torus_mask"}, {"grid", c.grid}, {"cells", c.cells}, {"spacing", domain.spacing()}};
    m["result"] = {{"experimental", r.experimental},
                   {"start", std::vector<long>(start.data(), start.data() + n)},
                   {"value", complex_json(r.value)},
                   {"std_error", vector_json(r.std_error)},
                   {"max_imag", r.max_imag},
                   {"mean_exit_steps", r.mean_exit_steps}};
  }
  out.write("elliptic.csv", s.str());
  m["rng"] = rng_json(*c.seed);
  m["rng"]["samples"] = c.samples;
  m["rng"]["batch_size"] = options.batch_size;
  m["rng"]["stream_key"] = "(seed, 0, batch)";
  return kExitOk;
}

int mode_factor(const RunConfig& c, json& m, Artifacts& out) {
  const auto tensor = make_tensor(c, m);
  const int n = tensor.dim();
  const auto spectra = mode_spectra(tensor, c.trunc_k);
  std::ostringstream s;
  for (int i = 0; i < n; ++i) s << "alpha" << i + 1 << ",";
  s << "dt,steps,max_error\n";
  json levels = json::array();
  double previous = 0;
  for (int level = 0; level < c.levels; ++level) {
    const double dt = std::ldexp(c.dt, -level);
    const Timeline timeline = Timeline::from_horizon(c.time, dt);
    double worst = 0;
    for (const auto& spec : spectra) {
      const double err = max_abs(Eigen::MatrixXd(mode_factor_closed_form(spec, timeline) - propagator(spec, c.time)));
      worst = std::max(worst, err);
      for (int i = 0; i < n; ++i) s << spec.alpha(i) << ",";
      s << num(dt) << "," << timeline.steps << "," << num(err) << "\n";
    }
    json row = {{"dt", dt}, {"steps", timeline.steps}, {"max_error", worst}};
    if (level > 0 && worst > 0) row["ratio_to_previous"] = previous / worst;
    levels.push_back(row);
    previous = worst;
  }
  out.write("mode_factor.csv", s.str());
  m["result"] = {{"K", c.trunc_k}, {"t", c.time}, {"modes", spectra.size()}, {"levels", levels}};
  return kExitOk;
}

int validate_clt(const RunConfig& c, json& m, Artifacts& out) {
  const auto rows = clt_check(c.clt_trials, c.clt_p);
  std::ostringstream s;
  s << "m,x,scaled_binomial,gaussian,abs_error\n";
  double worst = 0;
  for (const auto& r : rows) {
    const double err = std::abs(r.scaled_binomial - r.gaussian);
    worst = std::max(worst, err);
    s << r.m << "," << num(r.x) << "," << num(r.scaled_binomial) << "," << num(r.gaussian) << "," << num(err) << "\n";
  }
  out.write("clt.csv", s.str());
  const bool pass = worst <= c.clt_tol;
  m["result"] = {{"trials", c.clt_trials}, {"p", c.clt_p}, {"rows", rows.size()}, {"max_error", worst},
                 {"tolerance", c.clt_tol}, {"pass", pass}};
  return pass ? kExitOk : kExitFailure;
}

int validate_ito(const RunConfig& c, json& m, Artifacts& out) {
  const auto v = ito_validation(c.time, c.dt, c.paths, *c.seed);
  std::ostringstream s;
  s << "check,value\n"
    << "linear_max," << num(v.linear_max) << "\n"
    << "quadratic_max," << num(v.quadratic_max) << "\n"
    << "cos_max," << num(v.cos_max) << "\n"
    << "cos_max_half_dt," << num(v.cos_max_half) << "\n"
    << "ratio," << num(v.ratio) << "\n";
  out.write("ito.csv", s.str());
  const bool pass = v.linear_max <= 1e-12 && v.quadratic_max <= 1e-12 && v.ratio >= 1.2 && v.ratio <= 4.0;
  m["rng"] = rng_json(*c.seed);
  m["rng"]["stream_key"] = "(seed, 0|1|2, 0) for polynomial, cos at dt, cos at dt/2";
  m["result"] = {{"paths", c.paths}, {"t", c.time}, {"dt", c.dt}, {"linear_max", v.linear_max},
                 {"quadratic_max", v.quadratic_max}, {"cos_max", v.cos_max}, {"cos_max_half_dt", v.cos_max_half},
                 {"ratio", v.ratio}, {"pass", pass}};
  return pass ? kExitOk : kExitFailure;
}

int validate_density(const RunConfig& c, json& m, Artifacts& out) {
  const auto v = density_validation(c.steps, c.dim, c.samples, *c.seed);
  std::ostringstream s;
  for (int i = 0; i < c.dim; ++i) s << "k" << i + 1 << ",";
  s << "position1,enumerated,binomial,sampled\n";
  for (const auto& [k, p] : v.enumerated.probability) {
    double expect = 1;
    for (auto kj : k) {
      s << kj << ",";
      expect *= binomial_site_probability(c.steps, static_cast<long>(kj));
    }
    s << num(v.enumerated.spacing * static_cast<double>(k[0])) << "," << num(p) << "," << num(expect) << ","
      << num(v.sampled.at(k)) << "\n";
  }
  out.write("density.csv", s.str());
  const bool pass = v.binomial_max_error <= 1e-15 && v.total_error <= 1e-12 && v.heat_recursion_error <= 1e-15;
  m["rng"] = rng_json(*c.seed);
  m["rng"]["samples"] = c.samples;
  m["rng"]["stream_key"] = "(seed, 0, 0)";
  m["result"] = {{"M", c.steps}, {"dim", c.dim}, {"paths", v.enumerated.paths},
                 {"sites", v.enumerated.probability.size()}, {"binomial_max_error", v.binomial_max_error},
                 {"total_error", v.total_error}, {"heat_recursion_error", v.heat_recursion_error},
                 {"sampled_max_z", v.sampled_max_z}, {"pass", pass}};
  return pass ? kExitOk : kExitFailure;
}

int lame_demo(const RunConfig& config, json& m, Artifacts& out) {
  RunConfig c = config;
  c.tensor = "lame";
  const double a = lame_coefficient(c.dim, c.nu);
  m["lame"] = {{"nu", c.nu}, {"dim", c.dim}, {"a", a}};
  const auto tensor = lame_tensor(c.dim, a);
  const auto spectra = mode_spectra(tensor, std::max(c.trunc_k, 1));
  std::ostringstream s;
  for (int i = 0; i < c.dim; ++i) s << "alpha" << i + 1 << ",";
  for (int i = 0; i < c.dim; ++i) s << "lambda" << i + 1 << (i + 1 < c.dim ? "," : "\n");
  for (const auto& spec : spectra) {
    for (int i = 0; i < c.dim; ++i) s << spec.alpha(i) << ",";
    for (int i = 0; i < c.dim; ++i) s << num(spec.lambda(i)) << (i + 1 < c.dim ? "," : "\n");
  }
  out.write("spectrum.csv", s.str());
  return solve_cauchy(c, m, out);
}

int dispatch(const RunConfig& c, json& m, Artifacts& out) {
  if (c.command == "solve-cauchy") return solve_cauchy(c, m, out);
  if (c.command == "solve-elliptic") return solve_elliptic(c, m, out);
  if (c.command == "mode-factor") return mode_factor(c, m, out);
  if (c.command == "lame-demo") return lame_demo(c, m, out);
  if (c.validator == "clt") return validate_clt(c, m, out);
  if (c.validator == "ito") return validate_ito(c, m, out);
  return validate_density(c, m, out);
}

json error_json(const Error& e) {
  json j = {{"error", to_string(e.kind())}, {"message", e.what()}};
  if (const auto* ev = dynamic_cast<const EllipticityViolation*>(&e)) {
    j["alpha"] = std::vector<int>(ev->alpha().data(), ev->alpha().data() + ev->alpha().size());
    j["lambda_min"] = ev->lambda_min();
  }
  return j;
}

}  // namespace

int run(const RunConfig& config) {
  try {
    validate_config(config);
  } catch (const Error& e) {
    std::cerr << error_json(e).dump() << "\n";
    return kExitConfig;
  }

  std::unique_ptr<Artifacts> out;
  try {
    out = std::make_unique<Artifacts>(fs::path(config.out));
    json manifest;
    manifest["command"] = config.command;
    manifest["config"] = config_json(config);
    const auto start = std::chrono::steady_clock::now();
    const int code = dispatch(config, manifest, *out);
    manifest["seconds"] = seconds_since(start);
    manifest["exit_code"] = code;
    manifest["outputs"] = out->files();
    out->write_raw("manifest.json", manifest.dump(2) + "\n");
    return code;
  } catch (const Error& e) {
    const json record = error_json(e);
    std::cerr << record.dump() << "\n";
    if (out) {
      try {
        out->write_raw("error.json", record.dump(2) + "\n");
      } catch (const std::exception&) {
      }
    }
    return e.kind() == ErrorKind::ConfigError ? kExitConfig : kExitFailure;
  } catch (const std::exception& e) {
    const json record = {{"error", "Internal"}, {"message", e.what()}};
    std::cerr << record.dump() << "\n";
    return kExitFailure;
  }
}

int run_cli(const std::vector<std::string>& args) {
  RunConfig c;
  std::uint64_t seed = 0;
  CLI::App app{"Parabolic and elliptic solvers on the torus driven by generalized Brownian motion", "gbm"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key = value file; command-line flags take precedence");

  CLI::Option* seed_opt = app.add_option("--seed", seed, "master RNG seed (required)");
  app.add_option("--tensor", c.tensor, "lame, scalar, or a tensor file");
  app.add_option("--nu", c.nu, "Poisson ratio for lame, a = 1 - nu (n-1)");
  app.add_option("--dim", c.dim, "space dimension n");
  app.add_option("--trunc-k", c.trunc_k, "Fourier truncation radius K");
  app.add_option("--grid", c.grid, "grid points per axis G");
  app.add_option("--dt", c.dt, "walk time step");
  app.add_option("--time", c.time, "horizon t");
  app.add_option("--samples", c.samples, "Monte-Carlo samples S");
  app.add_option("--workers", c.workers, "worker threads (results do not depend on it)");
  app.add_option("--out", c.out, "output directory");
  app.add_option("--init", c.init, "initial data: cos or random");
  app.add_option("--init-k", c.init_k, "radius of random band-limited data");
  app.add_option("--field-file", c.field_file, "initial data as field CSV");
  app.add_option("--spectral-file", c.spectral_file, "initial data as spectral CSV");
  app.add_option("--eval-points", c.eval_points, "evaluation points per axis");
  app.add_flag("--fd", c.fd, "finite-difference cross-check on the grid");
  app.add_flag("--antithetic,!--no-antithetic", c.antithetic, "antithetic path pairs");
  app.add_option("--elliptic", c.elliptic, "scalar or system");
  app.add_option("--cells", c.cells, "domain width in lattice cells");
  app.add_option("--start", c.start, "start lattice point")->expected(1, 6);
  app.add_option("--boundary", c.boundary, "scalar boundary data: linear or cos");
  app.add_option("--levels", c.levels, "number of dt halvings in mode-factor");
  app.add_option("--clt-trials", c.clt_trials, "Bernoulli trials n");
  app.add_option("--clt-p", c.clt_p, "success probability p");
  app.add_option("--clt-tol", c.clt_tol, "pass tolerance");
  app.add_option("--steps", c.steps, "walk steps M for density validation");
  app.add_option("--paths", c.paths, "paths for the Ito validation");

  app.add_subcommand("solve-cauchy", "Monte-Carlo solve of the parabolic system with spectral oracle");
  app.add_subcommand("solve-elliptic", "Dirichlet problem by exit-time sampling");
  app.add_subcommand("mode-factor", "closed-form mode factors against the propagator over dt levels");
  app.add_subcommand("lame-demo", "Lame system run parameterized by nu");
  CLI::App* validate = app.add_subcommand("validate", "module validators");
  validate->add_option("validator", c.validator, "clt, ito or density")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }
  c.command = app.get_subcommands().front()->get_name();
  if (seed_opt->count() > 0) c.seed = seed;
  return run(c);
}

int run_cli(int argc, char** argv) { return run_cli(std::vector<std::string>(argv, argv + argc)); }

}  // namespace gbm::cli
