#include "minkhoro/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "minkhoro/boundary.hpp"
#include "minkhoro/config.hpp"
#include "minkhoro/errors.hpp"
#include "minkhoro/horosphere.hpp"
#include "minkhoro/parallel.hpp"
#include "minkhoro/verify.hpp"

namespace mh {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// Options shared by all subcommands plus the per-command extras.
struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> grid_step;
  std::optional<double> tol;
  std::string out;
  std::string format;
  std::string id;
  double level = 0.0;
  std::optional<double> lo, hi;
  int resolution = 0;
  std::vector<double> xi;
  std::vector<std::string> ids;
};

// Controlled exit carrying its own status, e.g. an empty level set.
struct Exit {
  int code;
  std::string message;
};

// What a subcommand produced: the report and, when available, a table and a
// drawing. Writers are called at most once.
struct Output {
  json report;
  std::function<void(std::ostream&)> csv;
  std::function<void(std::ostream&)> svg;
  int code = kExitOk;
};

json vec(const Eigen::Ref<const Vector>& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c == '\n' ? ' ' : c;
  }
  return q + "\"";
}

std::string coordinate_header(int n, const char* prefix = "x") {
  std::string h;
  for (int i = 1; i <= n; ++i) h += (i > 1 ? "," : "") + std::string(prefix) + std::to_string(i);
  return h;
}

void write_row(std::ostream& os, const Eigen::Ref<const Vector>& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << format_number(v(i));
}

class Session {
 public:
  Session(std::string command, const Options& o, bool config_required) : command_(std::move(command)), o_(o) {
    if (o.config.empty()) {
      if (config_required) throw ArgumentError("--config is required for " + command_);
      const std::string label = "builtin:paper";
      cfg_.emplace(label, fnv1a64(label), "paper", paper_norm());
    } else {
      ConfigLoadOptions lo;
      lo.validate_custom = command_ != "validate";
      cfg_.emplace(load_config(o.config, lo));
    }
    RunConfig& c = *cfg_;
    if (o.seed) {
      c.seed = *o.seed;
      c.validation.seed = *o.seed;
    }
    if (o.grid_step) {
      if (!(*o.grid_step > 0.0) || !std::isfinite(*o.grid_step)) throw ArgumentError("--grid-step must be positive");
      c.grid.step = *o.grid_step;
    }
    if (o.tol) {
      if (!(*o.tol > 0.0) || !std::isfinite(*o.tol)) throw ArgumentError("--tol must be positive");
      c.tolerances.equivalence = *o.tol;
      c.tolerances.busemann = *o.tol;
      c.schedule.tolerance = *o.tol;
    }
  }

  const RunConfig& cfg() const { return *cfg_; }
  const SingularNorm& norm() const { return cfg_->norm; }
  int dimension() const { return cfg_->norm.dimension(); }
  PointGrid grid() const { return cfg_->grid.make(dimension()); }

  const std::string& id() const {
    if (o_.id.empty()) throw ArgumentError("--id is required for " + command_);
    return o_.id;
  }

  json provenance() const {
    const RunConfig& c = *cfg_;
    json j;
    j["command"] = command_;
    j["config"] = c.source;
    j["config_hash"] = hex64(c.hash);
    j["norm"] = c.norm_label;
    j["dimension"] = dimension();
    j["seed"] = c.seed;
    j["tolerances"] = {{"equivalence", c.tolerances.equivalence},
                       {"busemann", c.tolerances.busemann},
                       {"schedule", c.schedule.tolerance},
                       {"schedule_max_steps", c.schedule.max_steps},
                       {"override", o_.tol ? json(*o_.tol) : json(nullptr)}};
    return j;
  }

 private:
  std::string command_;
  const Options& o_;
  std::optional<RunConfig> cfg_;
};

// validate ---------------------------------------------------------------

Output cmd_validate(const Session& s) {
  const NormValidationReport rep = validate_norm(s.norm(), s.cfg().validation);
  Output out;
  json& j = out.report;
  j = s.provenance();
  j["passed"] = rep.passed;
  j["samples"] = rep.samples;
  j["validation_seed"] = rep.seed;
  j["symmetry_error"] = rep.symmetry_error;
  j["homogeneity_error"] = rep.homogeneity_error;
  j["triangle_violation"] = rep.triangle_violation;
  j["min_convexity_margin"] = rep.min_convexity_margin;
  j["findings"] = rep.findings;
  // Sequences are checked only when the norm itself is sound.
  json seqs = json::array();
  if (rep.passed)
    for (const SequenceConfig& sc : s.cfg().sequences) {
      const ValidationReport v = validate_flag_directed(s.norm(), make_sequence(sc));
      seqs.push_back({{"id", sc.id}, {"valid", v.valid}, {"bounded", v.bounded}, {"level", v.level},
                      {"findings", v.findings}});
    }
  j["sequences"] = seqs;
  out.code = rep.passed ? kExitOk : kExitFailure;
  out.csv = [rep](std::ostream& os) {
    os << "metric,value\n";
    os << "passed," << (rep.passed ? 1 : 0) << "\n";
    os << "samples," << rep.samples << "\n";
    os << "symmetry_error," << format_number(rep.symmetry_error) << "\n";
    os << "homogeneity_error," << format_number(rep.homogeneity_error) << "\n";
    os << "triangle_violation," << format_number(rep.triangle_violation) << "\n";
    os << "min_convexity_margin," << format_number(rep.min_convexity_margin) << "\n";
  };
  return out;
}

// horofunction -------------------------------------------------------------

json flag_json(const FlagMetadata& f) {
  json dirs = json::array();
  for (const Vector& d : f.directions) dirs.push_back(vec(d));
  return {{"level", f.level}, {"directions", dirs}, {"plane_through", vec(f.plane_through)}};
}

Output cmd_horofunction(const Session& s) {
  const PointGrid grid = s.grid();
  const Horofunction f = build_horofunction(s.cfg(), s.id(), grid);
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { values[i] = f(grid.points[i]); });

  Output out;
  json& j = out.report;
  j = s.provenance();
  j["id"] = f.id();
  j["provenance"] = to_string(f.provenance());
  j["base"] = vec(f.base());
  j["depth"] = f.depth();
  if (f.ray()) j["ray"] = {{"origin", vec(f.ray()->origin)}, {"direction", vec(f.ray()->direction.vector())}};
  if (f.flag()) j["flag"] = flag_json(*f.flag());
  j["grid"] = {{"lo", grid.lo}, {"hi", grid.hi}, {"step", grid.step}, {"points", grid.size()}};
  json rows = json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    json r = vec(grid.points[i]);
    r.push_back(values[i]);
    rows.push_back(std::move(r));
  }
  j["values"] = std::move(rows);
  const int n = s.dimension();
  out.csv = [grid, values, n](std::ostream& os) {
    os << coordinate_header(n) << ",level\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      write_row(os, grid.points[i]);
      os << ',' << format_number(values[i]) << '\n';
    }
  };
  return out;
}

// project ----------------------------------------------------------------

Output cmd_project(const Session& s, const Options& o) {
  const Horofunction f = build_horofunction(s.cfg(), s.id(), s.grid());
  ProjectionOptions po;
  if (o.tol) po.min_tolerance = *o.tol;
  const ProjectionResult r = project_coarse_to_weak_detailed(s.norm(), CoarsePoint{f}, po);
  const Direction& d = r.point.direction;

  Output out;
  json& j = out.report;
  j = s.provenance();
  j["id"] = f.id();
  j["direction"] = vec(d.vector());
  j["raw_direction"] = vec(r.raw_direction);
  j["regularity"] = to_string(classify_direction(s.norm(), d));
  j["max_min_deviation"] = r.max_min_deviation;
  j["drift"] = r.drift;
  json minima = json::array();
  for (std::size_t i = 0; i < r.minima.size(); ++i)
    minima.push_back({{"radius", po.radii[i]},
                      {"minimizer", vec(r.minima[i].point)},
                      {"value", r.minima[i].value},
                      {"unique", r.minima[i].unique}});
  j["minima"] = minima;
  const int n = s.dimension();
  out.csv = [r, radii = po.radii, n](std::ostream& os) {
    os << "radius," << coordinate_header(n) << ",value\n";
    for (std::size_t i = 0; i < r.minima.size(); ++i) {
      os << format_number(radii[i]) << ',';
      write_row(os, r.minima[i].point);
      os << ',' << format_number(r.minima[i].value) << '\n';
    }
  };
  return out;
}

// levelset ---------------------------------------------------------------

Output cmd_levelset(const Session& s, const Options& o) {
  const int n = s.dimension();
  const double lo = o.lo.value_or(s.cfg().grid.lo);
  const double hi = o.hi.value_or(s.cfg().grid.hi);
  if (!(hi > lo)) throw ArgumentError("levelset: --hi must exceed --lo");
  const int res = o.resolution > 0 ? o.resolution : 200;
  const Horofunction f = build_horofunction(s.cfg(), s.id(), s.grid());
  const HoroballSample sample = horosphere_sample(s.norm(), f, o.level, BoundingBox::cube(n, lo, hi), res);
  if (sample.empty())
    throw Exit{kExitEmptyLevel, "empty level set: " + (sample.diagnostic.empty() ? f.id() : sample.diagnostic)};

  Output out;
  json& j = out.report;
  j = s.provenance();
  j["id"] = f.id();
  j["level"] = o.level;
  j["box"] = {{"lo", lo}, {"hi", hi}};
  j["resolution"] = res;
  j["points"] = sample.points.size();
  j["polylines"] = sample.polylines.size();
  if (!sample.diagnostic.empty()) j["diagnostic"] = sample.diagnostic;
  out.csv = [sample](std::ostream& os) { write_csv(os, sample); };
  if (n == 2) out.svg = [sample](std::ostream& os) { write_svg(os, sample); };
  return out;
}

// fiber ------------------------------------------------------------------

Output cmd_fiber(const Session& s, const Options& o) {
  const RunConfig& c = s.cfg();
  Vector xi;
  if (!o.xi.empty())
    xi = Eigen::Map<const Vector>(o.xi.data(), static_cast<Eigen::Index>(o.xi.size()));
  else if (c.fiber_xi)
    xi = *c.fiber_xi;
  else
    throw ArgumentError("fiber: no direction (use --xi or the fiber section)");
  if (xi.size() != s.dimension()) throw ArgumentError("fiber: --xi has the wrong dimension");

  std::vector<std::string> ids = !o.ids.empty() ? o.ids : c.fiber_candidates;
  if (ids.empty())
    for (const auto& h : c.horofunctions) ids.push_back(h.id);
  if (ids.empty()) throw ArgumentError("fiber: no candidates");
  const PointGrid grid = s.grid();
  std::vector<CoarsePoint> candidates;
  for (const auto& id : ids) candidates.push_back(CoarsePoint{build_horofunction(c, id, grid)});
  const FiberReport rep = explore_fiber(s.norm(), WeakPoint{Direction::normalize(s.norm(), xi)}, candidates, grid,
                                        c.tolerances.equivalence, c.tolerances.busemann);

  Output out;
  json& j = out.report;
  j = s.provenance();
  j["xi"] = vec(rep.xi);
  j["classes"] = rep.classes;
  j["min_class_separation"] = finite_or_null(rep.min_class_separation);
  json entries = json::array();
  for (const FiberEntry& e : rep.entries) {
    json je;
    je["id"] = e.id;
    je["projection"] = e.projection ? vec(*e.projection) : json(nullptr);
    je["included"] = e.included;
    je["class"] = e.class_id;
    je["verdict"] = to_string(e.verdict.kind);
    je["mismatch"] = finite_or_null(e.verdict.mismatch);
    je["note"] = e.note;
    entries.push_back(std::move(je));
  }
  j["entries"] = std::move(entries);
  const int n = s.dimension();
  out.csv = [rep, n](std::ostream& os) {
    os << "id,included,class,verdict," << coordinate_header(n, "d") << '\n';
    for (const FiberEntry& e : rep.entries) {
      os << csv_quote(e.id) << ',' << (e.included ? 1 : 0) << ',' << e.class_id << ',' << to_string(e.verdict.kind);
      for (int i = 0; i < n; ++i) os << ',' << (e.projection ? format_number((*e.projection)(i)) : "");
      os << '\n';
    }
  };
  return out;
}

// classify ---------------------------------------------------------------

Output cmd_classify(const Session& s, const Options& o) {
  const int res = o.resolution > 0 ? o.resolution : 3600;
  const RegularityReport rep = classify_space_regularity(s.norm(), res);

  Output out;
  json& j = out.report;
  j = s.provenance();
  j["resolution"] = res;
  j["sampled"] = rep.sampled;
  j["regular"] = rep.regular;
  json sing = json::array();
  for (std::size_t i = 0; i < rep.singular.size(); ++i)
    sing.push_back({{"direction", vec(rep.singular[i].vector())}, {"width", rep.widths[i]}});
  j["singular"] = sing;
  const int n = s.dimension();
  out.csv = [rep, n](std::ostream& os) {
    os << coordinate_header(n) << ",width\n";
    for (std::size_t i = 0; i < rep.singular.size(); ++i) {
      write_row(os, rep.singular[i].vector());
      os << ',' << format_number(rep.widths[i]) << '\n';
    }
  };
  return out;
}

// verify-paper -----------------------------------------------------------

Output cmd_verify(const Session& s, const Options& o) {
  VerifyOptions vo;
  vo.tolerance = o.tol;
  vo.seed = s.cfg().seed;
  vo.grid_step = s.cfg().grid.step;
  vo.schedule = s.cfg().schedule;
  const VerifyReport rep = run_verification(s.norm(), vo);

  Output out;
  json& j = out.report;
  j = s.provenance();
  j["reference_norm"] = rep.reference_norm;
  j["passed"] = rep.passed();
  json crit = json::array();
  for (const CriterionResult& c : rep.criteria)
    crit.push_back({{"number", c.number},
                    {"title", c.title},
                    {"status", to_string(c.status)},
                    {"detail", c.detail},
                    {"seconds", c.seconds}});
  j["criteria"] = std::move(crit);
  out.code = rep.passed() ? kExitOk : kExitFailure;
  // Timings stay out of the table so it is reproducible.
  out.csv = [rep](std::ostream& os) {
    os << "criterion,status,title,detail\n";
    for (const CriterionResult& c : rep.criteria)
      os << c.number << ',' << to_string(c.status) << ',' << csv_quote(c.title) << ',' << csv_quote(c.detail) << '\n';
  };
  return out;
}

// output -----------------------------------------------------------------

void emit(const std::string& command, const std::string& format, const std::string& dir, const Output& result,
          std::ostream& out) {
  const std::function<void(std::ostream&)>* writer = nullptr;
  if (format == "csv") writer = &result.csv;
  if (format == "svg") writer = &result.svg;
  if (writer && !*writer) throw ArgumentError(format + " output is not available for " + command);

  const auto write_report = [&](std::ostream& os) { os << result.report.dump(2) << '\n'; };
  if (dir.empty()) {
    if (writer)
      (*writer)(out);
    else
      write_report(out);
    return;
  }
  fs::create_directories(dir);
  const auto write_file = [&](const std::string& name, const std::function<void(std::ostream&)>& w) {
    const fs::path p = fs::path(dir) / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ArgumentError("cannot write " + p.string());
    w(f);
    out << p.string() << '\n';
  };
  if (writer) {
    write_file(command + "." + format, *writer);
    write_file(command + ".report.json", write_report);
  } else {
    write_file(command + ".json", write_report);
  }
}

std::string located(const ConfigError& e, const std::string& source) {
  std::string where = source.empty() ? "<config>" : source;
  if (e.line() > 0) where += ":" + std::to_string(e.line()) + ":" + std::to_string(std::max(e.column(), 1));
  return where + ": " + e.what();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Horofunctions and ideal boundaries of singular Minkowski spaces", "mh"};
  app.require_subcommand(1);
  Options o;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "YAML run configuration");
    sub->add_option("--seed", o.seed, "random seed (overrides the config)");
    sub->add_option("--grid-step", o.grid_step, "probe grid step (overrides the config)");
    sub->add_option("--tol", o.tol, "comparison tolerance override");
    sub->add_option("--out", o.out, "directory for output files");
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "svg", "report"}));
  };
  const auto with_id = [&](CLI::App* sub) { sub->add_option("--id", o.id, "horofunction or sequence id"); };

  CLI::App* validate = app.add_subcommand("validate", "run the norm invariant battery");
  CLI::App* horofunction = app.add_subcommand("horofunction", "evaluate a horofunction on the probe grid");
  CLI::App* project = app.add_subcommand("project", "project a horofunction to the weak boundary");
  CLI::App* levelset = app.add_subcommand("levelset", "extract a horosphere inside a box");
  CLI::App* fiber = app.add_subcommand("fiber", "explore the fiber over a direction");
  CLI::App* classify = app.add_subcommand("classify", "sweep directions for singular points");
  CLI::App* verify = app.add_subcommand("verify-paper", "run the acceptance battery");
  for (CLI::App* sub : {validate, horofunction, project, levelset, fiber, classify, verify}) common(sub);
  for (CLI::App* sub : {horofunction, project, levelset}) with_id(sub);
  levelset->add_option("--level", o.level, "level value");
  levelset->add_option("--lo", o.lo, "box lower bound (default grid lo)");
  levelset->add_option("--hi", o.hi, "box upper bound (default grid hi)");
  levelset->add_option("--resolution", o.resolution, "cells per axis (default 200)")->check(CLI::PositiveNumber);
  classify->add_option("--resolution", o.resolution, "sampled directions (default 3600)")->check(CLI::PositiveNumber);
  fiber->add_option("--xi", o.xi, "direction, e.g. --xi 1 0")->expected(1, -1);
  fiber->add_option("--ids", o.ids, "candidate ids")->expected(1, -1);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string command = chosen->get_name();
  std::optional<Session> session;
  std::string format = o.format.empty() ? "report" : o.format;
  try {
    session.emplace(command, o, command != "verify-paper");
    if (o.format.empty()) format = session->cfg().output.format;
    const std::string dir = !o.out.empty() ? o.out : session->cfg().output.dir;
    Output result;
    if (chosen == validate) result = cmd_validate(*session);
    if (chosen == horofunction) result = cmd_horofunction(*session);
    if (chosen == project) result = cmd_project(*session, o);
    if (chosen == levelset) result = cmd_levelset(*session, o);
    if (chosen == fiber) result = cmd_fiber(*session, o);
    if (chosen == classify) result = cmd_classify(*session, o);
    if (chosen == verify) result = cmd_verify(*session, o);
    result.report["exit_code"] = result.code;
    emit(command, format, dir, result, out);
    return result.code;
  } catch (...) {
    int code = kExitFailure;
    std::string message;
    try {
      throw;
    } catch (const Exit& e) {
      code = e.code;
      message = e.message;
    } catch (const ConfigError& e) {
      code = kExitUsage;
      message = located(e, o.config);
    } catch (const ArgumentError& e) {
      code = kExitUsage;
      message = e.what();
    } catch (const LimitError& e) {
      code = kExitLimit;
      message = e.what();
    } catch (const std::exception& e) {
      message = e.what();
    }
    err << "mh " << command << ": " << message << '\n';
    if (format == "report") {
      json j = session ? session->provenance() : json{{"command", command}};
      j["status"] = "error";
      j["exit_code"] = code;
      j["message"] = message;
      out << j.dump(2) << '\n';
    }
    return code;
  }
}

}  // namespace mh
