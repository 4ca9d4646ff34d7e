#include "minkhoro/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "minkhoro/errors.hpp"

namespace mh {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const SequenceConfig* RunConfig::find_sequence(const std::string& id) const {
  for (const auto& s : sequences)
    if (s.id == id) return &s;
  return nullptr;
}

const HorofunctionConfig* RunConfig::find_horofunction(const std::string& id) const {
  for (const auto& h : horofunctions)
    if (h.id == id) return &h;
  return nullptr;
}

namespace {

[[noreturn]] void fail(const YAML::Node& at, const std::string& msg) {
  const YAML::Mark m = at.Mark();
  throw ConfigError(msg, m.line < 0 ? -1 : m.line + 1, m.column < 0 ? -1 : m.column + 1);
}

void require_map(const YAML::Node& n, const std::string& what) {
  if (!n.IsMap()) fail(n, what + " must be a mapping");
}

void allow_keys(const YAML::Node& map, const std::string& section, std::initializer_list<const char*> keys) {
  for (auto it = map.begin(); it != map.end(); ++it) {
    const std::string k = it->first.as<std::string>();
    bool ok = false;
    for (const char* a : keys) ok = ok || k == a;
    if (!ok) fail(it->first, "unknown key '" + k + "' in " + section);
  }
}

YAML::Node need(const YAML::Node& map, const char* key, const std::string& section) {
  const YAML::Node n = map[key];
  if (!n) fail(map, "missing key '" + std::string(key) + "' in " + section);
  return n;
}

double as_double(const YAML::Node& n, const std::string& what) {
  double d = 0.0;
  if (!n.IsScalar() || !YAML::convert<double>::decode(n, d) || !std::isfinite(d)) fail(n, what + " must be a finite number");
  return d;
}

double as_positive(const YAML::Node& n, const std::string& what) {
  const double d = as_double(n, what);
  if (!(d > 0.0)) fail(n, what + " must be positive");
  return d;
}

long long as_integer(const YAML::Node& n, const std::string& what) {
  long long v = 0;
  if (!n.IsScalar() || !YAML::convert<long long>::decode(n, v)) fail(n, what + " must be an integer");
  return v;
}

std::string as_string(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar()) fail(n, what + " must be a string");
  return n.Scalar();
}

Vector as_vector(const YAML::Node& n, const std::string& what, int dimension = -1) {
  if (!n.IsSequence()) fail(n, what + " must be a list of numbers");
  if (dimension >= 0 && static_cast<int>(n.size()) != dimension)
    fail(n, what + " must have " + std::to_string(dimension) + " entries");
  Vector v(static_cast<Eigen::Index>(n.size()));
  for (std::size_t i = 0; i < n.size(); ++i) v(static_cast<Eigen::Index>(i)) = as_double(n[i], what);
  return v;
}

Matrix as_matrix(const YAML::Node& n, const std::string& what, int dimension) {
  if (!n.IsSequence() || static_cast<int>(n.size()) != dimension)
    fail(n, what + " must be a " + std::to_string(dimension) + "x" + std::to_string(dimension) + " matrix");
  Matrix m(dimension, dimension);
  for (int i = 0; i < dimension; ++i) m.row(i) = as_vector(n[i], what, dimension).transpose();
  return m;
}

int as_dimension(const YAML::Node& map) {
  const YAML::Node n = need(map, "dimension", "norm");
  const long long d = as_integer(n, "dimension");
  if (d < kMinDimension || d > kMaxDimension) fail(n, "dimension must be in [2, 4]");
  return static_cast<int>(d);
}

// Wraps library argument errors raised while building from a node.
template <typename F>
auto at_node(const YAML::Node& n, F&& build) -> decltype(build()) {
  try {
    return build();
  } catch (const ArgumentError& e) {
    fail(n, e.what());
  }
}

SingularNorm parse_norm(const YAML::Node& n, std::string& label, const ConfigLoadOptions& options) {
  require_map(n, "norm");
  if (const YAML::Node b = n["builtin"]) {
    allow_keys(n, "norm", {"builtin", "singular_directions"});
    label = as_string(b, "builtin");
    SingularNorm nm = at_node(b, [&] { return builtin_norm(label); });
    if (const YAML::Node sd = n["singular_directions"]) {
      std::vector<Vector> dirs;
      if (!sd.IsSequence()) fail(sd, "singular_directions must be a list of vectors");
      for (const auto& d : sd) dirs.push_back(as_vector(d, "singular direction", nm.dimension()));
      nm = nm.with_singular_directions(dirs);
    }
    return nm;
  }
  const YAML::Node fam = need(n, "family", "norm");
  const std::string family = as_string(fam, "family");
  label = family;
  std::optional<SingularNorm> nm;
  if (family == "euclidean") {
    allow_keys(n, "norm", {"family", "dimension", "singular_directions"});
    const int d = as_dimension(n);
    nm = SingularNorm::euclidean(d);
  } else if (family == "p-norm") {
    allow_keys(n, "norm", {"family", "dimension", "p", "singular_directions"});
    const int d = as_dimension(n);
    const YAML::Node p = need(n, "p", "norm");
    const double pv = as_double(p, "p");
    nm = at_node(p, [&] { return SingularNorm::p_norm(d, pv); });
  } else if (family == "sqrt-quadratic-plus-abs") {
    allow_keys(n, "norm", {"family", "dimension", "quadratic", "abs_coordinate", "weight", "singular_directions"});
    const int d = as_dimension(n);
    const Matrix q = as_matrix(need(n, "quadratic", "norm"), "quadratic", d);
    const YAML::Node ai = need(n, "abs_coordinate", "norm");
    const long long idx = as_integer(ai, "abs_coordinate");
    if (idx < 1 || idx > d) fail(ai, "abs_coordinate must be in [1, dimension]");
    const double w = n["weight"] ? as_positive(n["weight"], "weight") : 1.0;
    nm = at_node(n["quadratic"], [&] { return SingularNorm::sqrt_quadratic_plus_abs(q, static_cast<int>(idx - 1), w); });
  } else if (family == "intersection-of-ellipsoids") {
    allow_keys(n, "norm", {"family", "dimension", "ellipsoids", "singular_directions"});
    const int d = as_dimension(n);
    const YAML::Node list = need(n, "ellipsoids", "norm");
    if (!list.IsSequence() || list.size() == 0) fail(list, "ellipsoids must be a non-empty list");
    std::vector<gauge::Ellipsoid> sets;
    for (const auto& e : list) {
      require_map(e, "ellipsoid");
      allow_keys(e, "ellipsoid", {"center", "shape", "radius"});
      gauge::Ellipsoid g;
      g.center = e["center"] ? as_vector(e["center"], "center", d) : Vector(Vector::Zero(d));
      g.shape = e["shape"] ? as_matrix(e["shape"], "shape", d) : Matrix(Matrix::Identity(d, d));
      g.radius = e["radius"] ? as_positive(e["radius"], "radius") : 1.0;
      sets.push_back(std::move(g));
    }
    nm = at_node(list, [&] { return SingularNorm::intersection_of_ellipsoids(sets); });
  } else if (family == "custom-formula") {
    allow_keys(n, "norm", {"family", "dimension", "formula", "singular_directions"});
    const int d = as_dimension(n);
    const YAML::Node f = need(n, "formula", "norm");
    const std::string text = as_string(f, "formula");
    nm = at_node(f, [&] { return SingularNorm::custom(text, d); });
    if (options.validate_custom) {
      const auto rep = validate_norm(*nm, {2000, 20240917});
      if (!rep.passed) fail(f, "custom norm fails the invariant battery: " + rep.findings.front());
    }
  } else {
    fail(fam, "unknown norm family '" + family + "'");
  }
  if (const YAML::Node sd = n["singular_directions"]) {
    if (!sd.IsSequence()) fail(sd, "singular_directions must be a list of vectors");
    std::vector<Vector> dirs;
    for (const auto& d : sd) dirs.push_back(as_vector(d, "singular direction", nm->dimension()));
    nm = nm->with_singular_directions(dirs);
  }
  return *nm;
}

HorofunctionConfig parse_horofunction(const YAML::Node& n, int dim, bool reference_norm) {
  require_map(n, "horofunction");
  allow_keys(n, "horofunction", {"id", "busemann", "sequence", "linear", "closed_form", "a", "eps1", "eps2", "sigma"});
  HorofunctionConfig h;
  h.id = as_string(need(n, "id", "horofunction"), "id");
  int kinds = 0;
  if (const YAML::Node b = n["busemann"]) {
    ++kinds;
    require_map(b, "busemann");
    allow_keys(b, "busemann", {"origin", "direction"});
    h.kind = HorofunctionConfig::Kind::busemann;
    h.origin = b["origin"] ? as_vector(b["origin"], "origin", dim) : Point(Point::Zero(dim));
    h.vector = as_vector(need(b, "direction", "busemann"), "direction", dim);
    if (h.vector.norm() == 0.0) fail(b["direction"], "direction must be nonzero");
  }
  if (const YAML::Node s = n["sequence"]) {
    ++kinds;
    h.kind = HorofunctionConfig::Kind::sequence;
    h.sequence = as_string(s, "sequence");
  }
  if (const YAML::Node l = n["linear"]) {
    ++kinds;
    require_map(l, "linear");
    allow_keys(l, "linear", {"covector", "base"});
    h.kind = HorofunctionConfig::Kind::linear;
    h.vector = as_vector(need(l, "covector", "linear"), "covector", dim);
    h.origin = l["base"] ? as_vector(l["base"], "base", dim) : Point(Point::Zero(dim));
  }
  if (const YAML::Node c = n["closed_form"]) {
    ++kinds;
    h.kind = HorofunctionConfig::Kind::closed_form;
    h.form = as_string(c, "closed_form");
    static const std::set<std::string> forms{"beta0", "beta0_shifted", "phi_plus", "phi_minus", "coex"};
    if (!forms.count(h.form)) fail(c, "unknown closed form '" + h.form + "'");
    if (!reference_norm) fail(c, "closed form '" + h.form + "' belongs to the reference plane norm");
    if (h.form == "beta0_shifted") h.a = as_double(need(n, "a", "horofunction"), "a");
    if (h.form == "coex") {
      const auto sign = [&](const char* key) {
        const YAML::Node s = need(n, key, "horofunction");
        const long long v = as_integer(s, key);
        if (v != 1 && v != -1) fail(s, std::string(key) + " must be 1 or -1");
        return static_cast<int>(v);
      };
      h.eps1 = sign("eps1");
      h.eps2 = sign("eps2");
      const YAML::Node s = need(n, "sigma", "horofunction");
      h.a = as_positive(s, "sigma");
      if (h.a > std::sqrt(2.0)) fail(s, "sigma must be in (0, sqrt 2]");
    }
  }
  if (kinds != 1) fail(n, "horofunction '" + h.id + "' needs exactly one of busemann, sequence, linear, closed_form");
  return h;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source, const ConfigLoadOptions& options) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, e.mark.line + 1, e.mark.column + 1);
  }
  if (!root.IsMap()) throw ConfigError("config must be a mapping", 1, 1);
  allow_keys(root, "config",
             {"norm", "sequences", "horofunctions", "grid", "schedule", "tolerances", "validation", "seed", "output",
              "fiber"});
  const YAML::Node norm_node = root["norm"];
  if (!norm_node) fail(root, "missing section 'norm'");
  std::string label;
  SingularNorm nm = parse_norm(norm_node, label, options);
  const int dim = nm.dimension();
  RunConfig cfg{source, fnv1a64(text), label, nm};
  const bool reference = norms_agree(nm, paper_norm());

  if (const YAML::Node g = root["grid"]) {
    require_map(g, "grid");
    allow_keys(g, "grid", {"lo", "hi", "step"});
    if (g["lo"]) cfg.grid.lo = as_double(g["lo"], "grid lo");
    if (g["hi"]) cfg.grid.hi = as_double(g["hi"], "grid hi");
    if (g["step"]) cfg.grid.step = as_positive(g["step"], "grid step");
    if (!(cfg.grid.lo < cfg.grid.hi)) fail(g, "grid lo must be below hi");
  }
  if (const YAML::Node s = root["schedule"]) {
    require_map(s, "schedule");
    allow_keys(s, "schedule", {"max_steps", "tolerance"});
    if (s["max_steps"]) {
      const long long m = as_integer(s["max_steps"], "max_steps");
      if (m < 4 || m > 200) fail(s["max_steps"], "max_steps must be in [4, 200]");
      cfg.schedule.max_steps = static_cast<int>(m);
    }
    if (s["tolerance"]) cfg.schedule.tolerance = as_positive(s["tolerance"], "schedule tolerance");
  }
  if (const YAML::Node t = root["tolerances"]) {
    require_map(t, "tolerances");
    allow_keys(t, "tolerances", {"equivalence", "busemann"});
    if (t["equivalence"]) cfg.tolerances.equivalence = as_positive(t["equivalence"], "equivalence tolerance");
    if (t["busemann"]) cfg.tolerances.busemann = as_positive(t["busemann"], "busemann tolerance");
  }
  if (const YAML::Node v = root["validation"]) {
    require_map(v, "validation");
    allow_keys(v, "validation", {"samples", "seed"});
    if (v["samples"]) {
      const long long m = as_integer(v["samples"], "samples");
      if (m < 1) fail(v["samples"], "samples must be positive");
      cfg.validation.samples = static_cast<int>(m);
    }
    if (v["seed"]) cfg.validation.seed = static_cast<std::uint64_t>(as_integer(v["seed"], "validation seed"));
  }
  if (const YAML::Node s = root["seed"]) cfg.seed = static_cast<std::uint64_t>(as_integer(s, "seed"));
  if (const YAML::Node o = root["output"]) {
    require_map(o, "output");
    allow_keys(o, "output", {"dir", "format"});
    if (o["dir"]) cfg.output.dir = as_string(o["dir"], "output dir");
    if (o["format"]) {
      cfg.output.format = as_string(o["format"], "output format");
      if (cfg.output.format != "csv" && cfg.output.format != "svg" && cfg.output.format != "report")
        fail(o["format"], "output format must be csv, svg or report");
    }
  }

  std::set<std::string> ids;
  const auto claim = [&](const YAML::Node& at, const std::string& id) {
    if (id.empty()) fail(at, "ids must be non-empty");
    if (!ids.insert(id).second) fail(at, "duplicate id '" + id + "'");
  };
  if (const YAML::Node list = root["sequences"]) {
    if (!list.IsSequence()) fail(list, "sequences must be a list");
    for (const auto& n : list) {
      require_map(n, "sequence");
      allow_keys(n, "sequence", {"id", "coordinates", "base"});
      SequenceConfig s;
      s.id = as_string(need(n, "id", "sequence"), "id");
      claim(n, s.id);
      const YAML::Node coords = need(n, "coordinates", "sequence");
      if (!coords.IsSequence() || static_cast<int>(coords.size()) != dim)
        fail(coords, "coordinates must list " + std::to_string(dim) + " descriptors");
      for (const auto& c : coords) {
        const std::string d = as_string(c, "coordinate descriptor");
        s.coordinates.push_back(at_node(c, [&] { return IndexFunction::parse(d); }));
      }
      s.base = n["base"] ? as_vector(n["base"], "base", dim) : Point(Point::Zero(dim));
      cfg.sequences.push_back(std::move(s));
    }
  }
  if (const YAML::Node list = root["horofunctions"]) {
    if (!list.IsSequence()) fail(list, "horofunctions must be a list");
    for (const auto& n : list) {
      HorofunctionConfig h = parse_horofunction(n, dim, reference);
      claim(n, h.id);
      if (h.kind == HorofunctionConfig::Kind::sequence && !cfg.find_sequence(h.sequence))
        fail(n["sequence"], "unknown sequence '" + h.sequence + "'");
      cfg.horofunctions.push_back(std::move(h));
    }
  }
  if (const YAML::Node f = root["fiber"]) {
    require_map(f, "fiber");
    allow_keys(f, "fiber", {"xi", "candidates"});
    if (f["xi"]) {
      cfg.fiber_xi = as_vector(f["xi"], "xi", dim);
      if (cfg.fiber_xi->norm() == 0.0) fail(f["xi"], "xi must be nonzero");
    }
    if (const YAML::Node c = f["candidates"]) {
      if (!c.IsSequence()) fail(c, "candidates must be a list of ids");
      for (const auto& id : c) {
        const std::string s = as_string(id, "candidate id");
        if (!ids.count(s)) fail(id, "unknown candidate '" + s + "'");
        cfg.fiber_candidates.push_back(s);
      }
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path, const ConfigLoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path, options);
}

FlagDirectedSequence make_sequence(const SequenceConfig& s) {
  return FlagDirectedSequence::from_coordinates(s.id, s.base, s.coordinates);
}

Horofunction build_horofunction(const RunConfig& cfg, const std::string& id, const PointGrid& probe) {
  const SingularNorm& nm = cfg.norm;
  if (const SequenceConfig* s = cfg.find_sequence(id))
    return project_to_horofunction(nm, make_sequence(*s), probe, cfg.schedule).with_id(id);
  const HorofunctionConfig* h = cfg.find_horofunction(id);
  if (!h) throw ArgumentError("unknown horofunction or sequence id '" + id + "'");
  switch (h->kind) {
    case HorofunctionConfig::Kind::busemann:
      return busemann_function(nm, Ray{h->origin, Direction::normalize(nm, h->vector)}, probe, cfg.schedule).with_id(id);
    case HorofunctionConfig::Kind::sequence:
      return build_horofunction(cfg, h->sequence, probe).with_id(id);
    case HorofunctionConfig::Kind::linear:
      return linear_horofunction(id, h->vector, h->origin);
    case HorofunctionConfig::Kind::closed_form:
      if (h->form == "beta0") return paper_beta0().with_id(id);
      if (h->form == "beta0_shifted") return paper_beta0_shifted(h->a).with_id(id);
      if (h->form == "phi_plus") return paper_phi_plus().with_id(id);
      if (h->form == "phi_minus") return paper_phi_minus().with_id(id);
      return coex_horofunction(h->eps1, h->eps2, h->a).with_id(id);
  }
  throw ArgumentError("unhandled horofunction kind");
}

}  // namespace mh
