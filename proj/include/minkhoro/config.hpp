#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "minkhoro/flag.hpp"
#include "minkhoro/horofunction.hpp"
#include "minkhoro/metric.hpp"
#include "minkhoro/schedule.hpp"

namespace mh {

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t h);

struct GridConfig {
  double lo = -5.0, hi = 5.0, step = 0.5;
  PointGrid make(int dimension) const { return PointGrid::box(dimension, lo, hi, step); }
};

struct SequenceConfig {
  std::string id;
  Point base;
  std::vector<IndexFunction> coordinates;
};

// A named horofunction: the Busemann function of a ray, the limit of a
// configured sequence, a linear function, or a closed form of the
// reference plane norm (beta0, beta0_shifted, phi_plus, phi_minus, coex).
struct HorofunctionConfig {
  enum class Kind { busemann, sequence, linear, closed_form };
  std::string id;
  Kind kind = Kind::busemann;
  Point origin;            // busemann: ray origin; linear: base point
  Vector vector;           // busemann: direction; linear: covector
  std::string sequence;    // sequence: id of a configured sequence
  std::string form;        // closed_form: name
  double a = 0.0;          // beta0_shifted offset, coex sigma
  int eps1 = -1, eps2 = -1;  // coex signs
};

struct ToleranceConfig {
  double equivalence = 1e-6;
  double busemann = 1e-4;
};

struct OutputConfig {
  std::string dir;
  std::string format = "report";
};

struct RunConfig {
  RunConfig(std::string source_, std::uint64_t hash_, std::string label, SingularNorm nm)
      : source(std::move(source_)), hash(hash_), norm_label(std::move(label)), norm(std::move(nm)) {}

  std::string source;   // path or label the text came from
  std::uint64_t hash = 0;
  std::string norm_label;
  SingularNorm norm;
  std::vector<SequenceConfig> sequences;
  std::vector<HorofunctionConfig> horofunctions;
  GridConfig grid;
  LimitSchedule schedule;
  ToleranceConfig tolerances;
  NormValidationOptions validation;
  std::uint64_t seed = 1;
  OutputConfig output;
  std::optional<Vector> fiber_xi;
  std::vector<std::string> fiber_candidates;

  const SequenceConfig* find_sequence(const std::string& id) const;
  const HorofunctionConfig* find_horofunction(const std::string& id) const;
};

struct ConfigLoadOptions {
  // Run the sampled invariant battery on custom formulas and reject failures.
  bool validate_custom = true;
};

// Throws ConfigError carrying the 1-based line and column of the offending node.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>",
                       const ConfigLoadOptions& options = {});
RunConfig load_config(const std::string& path, const ConfigLoadOptions& options = {});

FlagDirectedSequence make_sequence(const SequenceConfig& s);

// Resolves a horofunction id, or a sequence id through its limit. Unknown
// ids throw ArgumentError.
Horofunction build_horofunction(const RunConfig& cfg, const std::string& id, const PointGrid& probe);

}  // namespace mh
