#include "minkhoro/flag.hpp"

#include <algorithm>
#include <array>
#include <memory>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>

namespace mh {

// IndexFunction ---------------------------------------------------------------

namespace {

bool order_greater(const GrowthTerm& a, const GrowthTerm& b) { return order_of(a) > order_of(b); }

// Merges equal orders; coefficients that cancel to roundoff of the summed
// magnitudes are dropped.
std::vector<GrowthTerm> normalize_terms(std::vector<GrowthTerm> terms, const std::vector<double>& magnitudes) {
  std::vector<std::pair<GrowthTerm, double>> merged;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double mag = magnitudes.empty() ? std::abs(terms[i].coefficient) : magnitudes[i];
    auto it = std::find_if(merged.begin(), merged.end(),
                           [&](const auto& m) { return order_of(m.first) == order_of(terms[i]); });
    if (it == merged.end()) {
      merged.emplace_back(terms[i], mag);
    } else {
      it->first.coefficient += terms[i].coefficient;
      it->second += mag;
    }
  }
  std::vector<GrowthTerm> out;
  for (const auto& [t, mag] : merged)
    if (t.coefficient != 0.0 && std::abs(t.coefficient) > 1e-13 * mag) out.push_back(t);
  std::sort(out.begin(), out.end(), order_greater);
  return out;
}

class DescriptorParser {
 public:
  explicit DescriptorParser(const std::string& text) : s_(text) {}

  std::vector<GrowthTerm> parse() {
    skip();
    if (pos_ == s_.size()) fail("empty descriptor");
    std::vector<GrowthTerm> terms{term()};
    for (skip(); pos_ < s_.size(); skip()) {
      const char c = s_[pos_];
      if (c != '+' && c != '-') fail("expected '+' or '-'");
      ++pos_;
      GrowthTerm t = term();
      if (c == '-') t.coefficient = -t.coefficient;
      terms.push_back(t);
    }
    return terms;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ArgumentError("index descriptor '" + s_ + "': " + why + " at column " + std::to_string(pos_ + 1));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  bool at_number() {
    skip();
    return pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.');
  }
  double number() {
    if (!at_number()) fail("expected a number");
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || !std::isfinite(v)) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }
  double signed_number() {
    const bool neg = accept('-');
    if (!neg) accept('+');
    const double v = number();
    return neg ? -v : v;
  }
  bool word(const char* w) {
    skip();
    const std::size_t n = std::char_traits<char>::length(w);
    if (s_.compare(pos_, n, w) != 0) return false;
    if (pos_ + n < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_ + n]))) return false;
    pos_ += n;
    return true;
  }

  GrowthTerm term() {
    double sign = 1.0;
    if (accept('-')) sign = -1.0; else accept('+');
    GrowthTerm t = factor();
    t.coefficient *= sign;
    for (;;) {
      if (accept('*')) {
        const GrowthTerm f = factor();
        t.coefficient *= f.coefficient;
        t.power += f.power;
        t.rate += f.rate;
      } else if (accept('/')) {
        const GrowthTerm f = factor();
        if (f.coefficient == 0.0) fail("division by zero");
        t.coefficient /= f.coefficient;
        t.power -= f.power;
        t.rate -= f.rate;
      } else {
        return t;
      }
    }
  }

  GrowthTerm factor() {
    if (at_number()) return {number(), 0.0, 0.0};
    if (word("k")) {
      double a = 1.0;
      if (accept('^')) a = signed_number();
      return {1.0, a, 0.0};
    }
    if (word("sqrt")) {
      expect('(');
      if (!word("k")) fail("sqrt takes k");
      expect(')');
      return {1.0, 0.5, 0.0};
    }
    if (word("exp")) {
      expect('(');
      double b = accept('-') ? -1.0 : 1.0;
      if (at_number()) {
        b *= number();
        expect('*');
        if (!word("k")) fail("expected k");
      } else {
        if (!word("k")) fail("expected k");
        if (accept('*')) b *= signed_number();
      }
      expect(')');
      return {1.0, 0.0, b};
    }
    fail(pos_ < s_.size() ? std::string("unexpected '") + s_[pos_] + "'" : "unexpected end");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

IndexFunction::IndexFunction(std::vector<GrowthTerm> terms) : terms_(normalize_terms(std::move(terms), {})) {}

IndexFunction IndexFunction::constant(double c) { return IndexFunction({GrowthTerm{c, 0.0, 0.0}}); }

IndexFunction IndexFunction::parse(const std::string& text) { return IndexFunction(DescriptorParser(text).parse()); }

long double IndexFunction::operator()(long double k) const {
  long double sum = 0.0L;
  for (const auto& t : terms_) {
    long double v = t.coefficient;
    if (t.power != 0.0) v *= std::pow(k, static_cast<long double>(t.power));
    if (t.rate != 0.0) v *= std::exp(static_cast<long double>(t.rate) * k);
    sum += v;
  }
  return sum;
}

std::string IndexFunction::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& t = terms_[i];
    if (i) out += " + ";
    out += num(t.coefficient);
    if (t.power != 0.0) out += "*k^" + num(t.power);
    if (t.rate != 0.0) out += "*exp(" + num(t.rate) + "*k)";
  }
  return out;
}

std::optional<double> IndexFunction::limit() const {
  double c = 0.0;
  for (const auto& t : terms_) {
    if (diverges(order_of(t))) return std::nullopt;
    if (t.power == 0.0 && t.rate == 0.0) c += t.coefficient;
  }
  return c;
}

IndexFunction IndexFunction::operator+(const IndexFunction& o) const {
  std::vector<GrowthTerm> all = terms_;
  all.insert(all.end(), o.terms_.begin(), o.terms_.end());
  std::vector<double> mags;
  for (const auto& t : all) mags.push_back(std::abs(t.coefficient));
  IndexFunction r;
  r.terms_ = normalize_terms(std::move(all), mags);
  return r;
}

IndexFunction IndexFunction::operator*(double s) const {
  IndexFunction r = *this;
  for (auto& t : r.terms_) t.coefficient *= s;
  r.terms_ = normalize_terms(std::move(r.terms_), {});
  return r;
}

namespace {

// sum_i w_i f_i with cancellation-aware cleanup.
IndexFunction combine(const std::vector<double>& weights, const std::vector<IndexFunction>& fs) {
  std::vector<GrowthTerm> all;
  std::vector<double> mags;
  for (std::size_t i = 0; i < fs.size(); ++i)
    for (auto t : fs[i].terms()) {
      t.coefficient *= weights[i];
      mags.push_back(std::abs(t.coefficient));
      all.push_back(t);
    }
  return IndexFunction(normalize_terms(std::move(all), mags));
}

// Flags and planes ------------------------------------------------------------

std::vector<Vector> gram_schmidt(const std::vector<Vector>& vs, double rel_tol, bool keep_dependent) {
  std::vector<Vector> out;
  for (const auto& v : vs) {
    Vector r = v;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : out) r -= r.dot(u) * u;
    if (r.norm() > rel_tol * std::max(1.0, v.norm())) out.push_back(r.normalized());
    else if (keep_dependent) throw PreconditionError("flag directions are linearly dependent");
  }
  return out;
}

Matrix columns(const std::vector<Vector>& vs, int n) {
  Matrix m(n, static_cast<Eigen::Index>(vs.size()));
  for (std::size_t i = 0; i < vs.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = vs[i];
  return m;
}

Matrix orthogonal_projector(const std::vector<Vector>& span, int n) {
  const Matrix u = columns(span, n);
  return Matrix::Identity(n, n) - u * u.transpose();
}

}  // namespace

Flag Flag::make(Point base, std::vector<Vector> directions) {
  const int n = static_cast<int>(base.size());
  if (directions.empty() || static_cast<int>(directions.size()) > n)
    throw PreconditionError("a flag needs between 1 and n directions");
  Matrix m(n, static_cast<Eigen::Index>(directions.size()));
  for (std::size_t i = 0; i < directions.size(); ++i) {
    if (directions[i].size() != n || !directions[i].allFinite() || directions[i].norm() == 0.0)
      throw PreconditionError("flag direction " + std::to_string(i + 1) + " is invalid");
    m.col(static_cast<Eigen::Index>(i)) = directions[i].normalized();
  }
  if ((m.transpose() * m).determinant() <= 1e-10) throw PreconditionError("flag directions are linearly dependent");
  return Flag{std::move(base), std::move(directions)};
}

std::vector<Vector> Flag::orthonormal() const { return gram_schmidt(directions, 0.0, false); }

bool same_flag(const Flag& a, const Flag& b, double angular_tol) {
  if (a.base.size() != b.base.size() || a.level() != b.level()) return false;
  if ((a.base - b.base).norm() > 1e-9) return false;
  const auto ua = a.orthonormal(), ub = b.orthonormal();
  for (std::size_t i = 0; i < ua.size(); ++i)
    if (angle_between(ua[i], ub[i]) > angular_tol) return false;
  return true;
}

bool same_plane(const AsymptoticPlane& a, const AsymptoticPlane& b, double tol) {
  const int n = static_cast<int>(a.through.size());
  if (b.through.size() != n || a.span.size() != b.span.size()) return false;
  const auto ua = gram_schmidt(a.span, 0.0, false), ub = gram_schmidt(b.span, 0.0, false);
  const Matrix pa = orthogonal_projector(ua, n), pb = orthogonal_projector(ub, n);
  if ((pa - pb).norm() > 1e-9) return false;
  return (pa * (a.through - b.through)).norm() <= tol;
}

// FlagDirectedSequence --------------------------------------------------------

FlagDirectedSequence FlagDirectedSequence::from_coordinates(std::string id, Point base,
                                                            std::vector<IndexFunction> coordinates) {
  const int n = static_cast<int>(coordinates.size());
  if (n < kMinDimension || n > kMaxDimension) throw ArgumentError("sequence '" + id + "': dimension must be in [2, 4]");
  if (base.size() != n) throw ArgumentError("sequence '" + id + "': base point has the wrong dimension");
  FlagDirectedSequence s;
  s.id_ = std::move(id);
  s.base_ = std::move(base);
  s.coordinates_ = std::move(coordinates);
  s.infer();
  return s;
}

FlagDirectedSequence FlagDirectedSequence::canonical(std::string id, const Point& origin,
                                                     const std::vector<Vector>& flag_directions,
                                                     const std::vector<IndexFunction>& growth,
                                                     const std::vector<Vector>& offset_directions,
                                                     const std::vector<IndexFunction>& offsets, Point base) {
  const int n = static_cast<int>(origin.size());
  if (flag_directions.size() != growth.size() || offset_directions.size() != offsets.size())
    throw ArgumentError("sequence '" + id + "': each direction needs one index function");
  const Flag declared = Flag::make(base, flag_directions);
  std::vector<IndexFunction> coords;
  for (int c = 0; c < n; ++c) {
    std::vector<double> w{1.0};
    std::vector<IndexFunction> fs{IndexFunction::constant(origin(c))};
    for (std::size_t i = 0; i < growth.size(); ++i) {
      w.push_back(flag_directions[i](c));
      fs.push_back(growth[i]);
    }
    for (std::size_t j = 0; j < offsets.size(); ++j) {
      if (offset_directions[j].size() != n) throw ArgumentError("sequence '" + id + "': offset direction dimension");
      w.push_back(offset_directions[j](c));
      fs.push_back(offsets[j]);
    }
    coords.push_back(combine(w, fs));
  }
  auto s = from_coordinates(std::move(id), std::move(base), std::move(coords));
  if (s.bounded() || !same_flag(s.flag(), declared, 1e-9))
    throw PreconditionError("sequence '" + s.id() + "': growth functions do not realize the declared flag");
  return s;
}

void FlagDirectedSequence::infer() {
  const int n = dimension();
  std::vector<IndexFunction> rel;  // coordinates of x(k) - x0
  for (int c = 0; c < n; ++c) rel.push_back(coordinates_[c] + IndexFunction::constant(-base_(c)));

  std::vector<GrowthOrder> orders;
  for (const auto& f : rel)
    for (const auto& t : f.terms())
      if (diverges(order_of(t)) && std::find(orders.begin(), orders.end(), order_of(t)) == orders.end())
        orders.push_back(order_of(t));
  std::sort(orders.begin(), orders.end(), std::greater<>());

  std::vector<Vector> leading;
  for (const auto& o : orders) {
    Vector c = Vector::Zero(n);
    for (int i = 0; i < n; ++i)
      for (const auto& t : rel[i].terms())
        if (order_of(t) == o) c(i) = t.coefficient;
    leading.push_back(c);
  }
  flag_directions_ = gram_schmidt(leading, 1e-12, false);

  std::vector<Vector> basis = flag_directions_;
  for (int i = 0; i < n; ++i) basis.push_back(Vector::Unit(n, i));
  offset_directions_ = gram_schmidt(basis, 1e-9, false);
  offset_directions_.erase(offset_directions_.begin(), offset_directions_.begin() + level());

  growth_.clear();
  offsets_.clear();
  for (const auto& u : flag_directions_) growth_.push_back(combine(std::vector<double>(u.data(), u.data() + n), rel));
  for (const auto& w : offset_directions_) {
    // Diverging orders lie in the flag span; what survives here is roundoff.
    std::vector<GrowthTerm> kept;
    const IndexFunction g = combine(std::vector<double>(w.data(), w.data() + n), rel);
    for (const auto& t : g.terms())
      if (!diverges(order_of(t))) kept.push_back(t);
    offsets_.emplace_back(kept);
  }
}

Flag FlagDirectedSequence::flag() const {
  if (bounded()) throw PreconditionError("sequence '" + id_ + "' is bounded and has no flag");
  return Flag::make(base_, flag_directions_);
}

AsymptoticPlane FlagDirectedSequence::plane() const {
  Point through = base_;
  for (std::size_t j = 0; j < offsets_.size(); ++j) through += *offsets_[j].limit() * offset_directions_[j];
  return {through, flag_directions_};
}

LVector FlagDirectedSequence::at(long double k) const {
  LVector x(dimension());
  for (int i = 0; i < dimension(); ++i) x(i) = coordinates_[i](k);
  return x;
}

PointSequence FlagDirectedSequence::as_point_sequence() const {
  auto self = std::make_shared<const FlagDirectedSequence>(*this);
  return PointSequence{id_, base_, [self](long double k) { return self->at(k); }};
}

FlagDirectedSequence FlagDirectedSequence::shifted(const std::vector<IndexFunction>& shift, std::string id) const {
  if (static_cast<int>(shift.size()) != dimension()) throw ArgumentError("shift has the wrong dimension");
  std::vector<IndexFunction> coords;
  for (int i = 0; i < dimension(); ++i) coords.push_back(coordinates_[i] + shift[i]);
  return from_coordinates(std::move(id), base_, std::move(coords));
}

FlagDirectedSequence FlagDirectedSequence::rebased(Point base) const {
  return from_coordinates(id_, std::move(base), coordinates_);
}

// Validation ------------------------------------------------------------------

namespace {

using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

// Projection along span(U) onto {y : W^T y = 0}.
LMatrix transversal_projector(const Matrix& u, const Matrix& w) {
  const int n = static_cast<int>(u.rows());
  if (u.cols() == 0) return LMatrix::Identity(n, n);
  const LMatrix lu = u.cast<long double>(), lw = w.cast<long double>();
  const LMatrix wu = lw.transpose() * lu;
  return LMatrix::Identity(n, n) - lu * wu.fullPivLu().solve(lw.transpose());
}

bool non_increasing_tail(const std::vector<double>& r, std::size_t tail) {
  for (std::size_t i = r.size() > tail ? r.size() - tail : 1; i < r.size(); ++i)
    if (r[i] > r[i - 1] * (1.0 + 1e-9) + 1e-12) return false;  // ratios at roundoff count as settled
  return true;
}

// Componentwise Aitken with a contraction guard (ratio above 0.9 falls
// back to the newest term).
LVector aitken_vector(const LVector& a0, const LVector& a1, const LVector& a2) {
  LVector out(a2.size());
  for (Eigen::Index i = 0; i < a2.size(); ++i) {
    const long double d1 = a1(i) - a0(i), d2 = a2(i) - a1(i);
    out(i) = std::abs(d2) > 0.9L * std::abs(d1) ? a2(i) : aitken(a0(i), a1(i), a2(i));
  }
  return out;
}

}  // namespace

ValidationReport validate_flag_directed(const SingularNorm& nm, const FlagDirectedSequence& seq,
                                        const ValidationOptions& options) {
  ValidationReport rep;
  rep.sequence_id = seq.id();
  const int n = seq.dimension();
  if (n != nm.dimension()) throw ArgumentError("validate_flag_directed: dimension mismatch");
  if (seq.bounded()) {
    rep.bounded = true;
    rep.findings.push_back("not flag-directed: bounded (no coordinate diverges)");
    return rep;
  }
  if (options.samples < 12) throw ArgumentError("validate_flag_directed: at least 12 samples are needed");

  std::vector<long double> ks;
  try {
    ks = escape_indices(nm, seq.as_point_sequence(), options.samples);
  } catch (const LimitError& e) {
    rep.bounded = true;
    rep.findings.push_back(e.what());
    return rep;
  }
  const LVector x0 = seq.base().cast<long double>();
  std::vector<LVector> xs;
  for (long double k : ks) xs.push_back(seq.at(k) - x0);

  const auto frame = seq.flag().orthonormal();
  const int p = static_cast<int>(frame.size());
  Matrix u = columns(frame, n), w = u;
  if (options.transversal_seed) {
    std::mt19937_64 rng(*options.transversal_seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] += 0.5 * unif(rng);
  }

  rep.level = p;
  bool ok = true;
  for (int i = 1; i <= p; ++i) {
    const LMatrix before = transversal_projector(u.leftCols(i - 1), w.leftCols(i - 1));
    const LMatrix after = transversal_projector(u.leftCols(i), w.leftCols(i));
    LevelCheck lc;
    lc.level = i;
    lc.expected = (before * frame[i - 1].cast<long double>()).cast<double>().normalized();
    std::vector<double> ratios;
    for (const auto& x : xs) {
      const LVector q = before * x;
      const LVector rest = after * x;
      const long double along = (q - rest).norm();
      ratios.push_back(along > 0 ? static_cast<double>(rest.norm() / along) : INFINITY);
    }
    lc.observed = (before * xs.back()).cast<double>().normalized();
    lc.angular_error = angle_between(lc.observed, lc.expected);
    lc.ratio = ratios.back();
    lc.ratio_decreasing = non_increasing_tail(ratios, 8);
    lc.passed = lc.angular_error <= options.angular_tol && lc.ratio <= options.ratio_tol && lc.ratio_decreasing;
    if (!lc.passed) {
      ok = false;
      std::ostringstream f;
      f << "level " << i << ": direction error " << lc.angular_error << ", ratio " << lc.ratio
        << (lc.ratio_decreasing ? "" : " (not decreasing)");
      rep.findings.push_back(f.str());
    }
    rep.levels.push_back(lc);
  }

  // Transversal limit of the projections, extrapolated over steps of four
  // escape radii.
  const LMatrix full = transversal_projector(u, w);
  std::vector<LVector> r;
  for (const auto& x : xs) r.push_back(full * x);
  const std::size_t m = r.size() - 1;
  const LVector est = aitken_vector(r[m - 8], r[m - 4], r[m]);
  const LVector prev = aitken_vector(r[m - 9], r[m - 5], r[m - 1]);
  rep.offset_increment = static_cast<double>((est - prev).cwiseAbs().maxCoeff());
  rep.offsets_converge = rep.offset_increment <= options.offset_tol;
  rep.plane_through = (x0 + est).cast<double>();
  if (!rep.offsets_converge) {
    ok = false;
    rep.findings.push_back("transversal projections do not settle (last change " +
                           std::to_string(rep.offset_increment) + ")");
  }
  rep.valid = ok;
  return rep;
}

Horofunction project_to_horofunction(const SingularNorm& nm, const FlagDirectedSequence& seq, const PointGrid& probe,
                                     const LimitSchedule& schedule) {
  if (seq.bounded())
    throw LimitError("not flag-directed: bounded (sequence '" + seq.id() + "' has no diverging coordinate)", 0.0, 0.0);
  const auto rep = validate_flag_directed(nm, seq);
  if (rep.bounded) throw LimitError(rep.findings.front(), 0.0, 0.0);
  if (!rep.valid) {
    std::string why;
    for (const auto& f : rep.findings) why += "; " + f;
    throw PreconditionError("sequence '" + seq.id() + "' fails flag validation" + why);
  }
  FlagMetadata meta;
  meta.level = seq.level();
  meta.directions = seq.flag().directions;
  meta.plane_through = seq.plane().through;
  return horofunction_limit(nm, seq.as_point_sequence(), probe, schedule).with_flag(std::move(meta));
}

bool same_horofunction_same_flag_check(const SingularNorm& nm, const FlagDirectedSequence& s1,
                                       const FlagDirectedSequence& s2, const PointGrid& grid, double tol,
                                       const LimitSchedule& schedule) {
  if (s1.bounded() || s2.bounded()) throw PreconditionError("same-flag check needs unbounded sequences");
  if (!same_flag(s1.flag(), s2.flag()))
    throw PreconditionError("sequences '" + s1.id() + "' and '" + s2.id() + "' have different flags");
  if (!same_plane(s1.plane(), s2.plane()))
    throw PreconditionError("sequences '" + s1.id() + "' and '" + s2.id() + "' have different asymptotic planes");
  const auto f1 = project_to_horofunction(nm, s1, grid, schedule);
  const auto f2 = project_to_horofunction(nm, s2, grid, schedule);
  return equivalent_up_to_constant(f1, f2, grid, tol);
}

bool rigid_shift_check(const SingularNorm& nm, const FlagDirectedSequence& s1,
                       const std::vector<std::vector<IndexFunction>>& shifts, const PointGrid& grid, double tol,
                       const LimitSchedule& schedule) {
  const int n = s1.dimension();
  const Matrix out_of_span = orthogonal_projector(s1.flag().orthonormal(), n);
  for (std::size_t s = 0; s < shifts.size(); ++s) {
    if (static_cast<int>(shifts[s].size()) != n) throw ArgumentError("shift has the wrong dimension");
    std::vector<GrowthOrder> orders;
    for (const auto& f : shifts[s])
      for (const auto& t : f.terms()) orders.push_back(order_of(t));
    for (const auto& o : orders) {
      Vector c = Vector::Zero(n);
      for (int i = 0; i < n; ++i)
        for (const auto& t : shifts[s][i].terms())
          if (order_of(t) == o) c(i) = t.coefficient;
      if ((out_of_span * c).norm() >= 1e-10)
        throw PreconditionError("shift " + std::to_string(s + 1) + " is not parallel to the flag plane");
    }
  }
  const auto f = project_to_horofunction(nm, s1, grid, schedule);
  for (std::size_t s = 0; s < shifts.size(); ++s) {
    const auto g = project_to_horofunction(nm, s1.shifted(shifts[s], s1.id() + "+shift" + std::to_string(s + 1)), grid,
                                           schedule);
    if (!equivalent_up_to_constant(f, g, grid, tol)) return false;
  }
  return true;
}

// Estimation ------------------------------------------------------------------

const char* to_string(FlagEstimate::Verdict v) {
  return v == FlagEstimate::Verdict::flag_directed ? "flag-directed" : "converging";
}

namespace {

// Whether |q| keeps growing over the three samples: increasing, with
// increments that do not contract (a convergent tail contracts) and that
// are a visible fraction of |q| (k^a with a >= 0.05 grows by 7% from N/4 to N).
bool keeps_growing(long double a, long double b, long double c) {
  return c > b && b > a && (c - b) >= 0.75L * (b - a) && (c - a) >= 0.05L * c;
}

}  // namespace

FlagEstimate estimate_directing_flag(const SingularNorm& nm, const std::vector<Point>& prefix, const Point& base) {
  const int n = nm.dimension();
  if (prefix.size() < 32) throw ArgumentError("estimate_directing_flag needs at least 32 points");
  if (base.size() != n) throw ArgumentError("estimate_directing_flag: base dimension");
  for (const auto& p : prefix)
    if (p.size() != n || !p.allFinite()) throw ArgumentError("estimate_directing_flag: invalid prefix point");

  const std::size_t N = prefix.size();
  const std::array<std::size_t, 3> idx{N / 4 - 1, N / 2 - 1, N - 1};
  std::array<LVector, 3> y;
  for (int i = 0; i < 3; ++i) y[i] = (prefix[idx[i]] - base).cast<long double>();

  FlagEstimate est;
  auto mink = [&](const LVector& v) { return nm.evaluate(v); };
  if (!keeps_growing(mink(y[0]), mink(y[1]), mink(y[2]))) {
    est.verdict = FlagEstimate::Verdict::converging;
    est.limit_point = (base.cast<long double>() + aitken_vector(y[0], y[1], y[2])).cast<double>();
    return est;
  }

  std::vector<Vector> dirs;
  std::array<LVector, 3> q = y;
  for (int level = 1; level <= n; ++level) {
    const LMatrix proj = orthogonal_projector(dirs, n).cast<long double>();
    for (int i = 0; i < 3; ++i) q[i] = proj * y[i];
    // Components below 1e-7 of the escape are extrapolation residue of the
    // previous levels, not a new level.
    if (q[2].norm() <= 1e-7L * y[2].norm() || !keeps_growing(q[0].norm(), q[1].norm(), q[2].norm())) break;
    LVector d = aitken_vector(q[0] / q[0].norm(), q[1] / q[1].norm(), q[2] / q[2].norm());
    d = proj * d;
    dirs.push_back(d.cast<double>().normalized());
  }
  est.verdict = FlagEstimate::Verdict::flag_directed;
  est.level = static_cast<int>(dirs.size());
  est.flag = Flag::make(base, dirs);
  const LMatrix proj = orthogonal_projector(dirs, n).cast<long double>();
  for (int i = 0; i < 3; ++i) q[i] = proj * y[i];
  est.plane = AsymptoticPlane{(base.cast<long double>() + aitken_vector(q[0], q[1], q[2])).cast<double>(), dirs};
  return est;
}

}  // namespace mh
