#include "isostab/axisym.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "isostab/error.hpp"
#include "isostab/quadrature.hpp"

namespace isostab {

namespace {

constexpr double pi = std::numbers::pi;

struct Pt {
  double x, y;
  int src;
  bool refl;
};

double cross(const Pt& o, const Pt& a, const Pt& b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

/// Counterclockwise hull without collinear points; duplicates keep the first-listed point.
std::vector<Pt> monotone_chain(std::vector<Pt> p) {
  std::stable_sort(p.begin(), p.end(), [](const Pt& a, const Pt& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  p.erase(std::unique(p.begin(), p.end(), [](const Pt& a, const Pt& b) { return a.x == b.x && a.y == b.y; }), p.end());
  if (p.size() < 3) return p;
  std::vector<Pt> h(2 * p.size());
  std::size_t k = 0;
  for (const Pt& q : p) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], q) <= 0.0) --k;
    h[k++] = q;
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], p[i]) <= 0.0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  return h;
}

double seg_dist(double px, double py, const Pt& a, const Pt& b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double l2 = dx * dx + dy * dy;
  double t = l2 > 0.0 ? ((px - a.x) * dx + (py - a.y) * dy) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(px - a.x - t * dx, py - a.y - t * dy);
}

struct Segment {
  double ax, ay, bx, by;
  int curve, index;
};

double orient(double ax, double ay, double bx, double by, double cx, double cy) {
  return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
}

bool segments_meet(const Segment& s, const Segment& t) {
  const double o1 = orient(s.ax, s.ay, s.bx, s.by, t.ax, t.ay);
  const double o2 = orient(s.ax, s.ay, s.bx, s.by, t.bx, t.by);
  const double o3 = orient(t.ax, t.ay, t.bx, t.by, s.ax, s.ay);
  const double o4 = orient(t.ax, t.ay, t.bx, t.by, s.bx, s.by);
  if (o1 * o2 < 0.0 && o3 * o4 < 0.0) return true;
  auto on = [](double ax, double ay, double bx, double by, double px, double py) {
    return std::min(ax, bx) <= px && px <= std::max(ax, bx) && std::min(ay, by) <= py && py <= std::max(ay, by);
  };
  return (o1 == 0.0 && on(s.ax, s.ay, s.bx, s.by, t.ax, t.ay)) || (o2 == 0.0 && on(s.ax, s.ay, s.bx, s.by, t.bx, t.by)) ||
         (o3 == 0.0 && on(t.ax, t.ay, t.bx, t.by, s.ax, s.ay)) || (o4 == 0.0 && on(t.ax, t.ay, t.bx, t.by, s.bx, s.by));
}

/// First pair of crossing segments, skipping neighbours on the same curve.
bool any_crossing(std::vector<Segment> segs, const std::vector<int>& curve_len, const std::vector<char>& periodic) {
  std::sort(segs.begin(), segs.end(),
            [](const Segment& a, const Segment& b) { return std::min(a.ax, a.bx) < std::min(b.ax, b.bx); });
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const Segment& s = segs[i];
    const double xmax = std::max(s.ax, s.bx);
    for (std::size_t j = i + 1; j < segs.size(); ++j) {
      const Segment& t = segs[j];
      if (std::min(t.ax, t.bx) > xmax) break;
      if (s.curve == t.curve) {
        const int d = std::abs(s.index - t.index);
        const int m = curve_len[s.curve];
        if (d <= 1 || (periodic[s.curve] && d == m - 1)) continue;
      }
      if (std::max(s.ay, s.by) < std::min(t.ay, t.by) || std::max(t.ay, t.by) < std::min(s.ay, s.by)) continue;
      if (segments_meet(s, t)) return true;
    }
  }
  return false;
}

void add_segments(const std::vector<CurvePoint>& p, bool periodic, int curve, std::vector<Segment>& out) {
  const int N = static_cast<int>(p.size());
  const int m = periodic ? N : N - 1;
  for (int i = 0; i < m; ++i) {
    const auto& a = p[i];
    const auto& b = p[(i + 1) % N];
    out.push_back({a.r, a.z, b.r, b.z, curve, i});
  }
}

bool point_in_polygon(double x, double y, const std::vector<CurvePoint>& p) {
  bool in = false;
  for (std::size_t i = 0, j = p.size() - 1; i < p.size(); j = i++) {
    if ((p[i].z > y) != (p[j].z > y) && x < (p[j].r - p[i].r) * (y - p[i].z) / (p[j].z - p[i].z) + p[i].r) in = !in;
  }
  return in;
}

/// 5-point first and second differences for samples extended by `at(k)` outside [0, N).
template <class At>
void five_point(int N, double h, At at, std::vector<double>& d1, std::vector<double>& d2) {
  d1.resize(N);
  d2.resize(N);
  for (int i = 0; i < N; ++i) {
    const double m2 = at(i - 2), m1 = at(i - 1), c = at(i), p1 = at(i + 1), p2 = at(i + 2);
    d1[i] = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
    d2[i] = (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h);
  }
}

double point_speed(const CurvePoint& p) { return std::hypot(p.dr, p.dz); }
double point_kappa(const CurvePoint& p) {
  const double s = point_speed(p);
  return (p.dr * p.ddz - p.dz * p.ddr) / (s * s * s);
}

double point_H(int n, const CurvePoint& p) {
  const double k = point_kappa(p);
  if (n == 1) return k;
  const double nr = p.dz / point_speed(p);
  if (p.r <= 0.0) {
    if (std::abs(nr) > 1e-8) fail(ErrorKind::precondition, "profile.axis_slope", "meridian is not orthogonal to the axis");
    return n * k;
  }
  return k + (n - 1) * nr / p.r;
}

double point_K(int n, const CurvePoint& p) {
  const double k = point_kappa(p);
  if (n == 1) return k;
  if (p.r <= 0.0) return std::pow(k, n);
  return k * std::pow(p.dz / point_speed(p) / p.r, n - 1);
}

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * pi);
  return a <= -pi ? a + 2.0 * pi : a;
}

/// |S^{n-1}| int_a^b cos^{n-1}, angles clamped to the half-plane r >= 0.
double band_mass(int n, double a, double b) {
  a = std::clamp(a, -0.5 * pi, 0.5 * pi);
  b = std::clamp(b, -0.5 * pi, 0.5 * pi);
  if (n == 1) return 2.0 * (b - a);
  const GaussRule g = gauss_legendre(24, a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * std::pow(std::cos(g.nodes[i]), n - 1);
  return sphere_measure(n - 1) * s;
}

/// Hull of a counterclockwise boundary loop; loop points carry their sample index, mirrored points are flagged.
EnvelopeResult envelope_core(const std::vector<Pt>& loop, int samples, const std::vector<double>& dA,
                             const std::vector<double>& K, const std::vector<double>& beta, bool planar, int n) {
  EnvelopeResult e;
  const int M = static_cast<int>(loop.size());
  std::vector<Pt> pts = loop;
  for (int i = 0; i < M; ++i) pts[i].src = i;
  const std::vector<Pt> hull = monotone_chain(pts);
  double scale = 0.0;
  for (const Pt& p : hull) scale = std::max(scale, std::hypot(p.x, p.y));
  const double tol = 1e-10 * std::max(scale, 1.0);
  std::vector<char> loop_contact(M, 0);
  for (const Pt& p : hull) loop_contact[p.src] = 1;
  for (int i = 0; i < M; ++i) {
    if (loop_contact[i]) continue;
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < hull.size() && d > tol; ++k) {
      d = std::min(d, seg_dist(loop[i].x, loop[i].y, hull[k], hull[(k + 1) % hull.size()]));
    }
    if (d <= tol) loop_contact[i] = 1;
  }
  e.contact_mask.assign(samples, 0);
  for (int i = 0; i < M; ++i) {
    if (!loop[i].refl && loop_contact[i]) e.contact_mask[loop[i].src] = 1;
  }
  const std::size_t H = hull.size();
  std::vector<int> hull_at(M, -1);
  for (std::size_t k = 0; k < H; ++k) hull_at[hull[k].src] = static_cast<int>(k);
  auto edge_normal = [&](const Pt& p, const Pt& q) { return std::atan2(-(q.x - p.x), q.y - p.y); };
  auto is_bridge = [&](const Pt& p, const Pt& q) {
    const int steps = ((q.src - p.src) % M + M) % M;
    for (int j = 1; j < steps; ++j) {
      if (!loop_contact[(p.src + j) % M]) return true;
    }
    return false;
  };
  /// Tangent points between a contact sample and its non-contact neighbour, by interpolating the normal angle.
  std::vector<double> share(samples, 0.0), beta_leave(beta), beta_enter(beta);
  auto half_of = [&](int i) { return (planar || (i > 0 && i + 1 < samples)) ? 0.5 : 1.0; };
  const int segs = planar ? samples : samples - 1;
  for (int a = 0; a < segs; ++a) {
    const int b = (a + 1) % samples;
    const bool ca = e.contact_mask[a], cb = e.contact_mask[b];
    if (ca && cb) {
      share[a] += half_of(a);
      share[b] += half_of(b);
      continue;
    }
    if (!ca && !cb) continue;
    const int i = ca ? a : b, j = ca ? b : a;
    const int k = hull_at[i];
    double f = 0.0;
    if (k >= 0) {
      const Pt& v = hull[k];
      const double be = ca ? edge_normal(v, hull[(k + 1) % H]) : edge_normal(hull[(k + H - 1) % H], v);
      const double num = wrap_angle(be - beta[i]), den = wrap_angle(beta[j] - beta[i]);
      if (den != 0.0) f = std::clamp(num / den, 0.0, 1.0);
      double star = beta[i] + f * den;
      /// tangent point behind the hull vertex: trim the contact segment on the other side
      const int kk = ca ? a - 1 : b + 1;
      const int k2 = planar ? (kk + samples) % samples : kk;
      if (den != 0.0 && num / den < 0.0 && k2 >= 0 && k2 < samples && e.contact_mask[k2]) {
        const double den2 = wrap_angle(beta[k2] - beta[i]);
        const double g2 = den2 != 0.0 ? std::clamp(num / den2, 0.0, 1.0) : 0.0;
        share[i] -= half_of(i) * (2.0 * g2 - g2 * g2);
        share[k2] -= half_of(k2) * g2 * g2;
        star = beta[i] + g2 * den2;
      }
      (ca ? beta_leave : beta_enter)[i] = star;
    }
    share[i] += half_of(i) * (2.0 * f - f * f);
    share[j] += half_of(j) * f * f;
  }
  e.contact_share = share;
  e.gauss_curvature.assign(samples, 0.0);
  CompensatedSum on, off, smooth;
  for (int i = 0; i < samples; ++i) {
    if (share[i] > 0.0) e.gauss_curvature[i] = K[i];
    on.add(share[i] * dA[i]);
    off.add((1.0 - share[i]) * dA[i]);
    smooth.add(share[i] * K[i] * dA[i]);
  }
  e.contact_measure = on.value();
  e.off_contact_measure = off.value();
  CompensatedSum vm;
  for (std::size_t k = 0; k < H; ++k) {
    const Pt& p = hull[k];
    const Pt& q = hull[(k + 1) % H];
    e.hull.push_back({p.x, p.y});
    if (!is_bridge(p, q)) continue;
    const double be = edge_normal(p, q);
    if (!p.refl) {
      const double bp = beta_leave[loop[p.src].src];
      const double d = wrap_angle(be - bp);
      vm.add(planar ? d : band_mass(n, bp, bp + d));
    }
    if (!q.refl) {
      const double bq = beta_enter[loop[q.src].src];
      const double d = wrap_angle(bq - be);
      vm.add(planar ? d : band_mass(n, bq - d, bq));
    }
  }
  e.vertex_mass = vm.value();
  e.gauss_total = smooth.value() + e.vertex_mass;
  return e;
}

std::vector<CurvePoint> graph_as_curve(const std::vector<CurvePoint>& p) {
  std::vector<CurvePoint> c(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) c[i] = {p[i].r, p[i].z, -1.0, -p[i].dz, 0.0, p[i].ddz};
  return c;
}

}  // namespace

Jet smooth_bump(double x) {
  if (std::abs(x) >= 1.0) return {0.0, 0.0, 0.0};
  const double q = 1.0 - x * x;
  const double b = std::exp(1.0 - 1.0 / q);
  const double g = -2.0 * x / (q * q);
  return {b, b * g, b * (g * g - 2.0 / (q * q) - 8.0 * x * x / (q * q * q))};
}

AxisymProfile AxisymProfile::graph(int n, std::vector<double> r, std::vector<double> phi, std::vector<double> dphi,
                                   std::vector<double> d2phi) {
  const std::size_t N = r.size();
  if (n < 1) fail(ErrorKind::precondition, "profile.dim", "n must be at least 1");
  if (N < 2 || phi.size() != N || dphi.size() != N || d2phi.size() != N) {
    fail(ErrorKind::schema, "profile.samples", "graph profile arrays must have equal length >= 2");
  }
  AxisymProfile p;
  p.n_ = n;
  p.form_ = Form::graph;
  p.closed_ = false;
  for (std::size_t i = 0; i < N; ++i) {
    if (r[i] < 0.0 || (i > 0 && !(r[i] > r[i - 1]))) {
      fail(ErrorKind::precondition, "profile.radius", "graph radii must be non-negative and increasing");
    }
    p.pts_.push_back({r[i], phi[i], 1.0, dphi[i], 0.0, d2phi[i]});
  }
  p.s_ = std::move(r);
  return p;
}

AxisymProfile AxisymProfile::graph_function(int n, const std::function<Jet(double)>& phi, double r_max,
                                            int samples) {
  std::vector<double> r(samples), f(samples), df(samples), d2f(samples);
  for (int i = 0; i < samples; ++i) {
    r[i] = r_max * i / (samples - 1);
    const Jet j = phi(r[i]);
    f[i] = j.f;
    df[i] = j.df;
    d2f[i] = j.d2f;
  }
  AxisymProfile p = graph(n, std::move(r), std::move(f), std::move(df), std::move(d2f));
  p.f_ = [phi, r_max](double s) {
    const Jet j = phi(r_max - s);
    return CurvePoint{r_max - s, j.f, -1.0, -j.df, 0.0, j.d2f};
  };
  return p;
}

AxisymProfile AxisymProfile::curve(int n, CurveFunction f, double s0, double s1, int samples, bool closed) {
  if (n < 1) fail(ErrorKind::precondition, "profile.dim", "n must be at least 1");
  if (samples < 2 || !(s1 > s0)) fail(ErrorKind::schema, "profile.samples", "need >= 2 samples on s0 < s1");
  AxisymProfile p;
  p.n_ = n;
  p.form_ = Form::curve;
  p.closed_ = closed;
  for (int i = 0; i < samples; ++i) {
    const double s = s0 + (s1 - s0) * i / (samples - 1);
    p.s_.push_back(s);
    CurvePoint c = f(s);
    if (c.r < -1e-12) fail(ErrorKind::precondition, "profile.radius", "meridian crosses the axis");
    c.r = std::max(c.r, 0.0);
    p.pts_.push_back(c);
  }
  if (closed && (p.pts_.front().r > 1e-12 || p.pts_.back().r > 1e-12)) {
    fail(ErrorKind::precondition, "profile.closed", "closed meridian must start and end on the axis");
  }
  p.f_ = std::move(f);
  return p;
}

AxisymProfile AxisymProfile::curve_samples(int n, std::vector<double> r, std::vector<double> z) {
  const int N = static_cast<int>(r.size());
  if (N < 5 || z.size() != r.size()) fail(ErrorKind::schema, "profile.samples", "need >= 5 (r, z) samples");
  if (std::abs(r.front()) > 1e-12 || std::abs(r.back()) > 1e-12) {
    fail(ErrorKind::precondition, "profile.closed", "sampled meridian must start and end on the axis");
  }
  const double h = pi / (N - 1);
  auto ext = [N](const std::vector<double>& v, double sign) {
    return [&v, N, sign](int k) {
      if (k < 0) return sign * v[-k];
      if (k >= N) return sign * v[2 * (N - 1) - k];
      return v[k];
    };
  };
  std::vector<double> dr, ddr, dz, ddz;
  five_point(N, h, ext(r, -1.0), dr, ddr);
  five_point(N, h, ext(z, 1.0), dz, ddz);
  AxisymProfile p;
  p.n_ = n;
  p.form_ = Form::curve;
  p.closed_ = true;
  for (int i = 0; i < N; ++i) {
    if (r[i] < -1e-12) fail(ErrorKind::precondition, "profile.radius", "meridian crosses the axis");
    p.s_.push_back(h * i);
    p.pts_.push_back({std::max(r[i], 0.0), z[i], dr[i], dz[i], ddr[i], ddz[i]});
  }
  return p;
}

AxisymProfile AxisymProfile::polar(int n, const std::function<Jet(double)>& rho, int samples) {
  auto f = [rho](double s) {
    const double t = pi - s;
    const Jet j = rho(t);
    const double st = std::sin(t), ct = std::cos(t);
    const double rt = j.df * st + j.f * ct;
    const double zt = j.df * ct - j.f * st;
    const double rtt = j.d2f * st + 2.0 * j.df * ct - j.f * st;
    const double ztt = j.d2f * ct - 2.0 * j.df * st - j.f * ct;
    return CurvePoint{j.f * st, j.f * ct, -rt, -zt, rtt, ztt};
  };
  return curve(n, f, 0.0, pi, samples, true);
}

std::vector<double> AxisymProfile::weights() const {
  const std::size_t N = s_.size();
  const double h = (s_.back() - s_.front()) / static_cast<double>(N - 1);
  bool uniform = N >= 8;
  for (std::size_t i = 0; i + 1 < N && uniform; ++i) uniform = std::abs(s_[i + 1] - s_[i] - h) <= 1e-9 * h;
  if (!uniform) {
    std::vector<double> w(N, 0.0);
    for (std::size_t i = 0; i + 1 < N; ++i) {
      w[i] += 0.5 * (s_[i + 1] - s_[i]);
      w[i + 1] += 0.5 * (s_[i + 1] - s_[i]);
    }
    return w;
  }
  std::vector<double> w(N, h);
  /// fourth-order Gregory end corrections
  constexpr double g[3] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
  for (int k = 0; k < 3; ++k) {
    w[k] = g[k] * h;
    w[N - 1 - k] = g[k] * h;
  }
  return w;
}

AxisymProfile AxisymProfile::to_curve() const {
  if (form_ == Form::curve) return *this;
  AxisymProfile p;
  p.n_ = n_;
  p.form_ = Form::curve;
  p.closed_ = false;
  const double rmax = s_.back();
  const auto c = graph_as_curve(pts_);
  for (std::size_t i = s_.size(); i-- > 0;) {
    p.s_.push_back(rmax - s_[i]);
    p.pts_.push_back(c[i]);
  }
  p.f_ = f_;
  return p;
}

AxisymProfile AxisymProfile::to_graph() const {
  if (form_ == Form::graph) return *this;
  std::vector<double> r, phi, dphi, d2phi;
  for (std::size_t i = pts_.size(); i-- > 0;) {
    const CurvePoint& c = pts_[i];
    if (!(c.dr < 0.0)) fail(ErrorKind::precondition, "profile.graph", "meridian is not a graph over r");
    r.push_back(c.r);
    phi.push_back(c.z);
    dphi.push_back(c.dz / c.dr);
    d2phi.push_back((c.ddz * c.dr - c.dz * c.ddr) / (c.dr * c.dr * c.dr));
  }
  AxisymProfile p = graph(n_, std::move(r), std::move(phi), std::move(dphi), std::move(d2phi));
  p.f_ = f_;
  return p;
}

AxisymProfile AxisymProfile::scaled(double s) const {
  AxisymProfile p = *this;
  for (auto& c : p.pts_) {
    c.r *= s;
    c.z *= s;
    if (form_ == Form::curve) {
      c.dr *= s;
      c.dz *= s;
      c.ddr *= s;
      c.ddz *= s;
    } else {
      c.ddz /= s;
    }
  }
  if (form_ == Form::graph) {
    for (auto& v : p.s_) v *= s;
    p.f_.reset();
  } else if (f_) {
    p.f_ = [f = *f_, s](double t) {
      CurvePoint c = f(t);
      return CurvePoint{s * c.r, s * c.z, s * c.dr, s * c.dz, s * c.ddr, s * c.ddz};
    };
  }
  return p;
}

AxisymProfile AxisymProfile::resampled(int samples) const {
  if (!f_ || form_ != Form::curve) fail(ErrorKind::capability, "profile.resample", "needs an analytic meridian");
  return curve(n_, *f_, s_.front(), s_.back(), samples, closed_);
}

std::vector<double> AxisymProfile::meridian_curvature() const {
  const auto c = form_ == Form::graph ? graph_as_curve(pts_) : pts_;
  std::vector<double> k(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) k[i] = point_kappa(c[i]);
  return k;
}

std::vector<double> AxisymProfile::normal_r() const {
  const auto c = form_ == Form::graph ? graph_as_curve(pts_) : pts_;
  std::vector<double> v(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) v[i] = c[i].dz / point_speed(c[i]);
  return v;
}

std::vector<double> AxisymProfile::normal_z() const {
  const auto c = form_ == Form::graph ? graph_as_curve(pts_) : pts_;
  std::vector<double> v(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) v[i] = -c[i].dr / point_speed(c[i]);
  return v;
}

std::vector<double> AxisymProfile::speed() const {
  std::vector<double> v(pts_.size());
  for (std::size_t i = 0; i < pts_.size(); ++i) v[i] = point_speed(pts_[i]);
  return v;
}

std::vector<double> AxisymProfile::area_weights() const {
  std::vector<double> w = weights();
  const double sm = sphere_measure(n_ - 1);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] *= sm * std::pow(pts_[i].r, n_ - 1) * point_speed(pts_[i]);
  return w;
}

PlanarCurve PlanarCurve::circle(double cx, double cy, double radius, int samples) {
  return from_function(
      [=](double t) {
        const double c = std::cos(t), s = std::sin(t);
        return CurvePoint{cx + radius * c, cy + radius * s, -radius * s, radius * c, -radius * c, -radius * s};
      },
      samples);
}

PlanarCurve PlanarCurve::from_function(const CurveFunction& f, int samples) {
  if (samples < 8) fail(ErrorKind::schema, "curve.samples", "need >= 8 samples");
  PlanarCurve c;
  for (int i = 0; i < samples; ++i) c.pts_.push_back(f(2.0 * pi * i / samples));
  return c;
}

PlanarCurve PlanarCurve::polar(const std::function<Jet(double)>& rho, int samples, double cx, double cy) {
  return from_function(
      [&rho, cx, cy](double t) {
        const Jet j = rho(t);
        const double c = std::cos(t), s = std::sin(t);
        return CurvePoint{cx + j.f * c,
                          cy + j.f * s,
                          j.df * c - j.f * s,
                          j.df * s + j.f * c,
                          j.d2f * c - 2.0 * j.df * s - j.f * c,
                          j.d2f * s + 2.0 * j.df * c - j.f * s};
      },
      samples);
}

PlanarCurve PlanarCurve::from_samples(std::vector<double> x, std::vector<double> y) {
  const int N = static_cast<int>(x.size());
  if (N < 8 || y.size() != x.size()) fail(ErrorKind::schema, "curve.samples", "need >= 8 (x, y) samples");
  const double h = 2.0 * pi / N;
  auto per = [N](const std::vector<double>& v) { return [&v, N](int k) { return v[((k % N) + N) % N]; }; };
  std::vector<double> dx, ddx, dy, ddy;
  five_point(N, h, per(x), dx, ddx);
  five_point(N, h, per(y), dy, ddy);
  PlanarCurve c;
  for (int i = 0; i < N; ++i) c.pts_.push_back({x[i], y[i], dx[i], dy[i], ddx[i], ddy[i]});
  return c;
}

double PlanarCurve::step() const { return 2.0 * pi / static_cast<double>(pts_.size()); }

double PlanarCurve::length() const {
  CompensatedSum s;
  for (const auto& p : pts_) s.add(point_speed(p));
  return s.value() * step();
}

double PlanarCurve::signed_area() const {
  CompensatedSum s;
  for (const auto& p : pts_) s.add(p.r * p.dz - p.z * p.dr);
  return 0.5 * s.value() * step();
}

std::vector<double> PlanarCurve::curvature() const {
  std::vector<double> k(pts_.size());
  for (std::size_t i = 0; i < pts_.size(); ++i) k[i] = point_kappa(pts_[i]);
  return k;
}

std::vector<double> PlanarCurve::speed() const {
  std::vector<double> v(pts_.size());
  for (std::size_t i = 0; i < pts_.size(); ++i) v[i] = point_speed(pts_[i]);
  return v;
}

PlanarCurve PlanarCurve::reversed() const {
  PlanarCurve c;
  const std::size_t N = pts_.size();
  for (std::size_t i = 0; i < N; ++i) {
    CurvePoint p = pts_[(N - i) % N];
    p.dr = -p.dr;
    p.dz = -p.dz;
    c.pts_.push_back(p);
  }
  return c;
}

PlanarRegion PlanarRegion::make(PlanarCurve outer, std::vector<PlanarCurve> holes) {
  if (outer.size() == 0) fail(ErrorKind::precondition, "region.outer", "missing outer boundary");
  if (outer.signed_area() < 0.0) outer = outer.reversed();
  for (auto& h : holes) {
    if (h.signed_area() > 0.0) h = h.reversed();
  }
  std::vector<Segment> segs;
  std::vector<int> len;
  std::vector<char> per;
  add_segments(outer.points(), true, 0, segs);
  len.push_back(static_cast<int>(outer.size()));
  per.push_back(1);
  for (std::size_t k = 0; k < holes.size(); ++k) {
    add_segments(holes[k].points(), true, static_cast<int>(k + 1), segs);
    len.push_back(static_cast<int>(holes[k].size()));
    per.push_back(1);
  }
  if (any_crossing(std::move(segs), len, per)) {
    fail(ErrorKind::precondition, "region.simple", "boundary curves intersect");
  }
  for (std::size_t k = 0; k < holes.size(); ++k) {
    const auto& p = holes[k].points().front();
    if (!point_in_polygon(p.r, p.z, outer.points())) {
      fail(ErrorKind::precondition, "region.connected", "hole " + std::to_string(k) + " lies outside the outer curve");
    }
    for (std::size_t j = 0; j < holes.size(); ++j) {
      if (j != k && point_in_polygon(p.r, p.z, holes[j].points())) {
        fail(ErrorKind::precondition, "region.connected", "nested holes disconnect the region");
      }
    }
  }
  PlanarRegion r;
  r.outer_ = std::move(outer);
  r.holes_ = std::move(holes);
  return r;
}

double PlanarRegion::perimeter() const {
  CompensatedSum s;
  s.add(outer_.length());
  for (const auto& h : holes_) s.add(h.length());
  return s.value();
}

double PlanarRegion::area() const {
  CompensatedSum s;
  s.add(outer_.signed_area());
  for (const auto& h : holes_) s.add(h.signed_area());
  return s.value();
}

std::vector<double> revolution_mean_curvature(const AxisymProfile& profile) {
  const auto c = profile.form() == AxisymProfile::Form::graph ? graph_as_curve(profile.points()) : profile.points();
  std::vector<double> H(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) H[i] = point_H(profile.dim(), c[i]);
  return H;
}

RevolutionFunctionals revolution_functionals(const AxisymProfile& profile) {
  if (profile.form() != AxisymProfile::Form::curve || !profile.closed()) {
    fail(ErrorKind::precondition, "profile.closed", "functionals need a meridian closing on the axis");
  }
  const int n = profile.dim();
  const double sm = sphere_measure(n - 1);
  const double bv = ball_volume(n - 1);
  RevolutionFunctionals out;
  if (profile.function()) {
    const CurveFunction& f = *profile.function();
    const double a = profile.params().front(), b = profile.params().back();
    const auto P = integrate_adaptive(
        [&](double s) {
          const CurvePoint c = f(s);
          return std::pow(std::max(c.r, 0.0), n - 1) * point_speed(c);
        },
        a, b, 1e-13, 12);
    const auto V = integrate_adaptive(
        [&](double s) {
          const CurvePoint c = f(s);
          return std::pow(std::max(c.r, 0.0), n) * c.dz;
        },
        a, b, 1e-13, 12);
    out.perimeter = sm * P.value;
    out.perimeter_error = sm * P.error;
    out.volume = bv * V.value;
    out.volume_error = bv * V.error;
  } else {
    const auto w = profile.weights();
    const auto& p = profile.points();
    CompensatedSum P, V;
    for (std::size_t i = 0; i < p.size(); ++i) {
      P.add(w[i] * std::pow(p[i].r, n - 1) * point_speed(p[i]));
      V.add(w[i] * std::pow(p[i].r, n) * p[i].dz);
    }
    out.perimeter = sm * P.value();
    out.volume = bv * V.value();
    if (p.size() % 2 == 1) {
      CompensatedSum P2, V2;
      const double h2 = 2.0 * (profile.params()[1] - profile.params()[0]);
      for (std::size_t i = 0; i < p.size(); i += 2) {
        const double wi = (i == 0 || i + 1 == p.size()) ? 0.5 * h2 : h2;
        P2.add(wi * std::pow(p[i].r, n - 1) * point_speed(p[i]));
        V2.add(wi * std::pow(p[i].r, n) * p[i].dz);
      }
      out.perimeter_error = sm * std::abs(P2.value() - P.value());
      out.volume_error = bv * std::abs(V2.value() - V.value());
    }
  }
  std::vector<Pt> pts;
  for (const auto& c : profile.points()) {
    pts.push_back({c.r, c.z, 0, false});
    pts.push_back({-c.r, c.z, 0, true});
  }
  const auto h = monotone_chain(std::move(pts));
  double d = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    for (std::size_t j = i + 1; j < h.size(); ++j) d = std::max(d, std::hypot(h[i].x - h[j].x, h[i].y - h[j].y));
  }
  out.diameter = d;
  return out;
}

EnvelopeResult convex_envelope(const PlanarRegion& region) {
  const PlanarCurve& c = region.outer();
  const int N = static_cast<int>(c.size());
  if (N < 64) fail(ErrorKind::precondition, "envelope.samples", "need >= 64 boundary samples");
  std::vector<Pt> loop;
  std::vector<double> dA(N), K = c.curvature(), beta(N);
  const auto sp = c.speed();
  for (int i = 0; i < N; ++i) {
    const auto& p = c.points()[i];
    loop.push_back({p.r, p.z, i, false});
    dA[i] = sp[i] * c.step();
    beta[i] = std::atan2(-p.dr, p.dz);
  }
  return envelope_core(loop, N, dA, K, beta, true, 1);
}

EnvelopeResult convex_envelope(const AxisymProfile& profile) {
  if (profile.form() != AxisymProfile::Form::curve || !profile.closed()) {
    fail(ErrorKind::precondition, "profile.closed", "envelope needs a meridian closing on the axis");
  }
  const int N = static_cast<int>(profile.size());
  if (N < 64) fail(ErrorKind::precondition, "envelope.samples", "need >= 64 boundary samples");
  const auto& p = profile.points();
  {
    std::vector<Segment> segs;
    std::vector<CurvePoint> loop(p.begin(), p.end());
    for (int i = N - 2; i >= 1; --i) {
      CurvePoint q = p[i];
      q.r = -q.r;
      loop.push_back(q);
    }
    add_segments(loop, true, 0, segs);
    if (any_crossing(std::move(segs), {static_cast<int>(loop.size())}, {1})) {
      fail(ErrorKind::precondition, "envelope.simple", "meridian is self-intersecting");
    }
  }
  const int n = profile.dim();
  std::vector<Pt> loop;
  for (int i = 0; i < N; ++i) loop.push_back({p[i].r, p[i].z, i, false});
  for (int i = N - 2; i >= 1; --i) loop.push_back({-p[i].r, p[i].z, i, true});
  std::vector<double> K(N), beta(N);
  for (int i = 0; i < N; ++i) {
    K[i] = point_K(n, p[i]);
    beta[i] = std::atan2(-p[i].dr, p[i].dz);
  }
  std::vector<double> dA = profile.area_weights();
  return envelope_core(loop, N, dA, K, beta, false, n);
}

AlmgrenTerms almgren_identity_terms(const PlanarRegion& region) {
  AlmgrenTerms t;
  t.envelope = convex_envelope(region);
  t.perimeter = region.perimeter();
  t.lhs = t.perimeter - 2.0 * pi;
  const auto k = region.outer().curvature();
  const auto sp = region.outer().speed();
  const double h = region.outer().step();
  CompensatedSum t1, t2, t3;
  t1.add(t.envelope.off_contact_measure);
  for (const auto& hole : region.holes()) t1.add(hole.length());
  t.sup_H = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k.size(); ++i) {
    t.sup_H = std::max(t.sup_H, k[i]);
    const double w = t.envelope.contact_share[i] * sp[i] * h;
    t2.add((1.0 - k[i]) * w);
    t3.add((k[i] - t.envelope.gauss_curvature[i]) * w);
  }
  t.t1 = t1.value();
  t.t2 = t2.value();
  t.t3 = t3.value();
  t.residual = t.lhs - (t.t1 + t.t2 + t.t3);
  t.h_le_n = t.sup_H <= 1.0 + 1e-8;
  return t;
}

AlmgrenTerms almgren_identity_terms(const AxisymProfile& profile) {
  AlmgrenTerms t;
  const int n = profile.dim();
  t.envelope = convex_envelope(profile);
  t.perimeter = revolution_functionals(profile).perimeter;
  t.lhs = t.perimeter - sphere_measure(n);
  const auto H = revolution_mean_curvature(profile);
  const auto dA = profile.area_weights();
  CompensatedSum t2, t3;
  t.sup_H = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < H.size(); ++i) {
    t.sup_H = std::max(t.sup_H, H[i]);
    const double w = t.envelope.contact_share[i] * dA[i];
    const double a = std::pow(H[i] / n, n);
    t2.add((1.0 - a) * w);
    t3.add((a - t.envelope.gauss_curvature[i]) * w);
  }
  t.t1 = t.envelope.off_contact_measure;
  t.t2 = t2.value();
  t.t3 = t3.value();
  t.residual = t.lhs - (t.t1 + t.t2 + t.t3);
  t.h_le_n = t.sup_H <= n + 1e-8;
  return t;
}

PlanarStructure planar_structure(const PlanarRegion& region) {
  PlanarStructure s{PlanarRegion::make(region.outer())};
  CompensatedSum area, per;
  for (const auto& h : region.holes()) {
    area.add(-h.signed_area());
    per.add(h.length());
  }
  s.hole_area = area.value();
  s.hole_perimeter = per.value();
  s.delta = region.perimeter() - 2.0 * pi;
  s.hypothesis_ok = s.delta < 2.0 * pi;
  if (!region.holes().empty()) {
    s.perimeter_ratio = s.hole_perimeter / s.delta;
    s.area_ratio = s.hole_area / s.delta;
    s.area_ratio_sq = s.hole_area / (s.delta * s.delta);
  }
  return s;
}

ScaledProfile enforce_H_le_n(const AxisymProfile& profile) {
  const int n = profile.dim();
  double sup = -std::numeric_limits<double>::infinity();
  if (profile.function() && profile.form() == AxisymProfile::Form::curve) {
    const CurveFunction& f = *profile.function();
    const double a = profile.params().front(), b = profile.params().back();
    const int M = 16384;
    const double h = (b - a) / M;
    int best = 0;
    for (int i = 0; i <= M; ++i) {
      const double v = point_H(n, f(a + h * i));
      if (v > sup) {
        sup = v;
        best = i;
      }
    }
    double lo = a + h * std::max(best - 1, 0), hi = a + h * std::min(best + 1, M);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 80; ++it) {
      const double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
      if (point_H(n, f(x1)) > point_H(n, f(x2))) {
        hi = x2;
      } else {
        lo = x1;
      }
    }
    sup = std::max(sup, point_H(n, f(0.5 * (lo + hi))));
  } else {
    for (double v : revolution_mean_curvature(profile)) sup = std::max(sup, v);
  }
  const double s = std::max(sup / n, 1.0);
  return {s == 1.0 ? profile : profile.scaled(s), s};
}

Jet dent_shape(double x) {
  if (std::abs(x) >= 1.0) return {0.0, 0.0, 0.0};
  const double q = 1.0 - x * x;
  return {q * q * q * q, -8.0 * x * q * q * q, -8.0 * q * q * q + 48.0 * x * x * q * q};
}

AxisymProfile sphere_profile(int n, double radius, int samples) {
  return AxisymProfile::polar(n, [radius](double) { return Jet{radius, 0.0, 0.0}; }, samples);
}

AxisymProfile dented_sphere_profile(int n, double depth, double width, int samples) {
  if (!(depth > 0.0 && depth < 1.0) || !(width > 0.0 && width < 0.5 * pi)) {
    fail(ErrorKind::precondition, "dent.params", "need 0 < depth < 1 and 0 < width < pi/2");
  }
  return AxisymProfile::polar(
      n,
      [depth, width](double t) {
        const Jet b = dent_shape(t / width);
        return Jet{1.0 - depth * b.f, -depth * b.df / width, -depth * b.d2f / (width * width)};
      },
      samples);
}

AxisymProfile zonal_profile(int n, const std::function<Jet(double)>& u, int samples) {
  return AxisymProfile::polar(
      n,
      [u](double t) {
        const Jet j = u(t);
        return Jet{1.0 + j.f, j.df, j.d2f};
      },
      samples);
}

}  // namespace isostab
