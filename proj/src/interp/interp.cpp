#include "g2mp/interp/interp.hpp"

#include <algorithm>
#include <random>

#include "g2mp/error.hpp"

namespace g2mp {
namespace {

long prec() { return static_cast<long>(working_precision()); }

template <class P, class T>
T eval_impl(const P& p, const T& x, const T& y, const T& z) {
  // Horner in X over rows, direct powers in Y and Z
  const int dx = p.degree(0), dy = p.degree(1), dz = p.degree(2);
  if (dx < 0) return T(0);
  std::vector<T> px(dx + 1, T(1)), py(dy + 1, T(1)), pz(dz + 1, T(1));
  for (int i = 1; i <= dx; ++i) px[i] = px[i - 1] * x;
  for (int i = 1; i <= dy; ++i) py[i] = py[i - 1] * y;
  for (int i = 1; i <= dz; ++i) pz[i] = pz[i - 1] * z;
  T acc(0);
  for (const auto& [e, c] : p.terms) acc = acc + c * (px[e[0]] * py[e[1]] * pz[e[2]]);
  return acc;
}

// Binomial expansion of (V + s)^n.
std::vector<Complex> binomial_row(int n, const Complex& s) {
  std::vector<Complex> out(n + 1);
  Integer b = 1;
  Complex sp(1);
  std::vector<Complex> spow(n + 1);
  for (int i = 0; i <= n; ++i) {
    spow[i] = sp;
    sp = sp * s;
  }
  for (int i = 0; i <= n; ++i) {
    // coefficient of V^i is C(n, i) s^(n-i)
    out[i] = spow[n - i] * Complex(Real(b.get_d()));
    b = b * (n - i) / (i + 1);
  }
  return out;
}

// Random node on a circle, deterministic in the generator.
Complex random_on(const NodeCircle& c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return circle_nodes(c, 1, u(rng))[0];
}

int trimmed_degree(UniPoly p, const Real& rel) {
  trim(p, rel);
  return p.degree();
}

}  // namespace

Complex eval(const TriPoly& p, const Complex& x, const Complex& y, const Complex& z) { return eval_impl(p, x, y, z); }

Complex eval(const TriPolyQ& p, const Complex& x, const Complex& y, const Complex& z) {
  TriPoly f;
  for (const auto& [e, c] : p.terms) f.terms[e] = Complex(to_real(c));
  return eval_impl(f, x, y, z);
}

Rational eval(const TriPolyQ& p, const Rational& x, const Rational& y, const Rational& z) {
  return eval_impl(p, x, y, z);
}

void drop_small(TriPoly& p, const Real& rel_tol) {
  Real mx(0L);
  for (const auto& [e, c] : p.terms) mx = max(mx, abs(c));
  const Real bound = mx * rel_tol;
  for (auto it = p.terms.begin(); it != p.terms.end();) {
    if (abs(it->second) <= bound) it = p.terms.erase(it);
    else ++it;
  }
}

TriPoly shift(const TriPoly& p, const std::array<Complex, 3>& s) {
  if (s[0].is_zero() && s[1].is_zero() && s[2].is_zero()) return p;
  TriPoly out;
  for (const auto& [e, c] : p.terms) {
    const auto bx = binomial_row(e[0], s[0]);
    const auto by = binomial_row(e[1], s[1]);
    const auto bz = binomial_row(e[2], s[2]);
    for (int i = 0; i <= e[0]; ++i) {
      for (int j = 0; j <= e[1]; ++j) {
        const Complex cij = c * bx[i] * by[j];
        for (int k = 0; k <= e[2]; ++k) {
          auto& slot = out.terms[{i, j, k}];
          slot = slot + cij * bz[k];
        }
      }
    }
  }
  drop_small(out, pow2(-3 * prec() / 4));
  return out;
}

std::vector<Complex> circle_nodes(const NodeCircle& c, int n, double phase) {
  std::vector<Complex> out;
  out.reserve(n);
  const Complex center(c.center);
  const Real r(c.radius);
  for (int j = 0; j < n; ++j) {
    const Real t = Real(2L) * (Real(static_cast<long>(j)) + Real(phase)) / Real(static_cast<long>(n));
    out.push_back(center + exp_i_pi(Complex(t)) * r);
  }
  return out;
}

UniInterpolator::UniInterpolator(std::vector<Complex> nodes) : nodes_(std::move(nodes)) {
  const std::size_t n = nodes_.size();
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "interpolation needs nodes");
  Real span(1L);
  for (const auto& x : nodes_) span = max(span, abs(x));
  const Real gap = ldexp(span, -prec() / 4);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (abs(nodes_[i] - nodes_[j]) < gap) throw Error(ErrorCode::kIllConditioned, "interpolation nodes cluster");
    }
  }
  const UniPoly master = poly_product_tree(nodes_);
  basis_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    UniPoly q = synthetic_divide(master, nodes_[i]);
    const Complex inv = Complex(1) / q.eval(nodes_[i]);
    for (auto& c : q.coeffs) c = c * inv;
    q.coeffs.resize(n, Complex(0));
    basis_[i] = std::move(q.coeffs);
  }
}

UniPoly UniInterpolator::operator()(const std::vector<Complex>& values) const {
  const std::size_t n = nodes_.size();
  if (values.size() != n) throw Error(ErrorCode::kInvalidArgument, "value count differs from node count");
  std::vector<Complex> c(n, Complex(0));
  ComplexScratch s;
  for (std::size_t i = 0; i < n; ++i) {
    if (values[i].is_zero()) continue;
    for (std::size_t m = 0; m < n; ++m) fma_into(c[m], values[i], basis_[i][m], s);
  }
  return UniPoly(std::move(c));
}

UniPoly interp_poly_uni(const std::vector<Complex>& nodes, const std::vector<Complex>& values) {
  UniPoly p = UniInterpolator(nodes)(values);
  Real vmax(0L);
  for (const auto& v : values) vmax = max(vmax, abs(v));
  const Real bound = ldexp(vmax, -3 * prec() / 4);
  while (!p.coeffs.empty() && abs(p.coeffs.back()) <= bound) p.coeffs.pop_back();
  return p;
}

std::pair<UniPoly, UniPoly> cauchy_interp_uni(const std::vector<Complex>& nodes, const std::vector<Complex>& values,
                                              int degA, int degB, bool exact) {
  const int n = static_cast<int>(nodes.size());
  if (degA < 0 || degB < 0 || n < degA + degB + 1) {
    throw Error(ErrorCode::kInvalidArgument, "Cauchy interpolation needs degA + degB + 1 nodes");
  }
  const UniPoly g = poly_product_tree(nodes);
  const UniPoly f = interp_poly_uni(nodes, values);
  EuclidRow row;
  if (f.degree() <= degA) {
    row.r = f.is_zero() ? UniPoly::constant(Complex(0)) : f;
    row.t = UniPoly::constant(Complex(1));
  } else {
    // Values carry rounding noise amplified by the node geometry; anything
    // below 2^(-N/2) of a step is a cancellation, not a lost coefficient.
    row = ext_euclid_row(g, f, degA + 1, static_cast<int>(prec() / 2));
  }
  Real scale = max(max_abs_coeff(row.r), max_abs_coeff(row.t));
  const Real rel = pow2(-prec() / 2);
  for (UniPoly* p : {&row.r, &row.t}) {
    while (!p->coeffs.empty() && abs(p->coeffs.back()) <= scale * rel) p->coeffs.pop_back();
  }
  if (row.t.is_zero()) throw Error(ErrorCode::kDegenerate, "Cauchy denominator vanished");
  if (row.t.degree() > degB) throw Error(ErrorCode::kNumeric, "function exceeds the Cauchy degree bounds");
  // consistency at every node, relative to the two sides
  for (int i = 0; i < n; ++i) {
    if (!values[i].is_finite()) throw Error(ErrorCode::kNumeric, "non-finite value");
    const Complex rv = row.r.eval(nodes[i]);
    const Complex tv = row.t.eval(nodes[i]) * values[i];
    if (abs(rv - tv) > ldexp(abs(rv) + abs(tv), -prec() / 4)) {
      throw Error(ErrorCode::kNumeric, "Cauchy interpolant misses a node");
    }
  }
  if (exact && (row.r.degree() < degA || row.t.degree() < degB)) {
    throw Error(ErrorCode::kDegenerate, "degree drop on this instance");
  }
  return {std::move(row.r), std::move(row.t)};
}

TriPoly interp_poly_multi(const TriGrid& grid, const std::vector<Complex>& values) {
  const std::size_t nx = grid.x.size(), ny = grid.y.size(), nz = grid.z.size();
  if (values.size() != grid.size()) throw Error(ErrorCode::kInvalidArgument, "grid value count mismatch");
  const UniInterpolator ix(grid.x), iy(grid.y), iz(grid.z);
  std::vector<Complex> c(values);
  std::vector<Complex> line;
  // X direction
  line.resize(nx);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t k = 0; k < nz; ++k) {
      for (std::size_t i = 0; i < nx; ++i) line[i] = c[grid.index(i, j, k)];
      const UniPoly p = ix(line);
      for (std::size_t i = 0; i < nx; ++i) c[grid.index(i, j, k)] = p.coeffs[i];
    }
  }
  line.resize(ny);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t k = 0; k < nz; ++k) {
      for (std::size_t j = 0; j < ny; ++j) line[j] = c[grid.index(i, j, k)];
      const UniPoly p = iy(line);
      for (std::size_t j = 0; j < ny; ++j) c[grid.index(i, j, k)] = p.coeffs[j];
    }
  }
  line.resize(nz);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t k = 0; k < nz; ++k) line[k] = c[grid.index(i, j, k)];
      const UniPoly p = iz(line);
      for (std::size_t k = 0; k < nz; ++k) c[grid.index(i, j, k)] = p.coeffs[k];
    }
  }
  TriPoly out;
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t k = 0; k < nz; ++k) {
        const Complex& v = c[grid.index(i, j, k)];
        if (!v.is_zero()) out.terms[{static_cast<int>(i), static_cast<int>(j), static_cast<int>(k)}] = v;
      }
    }
  }
  drop_small(out, pow2(-prec() / 2));
  return out;
}

TriRat interp_rat_tri(const TriEvaluator& f, int component, const DegreeProfile& profile,
                      const std::array<Complex, 3>& shift_pt, const RatTriOptions& opt) {
  const int dta = profile.num.total, dtb = profile.den.total;
  if (dta < 0 || dtb < 0) throw Error(ErrorCode::kInvalidArgument, "profile lacks total degrees");
  const int ny = std::max(profile.num.y, profile.den.y) + 1;
  const int nz = std::max(profile.num.z, profile.den.z) + 1;
  const int nx = dta + dtb + 1 + opt.extra_nodes;
  std::vector<Complex> tnodes = circle_nodes(NodeCircle{}, nx);
  const Real rx(opt.x.radius);
  std::vector<Complex> xs;
  for (const auto& t : tnodes) xs.push_back(t * rx);
  int since_rotation = 0;

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> phase(0.0, 1.0);
  // independent phases keep Y and Z nodes from lining up with each other
  std::vector<Complex> ys = circle_nodes(opt.y, ny, phase(rng)), zs = circle_nodes(opt.z, nz, phase(rng));
  // per line: numerator and denominator coefficients in powers of X
  std::vector<std::vector<Complex>> la(ny * nz), lb(ny * nz);
  std::vector<char> done(ny * nz, 0);
  std::vector<int> zfail(nz, 0);
  int retries = 0;
  int common_drops = 0;
  int successes = 0;
  const int budget = opt.max_retries * (ny + nz);

  for (int j = 0; j < ny; ++j) {
    for (int k = 0; k < nz; ++k) {
      if (done[j * nz + k]) continue;
      try {
        std::vector<Complex> vals(nx);
        for (int i = 0; i < nx; ++i) {
          const auto v = f(shift_pt[0] + xs[i], shift_pt[1] + xs[i] * ys[j], shift_pt[2] + xs[i] * zs[k]);
          vals[i] = v.at(component);
        }
        auto [r, t] = cauchy_interp_uni(tnodes, vals, dta, dtb, false);
        const int drop_a = dta - r.degree(), drop_b = dtb - t.degree();
        if (drop_a > 0 || drop_b > 0) {
          // A common factor on every line, before any line has worked,
          // means both A and B vanish at the shift point.
          if (drop_a == drop_b && ++common_drops >= 3 && successes == 0) {
            throw Error(ErrorCode::kNormalizationZero, "numerator and denominator vanish at the shift point");
          }
          throw Error(ErrorCode::kDegenerate, "degree drop on this instance");
        }
        const Complex t0 = t.coeff(0);
        if (abs(t0) <= ldexp(max_abs_coeff(t), -prec() / 4)) {
          throw Error(ErrorCode::kNormalizationZero, "denominator constant term vanishes; shift the center");
        }
        const Complex inv = Complex(1) / t0;
        std::vector<Complex> a(dta + 1, Complex(0)), b(dtb + 1, Complex(0));
        Real rp(1L);
        for (int m = 0; m <= std::max(dta, dtb); ++m) {
          if (m <= dta) a[m] = r.coeff(m) * inv / rp;
          if (m <= dtb) b[m] = t.coeff(m) * inv / rp;
          rp *= rx;
        }
        la[j * nz + k] = std::move(a);
        lb[j * nz + k] = std::move(b);
        done[j * nz + k] = 1;
        ++successes;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kNormalizationZero || e.code() == ErrorCode::kInvalidArgument) throw;
        if (++retries > budget) throw;
        // Resample: a repeatedly failing Z node goes, otherwise the Y node.
        // Failures across many lines point at the X nodes themselves (a
        // pole through the center), which are then rotated.
        std::uniform_real_distribution<double> u(0.0, 1.0);
        if (++since_rotation >= 3) {
          since_rotation = 0;
          tnodes = circle_nodes(NodeCircle{}, nx, u(rng));
          for (int i = 0; i < nx; ++i) xs[i] = tnodes[i] * rx;
          std::fill(done.begin(), done.end(), 0);
          std::fill(zfail.begin(), zfail.end(), 0);
        } else if (++zfail[k] >= 2) {
          zfail[k] = 0;
          zs[k] = circle_nodes(opt.z, 1, u(rng))[0];
          for (int jj = 0; jj < ny; ++jj) done[jj * nz + k] = 0;
        } else {
          ys[j] = circle_nodes(opt.y, 1, u(rng))[0];
          for (int kk = 0; kk < nz; ++kk) done[j * nz + kk] = 0;
        }
        j = -1;  // restart the sweep; completed lines are skipped
        break;
      }
    }
  }

  // coefficient of X^m as a polynomial in (Y, Z), then back to (x, y, z)
  TriGrid g2{{Complex(0)}, ys, zs};
  auto assemble = [&](const std::vector<std::vector<Complex>>& lines, int dt) {
    TriPoly out;
    std::vector<Complex> vals(ny * nz);
    for (int m = 0; m <= dt; ++m) {
      for (int jk = 0; jk < ny * nz; ++jk) vals[jk] = lines[jk][m];
      const TriPoly c = interp_poly_multi(g2, vals);
      for (const auto& [e, v] : c.terms) {
        const int a = m - e[1] - e[2];
        if (a < 0) continue;  // impossible monomials carry only rounding noise
        out.terms[{a, e[1], e[2]}] = v;
      }
    }
    return out;
  };
  TriRat res;
  res.num = assemble(la, dta);
  res.den = assemble(lb, dtb);
  const std::array<Complex, 3> back = {-shift_pt[0], -shift_pt[1], -shift_pt[2]};
  res.num = shift(res.num, back);
  res.den = shift(res.den, back);
  drop_small(res.num, pow2(-prec() / 2));
  drop_small(res.den, pow2(-prec() / 2));
  res.normalization = "den(shift) = 1";
  return res;
}

std::vector<DegreeProfile> discover_degrees(const TriEvaluator& f, const DegreeHints& h) {
  std::mt19937_64 rng(h.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<DegreeProfile> best;
  const Real rel = pow2(-prec() / 2);

  // One line: returns per-component (deg r, deg t), or nothing if the
  // evaluator failed somewhere on it.
  auto probe = [&](int bound, const std::function<std::array<Complex, 3>(const Complex&)>& point,
                   const NodeCircle& circle) -> std::vector<std::pair<int, int>> {
    const int n = 2 * bound + 2;
    const std::vector<Complex> tn = circle_nodes(NodeCircle{}, n, 0.5 * u(rng));
    std::vector<std::vector<Complex>> vals;
    for (int i = 0; i < n; ++i) {
      const Complex v = Complex(circle.center) + tn[i] * Real(circle.radius);
      const auto p = point(v);
      const auto out = f(p[0], p[1], p[2]);
      if (vals.empty()) vals.resize(out.size(), std::vector<Complex>(n));
      for (std::size_t c = 0; c < out.size(); ++c) vals[c][i] = out[c];
    }
    std::vector<std::pair<int, int>> degs;
    for (const auto& v : vals) {
      auto [r, t] = cauchy_interp_uni(tn, v, bound, bound + 1, false);
      degs.emplace_back(trimmed_degree(r, rel), trimmed_degree(t, rel));
    }
    return degs;
  };

  int stable = 0;
  for (int round = 0; round < h.max_rounds; ++round) {
    bool changed = false;
    auto absorb = [&](const std::vector<std::pair<int, int>>& d, int which) {
      if (best.empty()) best.resize(d.size());
      for (std::size_t c = 0; c < d.size(); ++c) {
        int* na = which == 0 ? &best[c].num.x : which == 1 ? &best[c].num.y : which == 2 ? &best[c].num.z : &best[c].num.total;
        int* nb = which == 0 ? &best[c].den.x : which == 1 ? &best[c].den.y : which == 2 ? &best[c].den.z : &best[c].den.total;
        if (d[c].first > *na) { *na = d[c].first; changed = true; }
        if (d[c].second > *nb) { *nb = d[c].second; changed = true; }
      }
    };
    for (int attempt = 0; attempt < 4; ++attempt) {
      try {
        const Complex y = random_on(h.y, rng), z = random_on(h.z, rng);
        absorb(probe(h.max_x, [&](const Complex& v) { return std::array<Complex, 3>{v, y, z}; }, h.x), 0);
        break;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kInvalidArgument || attempt == 3) throw;
      }
    }
    for (int attempt = 0; attempt < 4; ++attempt) {
      try {
        const Complex x = random_on(h.x, rng), z = random_on(h.z, rng);
        absorb(probe(h.max_y, [&](const Complex& v) { return std::array<Complex, 3>{x, v, z}; }, h.y), 1);
        break;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kInvalidArgument || attempt == 3) throw;
      }
    }
    for (int attempt = 0; attempt < 4; ++attempt) {
      try {
        const Complex x = random_on(h.x, rng), y = random_on(h.y, rng);
        absorb(probe(h.max_z, [&](const Complex& v) { return std::array<Complex, 3>{x, y, v}; }, h.z), 2);
        break;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kInvalidArgument || attempt == 3) throw;
      }
    }
    for (int attempt = 0; attempt < 4; ++attempt) {
      try {
        // lines through a shifted center: (s0 + X, s1 + X y, s2 + X z)
        const Real sr(h.shift_radius * u(rng));
        const Complex s0 = Complex(h.x.center) + circle_nodes(NodeCircle{}, 1, u(rng))[0] * sr;
        const Complex s1 = Complex(h.y.center) + circle_nodes(NodeCircle{}, 1, u(rng))[0] * sr;
        const Complex s2 = Complex(h.z.center) + circle_nodes(NodeCircle{}, 1, u(rng))[0] * sr;
        const Complex y = circle_nodes(NodeCircle{}, 1, u(rng))[0];
        const Complex z = circle_nodes(NodeCircle{}, 1, u(rng))[0];
        const NodeCircle xc{{0.0, 0.0}, h.x.radius};
        absorb(probe(h.max_total,
                     [&](const Complex& v) { return std::array<Complex, 3>{s0 + v, s1 + v * y, s2 + v * z}; }, xc),
               3);
        break;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kInvalidArgument || attempt == 3) throw;
      }
    }
    stable = changed ? 0 : stable + 1;
    if (round + 1 >= h.min_rounds && stable >= 1) return best;
  }
  throw Error(ErrorCode::kUnstable, "degree probes did not stabilize");
}

TriPolyQ reconstruct(const TriPoly& p, const Integer& den_bound, const Real& tol) {
  TriPolyQ out;
  for (const auto& [e, c] : p.terms) {
    if (abs(c.im) > tol) throw Error(ErrorCode::kNoConvergent, "coefficient has an imaginary part");
    const Rational q = rational_reconstruct(c.re, den_bound, tol);
    if (q != 0) out.terms[e] = q;
  }
  return out;
}

TriRatQ primitive(const TriRatQ& f) {
  Integer l = 1, g = 0;
  for (const TriPolyQ* p : {&f.num, &f.den}) {
    for (const auto& [e, c] : p->terms) l = lcm(l, Integer(c.get_den()));
  }
  for (const TriPolyQ* p : {&f.num, &f.den}) {
    for (const auto& [e, c] : p->terms) g = gcd(g, Integer(c.get_num() * (l / c.get_den())));
  }
  if (g == 0) return f;
  Rational s(l, g);
  if (!f.den.terms.empty() && f.den.terms.rbegin()->second < 0) s = -s;
  TriRatQ out;
  for (const auto& [e, c] : f.num.terms) out.num.terms[e] = c * s;
  for (const auto& [e, c] : f.den.terms) out.den.terms[e] = c * s;
  return out;
}

}  // namespace g2mp
