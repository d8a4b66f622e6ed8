#include "g2mp/modpoly/modpoly.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "g2mp/error.hpp"
#include "g2mp/inversion/inversion.hpp"
#include "g2mp/siegel/reduction.hpp"
#include "g2mp/theta/theta.hpp"

namespace g2mp {

int isogeny_count(int p) { return p * p * p + p * p + p + 1; }

const CosetTable& modular_cosets(int p, InvariantKind kind) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, CosetTable> cache;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_pair(p, static_cast<int>(kind));
  auto it = cache.find(key);
  if (it == cache.end()) {
    CosetTable t = kind == InvariantKind::kThetaQuotient
                       ? enumerate_cosets(Subgroup::gamma24(), Subgroup::gamma24_gamma0(p))
                       : enumerate_cosets(Subgroup::gamma2(), Subgroup::gamma0(p));
    it = cache.emplace(key, std::move(t)).first;
  }
  return it->second;
}

std::vector<std::array<Complex, 3>> isogenous_invariants(const PeriodMatrix& omega, int p, InvariantKind kind,
                                                         const CosetTable& cosets, const PrecisionContext& ctx) {
  PrecisionGuard guard(ctx);
  std::vector<std::array<Complex, 3>> out;
  out.reserve(cosets.size());
  for (const auto& g : cosets.representatives) {
    const PeriodMatrix w = act(g, omega).scaled(p);
    out.push_back(invariants_at(w, kind, ctx).v);
  }
  return out;
}

EvaluatedModPoly evaluate_at(const PeriodMatrix& omega, int p, InvariantKind kind, const CosetTable& cosets,
                             const PrecisionContext& ctx) {
  PrecisionGuard guard(ctx);
  std::vector<std::array<Complex, 3>> f;
  try {
    f = isogenous_invariants(omega, p, kind, cosets, ctx);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kVanishingDenominator || e.code() == ErrorCode::kProductOfElliptic ||
        e.code() == ErrorCode::kVanishing)
      throw Error(ErrorCode::kNearDenominator, e.what());
    throw;
  }
  const long limit = ctx.n_bits / 8;
  for (const auto& t : f) {
    for (const auto& c : t) {
      if (!c.is_finite() || c.exponent() > limit) throw Error(ErrorCode::kNearDenominator, "root out of range");
    }
  }
  EvaluatedModPoly r;
  r.p = p;
  r.kind = kind;
  r.omega = omega;
  std::vector<Complex> roots;
  roots.reserve(f.size());
  for (const auto& t : f) roots.push_back(t[0]);
  r.phi1 = poly_product_tree(roots);
  const int q = static_cast<int>(f.size());
  r.psi2.coeffs.assign(q, Complex(0));
  r.psi3.coeffs.assign(q, Complex(0));
  ComplexScratch s;
  for (int g = 0; g < q; ++g) {
    const UniPoly quo = synthetic_divide(r.phi1, roots[g]);
    for (int l = 0; l < q; ++l) {
      fma_into(r.psi2.coeffs[l], f[g][1], quo.coeffs[l], s);
      fma_into(r.psi3.coeffs[l], f[g][2], quo.coeffs[l], s);
    }
  }
  return r;
}

SpecializedModPoly specialize(const ModularPolynomialSet& set, const std::array<Complex, 3>& v) {
  const Complex d = eval(set.den, v[0], v[1], v[2]);
  if (d.is_zero()) throw Error(ErrorCode::kNearDenominator, "denominator vanishes at the point");
  auto fill = [&](const std::map<int, TriPolyQ>& num, UniPoly& out) {
    int top = -1;
    for (const auto& [l, n] : num) top = std::max(top, l);
    out.coeffs.assign(top + 1, Complex(0));
    for (const auto& [l, n] : num) out.coeffs[l] = eval(n, v[0], v[1], v[2]) / d;
  };
  SpecializedModPoly s;
  fill(set.phi1_num, s.phi1);
  fill(set.psi2_num, s.psi2);
  fill(set.psi3_num, s.psi3);
  return s;
}

// ---------------------------------------------------------------- file format

namespace {

void write_section(std::ostream& os, const ModularPolynomialSet& set, const std::string& name,
                   const std::map<int, TriPolyQ>* polys, const TriPolyQ* den) {
  os << "MODPOLY v1\n"
     << "kind=" << to_string(set.kind) << "\n"
     << "p=" << set.p << "\n"
     << "poly=" << name << "\n";
  auto line = [&](const Exponent& e, const Rational& c) {
    if (c.get_den() != 1) throw Error(ErrorCode::kInvalidArgument, "non-integral coefficient in " + name);
    os << e[0] << ' ' << e[1] << ' ' << e[2] << ' ' << c.get_num().get_str() << '\n';
  };
  if (den != nullptr) {
    for (const auto& [e, c] : den->terms) line(e, c);
    return;
  }
  for (const auto& [l, poly] : *polys) {
    for (const auto& [e, c] : poly.terms) {
      os << l << ' ';
      line(e, c);
    }
  }
}

}  // namespace

void write_modpoly(std::ostream& os, const ModularPolynomialSet& set) {
  write_section(os, set, "phi1", &set.phi1_num, nullptr);
  write_section(os, set, "psi2", &set.psi2_num, nullptr);
  write_section(os, set, "psi3", &set.psi3_num, nullptr);
  write_section(os, set, "den", nullptr, &set.den);
}

ModularPolynomialSet read_modpoly(std::istream& is) {
  ModularPolynomialSet set;
  std::string line, poly;
  bool have_kind = false, have_p = false;
  int lineno = 0;
  auto bad = [&](const std::string& why) {
    return Error(ErrorCode::kIo, "line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line == "MODPOLY v1") {
      poly.clear();
      continue;
    }
    if (line.rfind("kind=", 0) == 0) {
      const InvariantKind k = invariant_kind_from_string(line.substr(5));
      if (have_kind && k != set.kind) throw bad("mixed kinds");
      set.kind = k;
      have_kind = true;
      continue;
    }
    if (line.rfind("p=", 0) == 0) {
      const int p = std::stoi(line.substr(2));
      if (have_p && p != set.p) throw bad("mixed primes");
      set.p = p;
      have_p = true;
      continue;
    }
    if (line.rfind("poly=", 0) == 0) {
      poly = line.substr(5);
      if (poly != "phi1" && poly != "psi2" && poly != "psi3" && poly != "den") throw bad("unknown poly '" + poly + "'");
      continue;
    }
    if (line.rfind("alpha_", 0) == 0 || line.rfind("c_", 0) == 0) continue;
    if (poly.empty()) throw bad("monomial before poly= header");
    std::istringstream ls(line);
    int l = 0;
    Exponent e{};
    std::string coeff;
    if (poly != "den" && !(ls >> l)) throw bad("missing coefficient index");
    if (!(ls >> e[0] >> e[1] >> e[2] >> coeff)) throw bad("malformed monomial");
    std::string rest;
    if (ls >> rest) throw bad("trailing data");
    if (l < 0 || e[0] < 0 || e[1] < 0 || e[2] < 0) throw bad("negative index");
    Integer c;
    if (c.set_str(coeff, 10) != 0) throw bad("bad integer '" + coeff + "'");
    if (c == 0) continue;
    TriPolyQ* target = poly == "den"    ? &set.den
                       : poly == "phi1" ? &set.phi1_num[l]
                       : poly == "psi2" ? &set.psi2_num[l]
                                        : &set.psi3_num[l];
    if (target->terms.count(e) != 0) throw bad("duplicate monomial");
    target->terms[e] = Rational(c);
  }
  if (!have_kind || !have_p) throw Error(ErrorCode::kIo, "missing kind= or p= header");
  return set;
}

void write_modpoly_file(const std::string& path, const ModularPolynomialSet& set) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::kIo, "cannot write " + path);
  write_modpoly(os, set);
  if (!os) throw Error(ErrorCode::kIo, "write failed: " + path);
}

ModularPolynomialSet read_modpoly_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIo, "cannot read " + path);
  return read_modpoly(is);
}

// ---------------------------------------------------------------- Humbert

long sigma1(long n) {
  long s = 0;
  for (long d = 1; d * d <= n; ++d) {
    if (n % d == 0) s += d == n / d ? d : d + n / d;
  }
  return s;
}

long humbert_sigma_sum(int p) {
  const long pp = static_cast<long>(p) * p;
  long s = 0;
  for (long x = 1; x * x < pp; ++x) {
    if ((pp - x * x) % 4 == 0) s += sigma1((pp - x * x) / 4);
  }
  return s;
}

HumbertDegreeOracle humbert_degree(int p) {
  const long pp = static_cast<long>(p) * p;
  long s = 0;
  for (long x = -p + 1; x < p; ++x) {
    if ((pp - x * x) % 4 == 0) s += sigma1((pp - x * x) / 4);
  }
  HumbertDegreeOracle h;
  h.p = p;
  h.a_value = 24 * s + 12 * pp - 2;
  h.component_degree = h.a_value / 10 - 1;
  // v(4) = 1/2, v(p^2) = 1 otherwise
  h.h_degree = p == 2 ? 2 * (h.a_value / 2 - 5) : h.a_value / 2 - 5;
  return h;
}

// ---------------------------------------------------------------- verify

bool VerifyReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

const VerifyCheck* VerifyReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

Exponent swap_yz(const Exponent& e) { return {e[0], e[2], e[1]}; }

bool same_under(const TriPolyQ& a, const TriPolyQ& b, Exponent (*perm)(const Exponent&)) {
  if (a.terms.size() != b.terms.size()) return false;
  for (const auto& [e, c] : a.terms) {
    auto it = b.terms.find(perm(e));
    if (it == b.terms.end() || it->second != c) return false;
  }
  return true;
}

int mod(long a, int m) { return static_cast<int>(((a % m) + m) % m); }

// |sum c_l x^l| against sum |c_l| |x|^l
std::pair<Complex, Real> eval_with_scale(const UniPoly& p, const Complex& x) {
  const Real ax = abs(x);
  Complex acc(0);
  Real scale(0L);
  for (int i = p.degree(); i >= 0; --i) {
    acc = acc * x + p.coeffs[i];
    scale = scale * ax + abs(p.coeffs[i]);
  }
  return {acc, scale};
}

UniPoly derivative(const UniPoly& p) {
  UniPoly d;
  for (int i = 1; i <= p.degree(); ++i) d.coeffs.push_back(p.coeffs[i] * Real(static_cast<long>(i)));
  return d;
}

}  // namespace

VerifyReport verify(const ModularPolynomialSet& set, int trials, const PrecisionContext& ctx, std::uint64_t seed) {
  PrecisionGuard guard(ctx);
  VerifyReport rep;
  const int p = set.p;
  const int q = isogeny_count(p);

  {
    VerifyCheck c{"complete", true, ""};
    for (int l = 0; l <= q; ++l) {
      if (set.phi1_num.count(l) == 0 && l < q) c.detail += " phi1[" + std::to_string(l) + "]";
    }
    if (set.den.is_zero()) c.detail += " den";
    c.passed = c.detail.empty();
    if (!c.passed) c.detail = "missing" + c.detail;
    rep.checks.push_back(c);
  }

  // (a) residual identity and the Psi quotient at fresh points
  {
    VerifyCheck res{"residual", true, ""}, quo{"psi_quotient", true, ""};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Real tol = pow2(-ctx.n_bits / 2);
    Real worst_res(0L), worst_quo(0L);
    int done = 0;
    for (int attempt = 0; done < trials && attempt < 4 * trials + 8; ++attempt) {
      const double y1 = 0.9 + 0.7 * u(rng);
      const double y2 = y1 + 0.5 * u(rng);
      const double y3 = (0.05 + 0.4 * u(rng)) * y1;
      const std::array<std::complex<double>, 3> t = {{{u(rng) - 0.5, y1}, {u(rng) - 0.5, y2}, {u(rng) - 0.5, y3}}};
      const PeriodMatrix om = PeriodMatrix::from_cd(reduce_to_fundamental(t).first);
      SpecializedModPoly sp;
      std::array<Complex, 3> fp;
      try {
        const InvariantTriple v = invariants_at(om, set.kind, ctx);
        sp = specialize(set, v.v);
        fp = invariants_at(om.scaled(p), set.kind, ctx).v;
      } catch (const Error&) {
        continue;
      }
      ++done;
      const auto [r, scale] = eval_with_scale(sp.phi1, fp[0]);
      const Real rel = abs(r) / scale;
      worst_res = max(worst_res, rel);
      if (!(rel < tol)) res.passed = false;
      const auto [d1, sd] = eval_with_scale(derivative(sp.phi1), fp[0]);
      for (int m = 1; m <= 2; ++m) {
        const auto [ps, sps] = eval_with_scale(m == 1 ? sp.psi2 : sp.psi3, fp[0]);
        const Real err = abs(ps - fp[m] * d1) / (sps + abs(fp[m]) * sd);
        worst_quo = max(worst_quo, err);
        if (!(err < tol)) quo.passed = false;
      }
    }
    if (done < trials) res.passed = quo.passed = false;
    res.detail = std::to_string(done) + " points, worst relative residual 2^" +
                 std::to_string(worst_res.is_zero() ? -100000 : worst_res.exponent());
    quo.detail = "worst relative defect 2^" + std::to_string(worst_quo.is_zero() ? -100000 : worst_quo.exponent());
    rep.checks.push_back(res);
    rep.checks.push_back(quo);
  }

  // (b) symmetry under b'_2 <-> b'_3
  {
    VerifyCheck c{"symmetry", true, ""};
    for (const auto& [l, n] : set.phi1_num) {
      if (!same_under(n, n, swap_yz)) c.detail += " phi1[" + std::to_string(l) + "]";
    }
    for (const auto& [l, n] : set.psi2_num) {
      auto it = set.psi3_num.find(l);
      if (it == set.psi3_num.end() ? !n.is_zero() : !same_under(n, it->second, swap_yz))
        c.detail += " psi2/psi3[" + std::to_string(l) + "]";
    }
    for (const auto& [l, n] : set.psi3_num) {
      if (set.psi2_num.count(l) == 0 && !n.is_zero()) c.detail += " psi3[" + std::to_string(l) + "]";
    }
    c.passed = c.detail.empty();
    if (!c.passed) c.detail = "asymmetric:" + c.detail;
    rep.checks.push_back(c);
  }

  // (c) congruences on the exponents
  {
    VerifyCheck c{"parity", true, ""};
    std::size_t bad = 0, total = 0;
    auto check_num = [&](const std::map<int, TriPolyQ>& polys, int m) {
      for (const auto& [l, n] : polys) {
        for (const auto& [e, coeff] : n.terms) {
          ++total;
          if (mod(e[0] - l - m - 1, 2) != 0 || mod(e[0] + e[1] + static_cast<long>(p) * l, 4) != 0 ||
              mod(e[1] + e[2] - static_cast<long>(p) * (m - 1), 4) != 0)
            ++bad;
        }
      }
    };
    check_num(set.phi1_num, 1);
    check_num(set.psi2_num, 2);
    for (const auto& [e, coeff] : set.den.terms) {
      ++total;
      if (e[0] % 2 != 0 || e[1] % 2 != 0 || e[2] % 2 != 0 || (e[0] + e[1]) % 4 != 0 || (e[1] + e[2]) % 4 != 0) ++bad;
    }
    c.passed = bad == 0;
    c.detail = std::to_string(bad) + " of " + std::to_string(total) + " monomials violate";
    rep.checks.push_back(c);
  }

  // (d) denominator degree and full symmetry
  {
    VerifyCheck c{"denominator", true, ""};
    const int td = set.den.total_degree();
    const bool sym = same_under(set.den, set.den, swap_yz) &&
                     same_under(set.den, set.den, [](const Exponent& e) -> Exponent { return {e[1], e[0], e[2]}; });
    c.passed = !set.den.is_zero() && td == p * p * p - p && sym;
    c.detail = "total degree " + std::to_string(td) + (sym ? ", symmetric" : ", not symmetric");
    rep.checks.push_back(c);
  }
  return rep;
}


// ---------------------------------------------------------------- build

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

std::string node_key(const Complex& x, const Complex& y, const Complex& z) {
  return x.re.to_hex() + ' ' + x.im.to_hex() + ' ' + y.re.to_hex() + ' ' + y.im.to_hex() + ' ' + z.re.to_hex() + ' ' +
         z.im.to_hex();
}

class Reporter {
 public:
  explicit Reporter(const BuildOptions& opt, int bits) : cb_(opt.progress), bits_(bits) {}

  void stage(const std::string& name, std::size_t total) {
    std::lock_guard<std::mutex> lock(mu_);
    p_ = BuildProgress{name, 0, total, 0, bits_};
    emit(true);
  }
  void tick(bool rejected = false) {
    std::lock_guard<std::mutex> lock(mu_);
    ++p_.done;
    if (rejected) ++p_.rejected;
    emit(false);
  }
  void finish() {
    std::lock_guard<std::mutex> lock(mu_);
    emit(true);
  }

 private:
  void emit(bool force) {
    if (!cb_) return;
    const auto now = std::chrono::steady_clock::now();
    if (!force && now - last_ < std::chrono::seconds(60)) return;
    last_ = now;
    cb_(p_);
  }

  std::function<void(const BuildProgress&)> cb_;
  int bits_;
  std::mutex mu_;
  BuildProgress p_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

// Evaluations of all 3q coefficients at invariant points, memoized and
// optionally persisted.
class NodeStore {
 public:
  NodeStore(const BuildOptions& opt, const PrecisionContext& ctx, BuildStats& stats)
      : opt_(opt), ctx_(ctx), stats_(stats), cosets_(modular_cosets(opt.p, opt.kind)) {
    if (opt.checkpoint_dir.empty()) return;
    path_ = opt.checkpoint_dir + "/checkpoint-" + to_string(opt.kind) + "-p" + std::to_string(opt.p) + "-" +
            std::to_string(ctx.n_bits) + ".txt";
    load();
    out_.open(path_, std::ios::app);
    if (!out_) throw Error(ErrorCode::kIo, "cannot open checkpoint " + path_);
  }

  const std::string& path() const { return path_; }

  // Values at (x, y, z); `seed` carries the last period matrix of the caller.
  std::vector<Complex> get(const Complex& x, const Complex& y, const Complex& z, std::optional<PeriodMatrix>& seed) {
    const std::string key = node_key(x, y, z);
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) {
        ++stats_.checkpoint_hits;
        return it->second;
      }
    }
    PrecisionGuard guard(ctx_);
    InvariantTriple t;
    t.kind = opt_.kind;
    t.v = {x, y, z};
    InversionResult inv;
    try {
      inv = invert_invariants(t, seed, ctx_);
    } catch (const Error& e) {
      count_rejection();
      throw;
    }
    seed = inv.omega;
    EvaluatedModPoly e;
    try {
      e = evaluate_at(inv.omega, opt_.p, opt_.kind, cosets_, ctx_);
    } catch (const Error&) {
      count_rejection();
      throw;
    }
    const int q = e.phi1.degree();
    std::vector<Complex> vals;
    vals.reserve(3 * q);
    {
      // stored values carry n_bits, fresh or reloaded alike
      PrecisionGuard round(ctx_.n_bits);
      for (int l = 0; l < q; ++l) vals.push_back(e.phi1.coeffs[l]);
      for (int l = 0; l < q; ++l) vals.push_back(e.psi2.coeffs[l]);
      for (int l = 0; l < q; ++l) vals.push_back(e.psi3.coeffs[l]);
    }
    std::lock_guard<std::mutex> lock(mu_);
    ++stats_.evaluations;
    if (out_.is_open()) {
      std::string rec = "E " + key + ' ' + std::to_string(vals.size());
      for (const auto& v : vals) rec += ' ' + v.re.to_hex() + ' ' + v.im.to_hex();
      out_ << rec << ' ' << hex64(fnv1a(rec)) << '\n';
      out_.flush();
    }
    cache_.emplace(key, vals);
    return vals;
  }

 private:
  void count_rejection() {
    std::lock_guard<std::mutex> lock(mu_);
    ++stats_.rejected_nodes;
  }

  void load() {
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
      // a torn last record fails its hash and is dropped
      const auto sp = line.rfind(' ');
      if (line.rfind("E ", 0) != 0 || sp == std::string::npos) continue;
      const std::string rec = line.substr(0, sp);
      if (hex64(fnv1a(rec)) != line.substr(sp + 1)) continue;
      std::istringstream ls(rec);
      std::string tag, c[6];
      std::size_t n = 0;
      ls >> tag >> c[0] >> c[1] >> c[2] >> c[3] >> c[4] >> c[5] >> n;
      std::vector<Complex> vals(n);
      bool ok = true;
      for (auto& v : vals) {
        std::string re, im;
        if (!(ls >> re >> im)) {
          ok = false;
          break;
        }
        v = Complex(Real::from_hex(re), Real::from_hex(im));
      }
      if (!ok) continue;
      cache_[c[0] + ' ' + c[1] + ' ' + c[2] + ' ' + c[3] + ' ' + c[4] + ' ' + c[5]] = std::move(vals);
    }
  }

  const BuildOptions& opt_;
  PrecisionContext ctx_;
  BuildStats& stats_;
  const CosetTable& cosets_;
  std::string path_;
  std::ofstream out_;
  std::mutex mu_;
  std::map<std::string, std::vector<Complex>> cache_;
};

DegreeHints hints_for(const BuildOptions& opt) {
  DegreeHints h = opt.hints;
  h.x = NodeCircle{{0.0, 0.0}, opt.x_radius};
  h.y = NodeCircle{{0.0, 0.0}, opt.yz_radius};
  h.z = NodeCircle{{0.0, 0.0}, opt.yz_radius};
  h.seed = opt.seed;
  return h;
}

std::vector<DegreeProfile> discover_with(NodeStore& store, const BuildOptions& opt, Reporter& rep) {
  const DegreeHints h = hints_for(opt);
  rep.stage("degrees", static_cast<std::size_t>(h.min_rounds) *
                           (2 * h.max_x + 2 * h.max_y + 2 * h.max_z + 2 * h.max_total + 8));
  std::optional<PeriodMatrix> seed;
  const TriEvaluator f = [&](const Complex& x, const Complex& y, const Complex& z) {
    try {
      auto v = store.get(x, y, z, seed);
      rep.tick();
      return v;
    } catch (const Error&) {
      rep.tick(true);
      seed.reset();
      throw;
    }
  };
  std::vector<DegreeProfile> prof = discover_degrees(f, h);
  rep.finish();
  for (const auto& d : prof) {
    if (std::max(d.num.x, d.den.x) >= h.max_x || std::max(d.num.y, d.den.y) >= h.max_y ||
        std::max(d.num.z, d.den.z) >= h.max_z || std::max(d.num.total, d.den.total) >= h.max_total)
      throw Error(ErrorCode::kUnstable, "a discovered degree reaches its probe bound; raise the degree hints");
  }
  return prof;
}

// Values on a list of nodes, in contiguous chunks per worker so that each
// worker's continuation seeds stay local. Failed indices are returned.
std::vector<std::size_t> evaluate_nodes(NodeStore& store, const std::vector<std::array<Complex, 3>>& nodes,
                                        const std::vector<std::size_t>& todo, std::vector<std::vector<Complex>>& out,
                                        const BuildOptions& opt, const PrecisionContext& ctx, Reporter& rep) {
  const int workers = std::max(1, std::min<int>(opt.threads, static_cast<int>(todo.size())));
  std::vector<std::vector<std::size_t>> failed(workers);
  auto run = [&](int w) {
    PrecisionGuard guard(ctx);
    std::optional<PeriodMatrix> seed;
    const std::size_t lo = todo.size() * w / workers, hi = todo.size() * (w + 1) / workers;
    for (std::size_t t = lo; t < hi; ++t) {
      const std::size_t i = todo[t];
      try {
        out[i] = store.get(nodes[i][0], nodes[i][1], nodes[i][2], seed);
        rep.tick();
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kInvalidArgument || e.code() == ErrorCode::kIo) throw;
        failed[w].push_back(i);
        seed.reset();
        rep.tick(true);
      }
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          run(w);
        } catch (...) {
          errs[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errs) {
      if (e) std::rethrow_exception(e);
    }
  }
  std::vector<std::size_t> all;
  for (auto& f : failed) all.insert(all.end(), f.begin(), f.end());
  std::sort(all.begin(), all.end());
  return all;
}

// |D(v)| relative to sum |terms|
double relative_size(const TriPolyQ& d, const std::array<Complex, 3>& v) {
  const std::complex<double> x = v[0].to_cd(), y = v[1].to_cd(), z = v[2].to_cd();
  std::complex<double> acc = 0.0;
  double scale = 0.0;
  for (const auto& [e, c] : d.terms) {
    const std::complex<double> m = c.get_d() * std::pow(x, e[0]) * std::pow(y, e[1]) * std::pow(z, e[2]);
    acc += m;
    scale += std::abs(m);
  }
  return std::abs(acc) / scale;
}

struct Attempt {
  ModularPolynomialSet set;
  bool gate_passed = false;
  std::string failure;
};

PrecisionContext discovery_context(const BuildOptions& opt, const PrecisionContext& ctx) {
  const int bits = std::max(opt.discovery_bits * ctx.n_bits / opt.ctx.n_bits, ctx.n_bits);
  return PrecisionContext(bits, ctx.guard_bits, ctx.n_low_bits);
}

Attempt build_at(const BuildOptions& opt, const PrecisionContext& ctx, BuildStats& stats) {
  Reporter rep(opt, ctx.n_bits);
  const int q = isogeny_count(opt.p);
  std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  // (1) degrees
  {
    const PrecisionContext dctx = discovery_context(opt, ctx);
    PrecisionGuard guard(dctx);
    NodeStore dstore(opt, dctx, stats);
    stats.profiles = discover_with(dstore, opt, rep);
  }
  PrecisionGuard guard(ctx);
  NodeStore store(opt, ctx, stats);
  const auto& prof = stats.profiles;
  if (static_cast<int>(prof.size()) != 3 * q) throw Error(ErrorCode::kNumeric, "unexpected evaluator width");

  // (2) probe: a Phi1 coefficient carrying the full denominator, lowest
  // total degree, highest index on ties
  int dmax = -1;
  for (int l = 0; l < q; ++l) dmax = std::max(dmax, prof[l].den.total);
  int probe = -1;
  for (int l = q - 1; l >= 0; --l) {
    if (prof[l].den.total != dmax) continue;
    if (probe < 0 || prof[l].num.total < prof[probe].num.total) probe = l;
  }
  stats.probe_component = probe;
  RatTriOptions ro;
  ro.x = NodeCircle{{0.0, 0.0}, opt.x_radius};
  ro.y = NodeCircle{{0.0, 0.0}, 1.0};
  ro.z = NodeCircle{{0.0, 0.0}, 1.0};
  ro.seed = opt.seed + 17;
  {
    const int ny = std::max(prof[probe].num.y, prof[probe].den.y) + 1;
    const int nz = std::max(prof[probe].num.z, prof[probe].den.z) + 1;
    rep.stage("denominator", static_cast<std::size_t>(ny) * nz *
                                 (prof[probe].num.total + prof[probe].den.total + 1 + ro.extra_nodes));
  }
  std::optional<PeriodMatrix> seed;
  const TriEvaluator f = [&](const Complex& x, const Complex& y, const Complex& z) {
    try {
      auto v = store.get(x, y, z, seed);
      rep.tick();
      return v;
    } catch (const Error&) {
      rep.tick(true);
      seed.reset();
      throw;
    }
  };
  const TriRat rat = interp_rat_tri(f, probe, prof[probe], {Complex(0), Complex(0), Complex(0)}, ro);
  rep.finish();
  const Real tol = pow2(-ctx.n_bits / 4);
  TriPolyQ dq = reconstruct(rat.den, Integer(1) << 32, tol);
  TriPolyQ den = primitive(TriRatQ{dq, dq}).den;
  if (den.is_zero()) throw Error(ErrorCode::kNumeric, "empty denominator");

  // (3) tensor grid for the numerators N = c * D
  int nx = den.degree(0) + 1, ny = den.degree(1) + 1, nz = den.degree(2) + 1;
  for (int c = 0; c < 3 * q; ++c) {
    const auto& d = prof[c];
    nx = std::max(nx, d.num.x + den.degree(0) - d.den.x + 1);
    ny = std::max(ny, d.num.y + den.degree(1) - d.den.y + 1);
    nz = std::max(nz, d.num.z + den.degree(2) - d.den.z + 1);
  }
  TriGrid grid;
  grid.x = circle_nodes(NodeCircle{{0.0, 0.0}, opt.x_radius}, nx, u(rng));
  grid.y = circle_nodes(NodeCircle{{0.0, 0.0}, opt.yz_radius}, ny, u(rng));
  grid.z = circle_nodes(NodeCircle{{0.0, 0.0}, opt.yz_radius}, nz, u(rng));
  // Move a Z plane off anything close to D = 0 before evaluating.
  auto nudge = [&](std::size_t k) {
    const double a = 2.0 * M_PI * (u(rng) - 0.5) / (4.0 * nz);
    grid.z[k] = grid.z[k] * Complex(std::polar(1.0, a));
  };
  for (std::size_t k = 0; k < grid.z.size(); ++k) {
    for (int tries = 0; tries < 16; ++tries) {
      bool close = false;
      for (std::size_t i = 0; i < grid.x.size() && !close; ++i) {
        for (std::size_t j = 0; j < grid.y.size() && !close; ++j) {
          close = relative_size(den, {grid.x[i], grid.y[j], grid.z[k]}) < 1e-3;
        }
      }
      if (!close) break;
      nudge(k);
    }
  }
  std::vector<std::array<Complex, 3>> nodes(grid.size());
  auto place = [&]() {
    for (std::size_t i = 0; i < grid.x.size(); ++i)
      for (std::size_t j = 0; j < grid.y.size(); ++j)
        for (std::size_t k = 0; k < grid.z.size(); ++k) nodes[grid.index(i, j, k)] = {grid.x[i], grid.y[j], grid.z[k]};
  };
  place();
  std::vector<std::vector<Complex>> vals(grid.size());
  std::vector<std::size_t> todo(grid.size());
  for (std::size_t i = 0; i < todo.size(); ++i) todo[i] = i;
  for (int round = 0;; ++round) {
    rep.stage("grid", todo.size());
    const std::vector<std::size_t> failed = evaluate_nodes(store, nodes, todo, vals, opt, ctx, rep);
    rep.finish();
    if (failed.empty()) break;
    if (round == 4) throw Error(ErrorCode::kNearDenominator, "grid nodes keep failing after resampling");
    // resample the Z planes through failed nodes
    std::vector<char> hit(grid.z.size(), 0);
    for (std::size_t idx : failed) hit[idx % grid.z.size()] = 1;
    for (std::size_t k = 0; k < grid.z.size(); ++k) {
      if (hit[k]) nudge(k);
    }
    place();
    todo.clear();
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
      if (hit[idx % grid.z.size()]) todo.push_back(idx);
    }
  }

  std::vector<Complex> dvals(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) dvals[n] = eval(den, nodes[n][0], nodes[n][1], nodes[n][2]);

  // (4) interpolation and reconstruction, coefficient by coefficient
  Attempt at;
  at.set.p = opt.p;
  at.set.kind = opt.kind;
  at.set.den = den;
  rep.stage("assemble", 3 * q);
  std::vector<TriPolyQ> nums(3 * q);
  for (int c = 0; c < 3 * q; ++c) {
    std::vector<Complex> v(grid.size());
    for (std::size_t n = 0; n < grid.size(); ++n) v[n] = vals[n][c] * dvals[n];
    const TriPoly num = interp_poly_multi(grid, v);
    try {
      nums[c] = reconstruct(num, Integer(1) << 24, tol);
    } catch (const Error& e) {
      at.failure = "coefficient " + std::to_string(c) + ": " + e.what();
      return at;
    }
    rep.tick();
  }
  rep.finish();
  // clear common denominators across the whole set
  Integer l = 1;
  for (const auto& n : nums)
    for (const auto& [e, c] : n.terms) l = lcm(l, Integer(c.get_den()));
  if (l != 1) {
    for (auto& n : nums)
      for (auto& [e, c] : n.terms) c *= l;
    for (auto& [e, c] : at.set.den.terms) c *= l;
  }
  for (int c = 0; c < q; ++c) {
    at.set.phi1_num[c] = nums[c];
    at.set.psi2_num[c] = nums[q + c];
    at.set.psi3_num[c] = nums[2 * q + c];
  }
  at.set.phi1_num[q] = at.set.den;

  // (5) held-out nodes
  rep.stage("gate", opt.held_out);
  const Real gate_tol = pow2(-ctx.n_bits / 4);
  std::optional<PeriodMatrix> gseed;
  int checked = 0;
  for (int attempt = 0; checked < opt.held_out && attempt < 8 * opt.held_out + 8; ++attempt) {
    std::array<Complex, 3> v;
    const double rad[3] = {opt.x_radius, opt.yz_radius, opt.yz_radius};
    for (int i = 0; i < 3; ++i) {
      const double r = rad[i] * std::sqrt(u(rng));
      const double a = 2.0 * M_PI * u(rng);
      v[i] = Complex(r * std::cos(a), r * std::sin(a));
    }
    if (relative_size(at.set.den, v) < 1e-3) continue;
    std::vector<Complex> ref;
    try {
      ref = store.get(v[0], v[1], v[2], gseed);
    } catch (const Error&) {
      gseed.reset();
      continue;
    }
    const SpecializedModPoly sp = specialize(at.set, v);
    for (int c = 0; c < 3 * q; ++c) {
      const UniPoly& poly = c < q ? sp.phi1 : c < 2 * q ? sp.psi2 : sp.psi3;
      const Complex got = poly.coeff(c % q);
      if (!(abs(got - ref[c]) <= gate_tol * max(Real(1L), abs(ref[c])))) {
        at.failure = "held-out mismatch at coefficient " + std::to_string(c);
        return at;
      }
    }
    ++checked;
    rep.tick();
  }
  rep.finish();
  if (checked < opt.held_out) {
    at.failure = "could not evaluate held-out nodes";
    return at;
  }
  at.gate_passed = true;
  return at;
}

}  // namespace

BuildOptions default_build_options(int p) {
  BuildOptions o;
  o.p = p;
  const int q = isogeny_count(p);
  const int dd = p * p * p - p;
  o.hints.max_x = q + 8;
  o.hints.max_y = dd;
  o.hints.max_z = dd;
  o.hints.max_total = q + 8;
  o.hints.min_rounds = 2;
  return o;
}

std::vector<DegreeProfile> discover_modpoly_degrees(const BuildOptions& opt, BuildStats* stats) {
  if (opt.kind != InvariantKind::kThetaQuotient || opt.p <= 2)
    throw Error(ErrorCode::kInvalidArgument, "degree discovery supports the b' kind with p > 2");
  BuildStats local;
  BuildStats& st = stats != nullptr ? *stats : local;
  const PrecisionContext dctx = discovery_context(opt, opt.ctx);
  PrecisionGuard guard(dctx);
  NodeStore store(opt, dctx, st);
  Reporter rep(opt, dctx.n_bits);
  st.profiles = discover_with(store, opt, rep);
  st.n_bits = dctx.n_bits;
  return st.profiles;
}

BuildResult build(const BuildOptions& opt) {
  if (opt.kind != InvariantKind::kThetaQuotient)
    throw Error(ErrorCode::kInvalidArgument, "only the b' kind can be built");
  if (opt.p <= 2) throw Error(ErrorCode::kInvalidArgument, "b' modular polynomials need p > 2");
  PrecisionContext ctx = opt.ctx;
  BuildResult res;
  std::string last;
  for (int d = 0; d <= opt.max_doublings; ++d) {
    res.stats.n_bits = ctx.n_bits;
    try {
      Attempt a = build_at(opt, ctx, res.stats);
      if (a.gate_passed) {
        res.set = std::move(a.set);
        return res;
      }
      last = a.failure;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoConvergent && e.code() != ErrorCode::kPrecisionLoss &&
          e.code() != ErrorCode::kPrecision)
        throw;
      last = e.what();
    }
    ctx = ctx.doubled();
  }
  throw Error(ErrorCode::kPrecision, "build failed after precision doubling: " + last);
}

}  // namespace g2mp
