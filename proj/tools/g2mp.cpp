// g2mp: command-line front end.
//
// Exit codes: 0 ok, 1 verification failure, 2 configuration error,
// 3 precision abort.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "g2mp/error.hpp"
#include "g2mp/invariants/invariants.hpp"
#include "g2mp/modpoly/modpoly.hpp"
#include "g2mp/symplectic/symplectic.hpp"
#include "g2mp/theta/theta.hpp"

namespace fs = std::filesystem;
using namespace g2mp;
using nlohmann::json;

namespace {

constexpr int kExitVerify = 1;
constexpr int kExitConfig = 2;
constexpr int kExitPrecision = 3;

struct JobConfig {
  std::string command;
  std::string kind = "bprime";
  int p = 3;
  int prec_bits = 256;
  int threads = 1;
  std::uint64_t seed = 1;
  std::string out_dir;
  std::string in_dir;
  bool resume = false;
  int trials = 10;
  std::string at;
  std::string omega;
  std::string group = "g2";
  bool print_matrices = false;
};

bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

void validate(const JobConfig& c) {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::kInvalidArgument, m); };
  if (!is_prime(c.p)) fail("p must be prime");
  if (c.prec_bits < 128) fail("precision must be at least 128 bits");
  if (c.threads < 1) fail("thread count must be positive");
  const InvariantKind k = invariant_kind_from_string(c.kind);
  if ((c.command == "compute" || c.command == "degrees") && k == InvariantKind::kThetaQuotient && c.p <= 2)
    fail("the b' kind needs p > 2");
  if ((c.command == "compute" || c.command == "degrees") && k != InvariantKind::kThetaQuotient)
    fail("only --kind bprime can be computed");
}

// "re" or "re:im"
Complex parse_complex(const std::string& s) {
  const auto colon = s.find(':');
  try {
    if (colon == std::string::npos) return Complex(Real(s), Real(0L));
    return Complex(Real(s.substr(0, colon)), Real(s.substr(colon + 1)));
  } catch (const Error&) {
    throw Error(ErrorCode::kInvalidArgument, "bad complex number '" + s + "' (use re or re:im)");
  }
}

std::array<Complex, 3> parse_triple(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  if (parts.size() != 3) throw Error(ErrorCode::kInvalidArgument, "expected three comma-separated values");
  return {parse_complex(parts[0]), parse_complex(parts[1]), parse_complex(parts[2])};
}

std::string modpoly_path(const std::string& dir, const std::string& kind, int p) {
  return (fs::path(dir) / ("modpoly-" + kind + "-p" + std::to_string(p) + ".txt")).string();
}

std::string find_modpoly(const std::string& dir) {
  if (fs::is_regular_file(dir)) return dir;
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kIo, "no such input: " + dir);
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("modpoly-", 0) == 0 && e.path().extension() == ".txt") return e.path().string();
  }
  throw Error(ErrorCode::kIo, "no modpoly-*.txt in " + dir);
}

void print_poly(const std::string& name, const UniPoly& p) {
  for (int i = 0; i <= p.degree(); ++i) {
    std::cout << name << " " << i << " " << p.coeffs[i].re.to_string(30) << " " << p.coeffs[i].im.to_string(30) << "\n";
  }
}

int run_compute(const JobConfig& c) {
  fs::create_directories(c.out_dir);
  BuildOptions opt = default_build_options(c.p);
  opt.kind = invariant_kind_from_string(c.kind);
  opt.ctx = PrecisionContext::for_bits(c.prec_bits);
  opt.discovery_bits = std::max(opt.discovery_bits, c.prec_bits);
  opt.seed = c.seed;
  opt.threads = c.threads;
  opt.checkpoint_dir = c.out_dir;
  if (!c.resume) {
    for (const auto& e : fs::directory_iterator(c.out_dir)) {
      if (e.path().filename().string().rfind("checkpoint-", 0) == 0) fs::remove(e.path());
    }
  }
  opt.progress = [](const BuildProgress& p) {
    std::cerr << "[progress] stage=" << p.stage << " done=" << p.done << "/" << p.total << " rejected=" << p.rejected
              << " bits=" << p.n_bits << std::endl;
  };
  const auto t0 = std::chrono::steady_clock::now();
  const BuildResult r = build(opt);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::string path = modpoly_path(c.out_dir, c.kind, c.p);
  write_modpoly_file(path, r.set);
  json summary = {{"kind", c.kind},
                  {"p", c.p},
                  {"n_bits", r.stats.n_bits},
                  {"evaluations", r.stats.evaluations},
                  {"checkpoint_hits", r.stats.checkpoint_hits},
                  {"rejected_nodes", r.stats.rejected_nodes},
                  {"probe_coefficient", r.stats.probe_component},
                  {"denominator_terms", r.set.den.terms.size()},
                  {"denominator_total_degree", r.set.den.total_degree()},
                  {"seconds", secs},
                  {"output", path}};
  std::cout << summary.dump() << "\n";
  return 0;
}

int run_verify(const JobConfig& c) {
  const ModularPolynomialSet set = read_modpoly_file(find_modpoly(c.in_dir));
  const VerifyReport rep = verify(set, c.trials, PrecisionContext::for_bits(c.prec_bits), c.seed);
  for (const auto& ch : rep.checks) {
    std::cout << (ch.passed ? "PASS " : "FAIL ") << ch.name << ": " << ch.detail << "\n";
  }
  return rep.ok() ? 0 : kExitVerify;
}

int run_eval(const JobConfig& c) {
  const ModularPolynomialSet set = read_modpoly_file(find_modpoly(c.in_dir));
  PrecisionGuard guard(PrecisionContext::for_bits(c.prec_bits));
  const SpecializedModPoly sp = specialize(set, parse_triple(c.at));
  print_poly("phi1", sp.phi1);
  print_poly("psi2", sp.psi2);
  print_poly("psi3", sp.psi3);
  return 0;
}

int run_degrees(const JobConfig& c) {
  BuildOptions opt = default_build_options(c.p);
  opt.ctx = PrecisionContext::for_bits(c.prec_bits);
  opt.discovery_bits = std::max(opt.discovery_bits, c.prec_bits);
  opt.seed = c.seed;
  opt.progress = [](const BuildProgress& p) {
    std::cerr << "[progress] stage=" << p.stage << " done=" << p.done << "/" << p.total << std::endl;
  };
  const auto prof = discover_modpoly_degrees(opt);
  const int q = isogeny_count(c.p);
  // numerator degrees over the common denominator, whose degrees are the
  // largest reduced ones
  int dx = 0, dy = 0, dz = 0;
  for (const auto& d : prof) {
    dx = std::max(dx, d.den.x);
    dy = std::max(dy, d.den.y);
    dz = std::max(dz, d.den.z);
  }
  std::cout << "# l phi1(x y z) psi2(x y z) psi3(x y z); denominator " << dx << " " << dy << " " << dz << "\n";
  for (int l = 0; l < q; ++l) {
    std::cout << l;
    for (int f = 0; f < 3; ++f) {
      const auto& d = prof[f * q + l];
      std::cout << "  " << d.num.x + dx - d.den.x << " " << d.num.y + dy - d.den.y << " " << d.num.z + dz - d.den.z;
    }
    std::cout << "\n";
  }
  return 0;
}

int run_humbert(const JobConfig& c) {
  const HumbertDegreeOracle h = humbert_degree(c.p);
  std::cout << "a=" << h.a_value << " component_degree=" << h.component_degree << " H_degree=" << h.h_degree << "\n";
  return 0;
}

int run_cosets(const JobConfig& c) {
  const CosetTable t = c.group == "g24" ? enumerate_cosets(Subgroup::gamma24(), Subgroup::gamma24_gamma0(c.p))
                                        : enumerate_cosets(Subgroup::gamma2(), Subgroup::gamma0(c.p));
  std::cout << t.size() << "\n";
  if (c.print_matrices) {
    for (const auto& m : t.representatives) std::cout << m.to_string() << "\n";
  }
  return 0;
}

PeriodMatrix parse_omega(const std::string& s) {
  const auto t = parse_triple(s);  // tau1, tau3, tau2
  PeriodMatrix om(t[0], t[2], t[1]);
  if (!om.in_upper_half_space()) throw Error(ErrorCode::kInvalidArgument, "Omega is not in the Siegel upper half-space");
  return om;
}

int run_theta(const JobConfig& c) {
  const PrecisionContext ctx = PrecisionContext::for_bits(c.prec_bits);
  PrecisionGuard guard(ctx);
  const ThetaQuotients tq = theta_quotients_anywhere(parse_omega(c.omega), ctx);
  for (int i : kEvenThetas) {
    std::cout << i << " " << tq.q[i].re.to_string(30) << " " << tq.q[i].im.to_string(30) << "\n";
  }
  return 0;
}

int run_invariants(const JobConfig& c) {
  const PrecisionContext ctx = PrecisionContext::for_bits(c.prec_bits);
  PrecisionGuard guard(ctx);
  const InvariantTriple t = invariants_at(parse_omega(c.omega), invariant_kind_from_string(c.kind), ctx);
  for (int i = 0; i < 3; ++i) std::cout << t.v[i].re.to_string(30) << " " << t.v[i].im.to_string(30) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  JobConfig cfg;
  if (const char* t = std::getenv("G2MP_THREADS")) cfg.threads = std::atoi(t);
  if (const char* d = std::getenv("G2MP_DATA_DIR")) cfg.out_dir = cfg.in_dir = d;

  CLI::App app{"Genus-2 modular polynomials by evaluation and interpolation"};
  app.require_subcommand(1);
  auto common = [&](CLI::App* s) {
    s->add_option("--p", cfg.p, "prime");
    s->add_option("--prec-bits", cfg.prec_bits, "target precision in bits");
    s->add_option("--seed", cfg.seed, "random seed");
  };
  auto* compute = app.add_subcommand("compute", "build the modular polynomials");
  common(compute);
  compute->add_option("--kind", cfg.kind, "invariant system");
  compute->add_option("--out", cfg.out_dir, "output directory")->required(cfg.out_dir.empty());
  compute->add_flag("--resume", cfg.resume, "reuse checkpointed evaluations");
  compute->add_option("--threads", cfg.threads, "worker threads");
  auto* ver = app.add_subcommand("verify", "check a computed set");
  common(ver);
  ver->add_option("--in", cfg.in_dir, "directory or file")->required(cfg.in_dir.empty());
  ver->add_option("--trials", cfg.trials, "random points for the residual check");
  auto* ev = app.add_subcommand("eval", "specialize at an invariant point");
  common(ev);
  ev->add_option("--in", cfg.in_dir, "directory or file")->required(cfg.in_dir.empty());
  ev->add_option("--at", cfg.at, "v1,v2,v3 (each re or re:im)")->required();
  auto* deg = app.add_subcommand("degrees", "discover the numerator degrees");
  common(deg);
  deg->add_option("--kind", cfg.kind, "invariant system");
  auto* hum = app.add_subcommand("humbert", "Humbert surface degrees");
  common(hum);
  auto* cos = app.add_subcommand("cosets", "coset representatives");
  common(cos);
  cos->add_option("--group", cfg.group, "g2 (Gamma2/Gamma0(p)) or g24 (Gamma(2,4)/...)")
      ->check(CLI::IsMember({"g2", "g24"}));
  cos->add_flag("--print", cfg.print_matrices, "print the matrices");
  auto* th = app.add_subcommand("theta", "even theta quotients at Omega");
  common(th);
  th->add_option("--omega", cfg.omega, "tau1,tau3,tau2 (each re or re:im)")->required();
  th->add_option("--prec", cfg.prec_bits, "precision in bits");
  auto* inv = app.add_subcommand("invariants", "invariant triple at Omega");
  common(inv);
  inv->add_option("--omega", cfg.omega, "tau1,tau3,tau2 (each re or re:im)")->required();
  inv->add_option("--kind", cfg.kind, "igusa, streng or bprime");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    validate(cfg);
    if (cfg.command == "compute") return run_compute(cfg);
    if (cfg.command == "verify") return run_verify(cfg);
    if (cfg.command == "eval") return run_eval(cfg);
    if (cfg.command == "degrees") return run_degrees(cfg);
    if (cfg.command == "humbert") return run_humbert(cfg);
    if (cfg.command == "cosets") return run_cosets(cfg);
    if (cfg.command == "theta") return run_theta(cfg);
    if (cfg.command == "invariants") return run_invariants(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.code() == ErrorCode::kPrecision) return kExitPrecision;
    if (e.code() == ErrorCode::kInvalidArgument || e.code() == ErrorCode::kIo) return kExitConfig;
    return kExitVerify;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
