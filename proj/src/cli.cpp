#include "qphase/cli.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <string>

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <json.hpp>

#include "qphase/charfn.hpp"
#include "qphase/errors.hpp"
#include "qphase/fockoracle.hpp"
#include "qphase/io.hpp"
#include "qphase/moments.hpp"
#include "qphase/verify.hpp"
#include "qphase/version.hpp"

namespace qphase {
namespace {

using ordered_json = nlohmann::ordered_json;

// Local to the CLI: output-path problems, distinct from domain errors.
class IoFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raw flag values; presence is tracked through the CLI11 option pointers so
// a JSON config file can fill in only what the command line left unset.
struct Raw {
  double alpha_re = 0.0;
  double alpha_im = 0.0;
  double r = 0.0;
  double phi = 0.0;
  double nbar = 0.0;
  double theta = 0.0;
  double p = 0.0;
  std::string basis = "B";
  double extent = 0.0;
  int samples = 0;
  double phi_dir = 0.0;
  std::string out;
  std::string format = "csv";
  std::string config;
  bool cross_verify = false;
  std::uint64_t seed = 12345;
  bool quick = false;
  bool flip_c_sign = false;
};

struct SubOpts {
  CLI::App* cmd = nullptr;
  CLI::Option* alpha_re = nullptr;
  CLI::Option* alpha_im = nullptr;
  CLI::Option* r = nullptr;
  CLI::Option* phi = nullptr;
  CLI::Option* nbar = nullptr;
  CLI::Option* theta = nullptr;
  CLI::Option* p = nullptr;
  CLI::Option* basis = nullptr;
  CLI::Option* extent = nullptr;
  CLI::Option* samples = nullptr;
  CLI::Option* phi_dir = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* format = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* quick = nullptr;
};

void add_state_opts(SubOpts& so, Raw& raw) {
  CLI::App* c = so.cmd;
  so.alpha_re = c->add_option("--alpha-re", raw.alpha_re, "Re(alpha), coherent displacement");
  so.alpha_im = c->add_option("--alpha-im", raw.alpha_im, "Im(alpha)");
  so.r = c->add_option("--r", raw.r, "squeeze magnitude r >= 0");
  so.phi = c->add_option("--phi", raw.phi, "squeeze angle");
  so.nbar = c->add_option("--nbar", raw.nbar, "thermal occupation n_bar >= 0");
  so.theta = c->add_option("--theta", raw.theta, "thermal parameter, n_bar = 1/(e^theta - 1)");
  so.theta->excludes(so.nbar);
  so.nbar->excludes(so.theta);
  so.p = c->add_option("--p", raw.p, "ordering parameter (1 normal, 0 symmetric, -1 anti-normal)");
  so.basis = c->add_option("--basis", raw.basis, "ladder operator the output refers to")
                 ->check(CLI::IsMember({"a", "B"}));
}

void add_output_opts(SubOpts& so, Raw& raw) {
  so.out = so.cmd->add_option("--out", raw.out, "output file (default: stdout)");
  so.format = so.cmd->add_option("--format", raw.format, "csv or json")
                  ->check(CLI::IsMember({"csv", "json"}));
}

void add_config_opt(SubOpts& so, Raw& raw) {
  so.cmd->add_option("--config", raw.config, "JSON config file; explicit flags override it")
      ->check(CLI::ExistingFile);
}

ordered_json load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot read config file: " + path);
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config file is not valid JSON: ") + e.what());
  }
}

// Config keys accept either spelling: "alpha_re" or "alpha-re".
const ordered_json* find_key(const ordered_json& j, const std::string& name) {
  auto it = j.find(name);
  if (it != j.end()) return &*it;
  std::string dashed = name;
  for (char& ch : dashed)
    if (ch == '_') ch = '-';
  it = j.find(dashed);
  if (it != j.end()) return &*it;
  return nullptr;
}

template <typename T>
void take(const ordered_json& j, const std::string& name, const CLI::Option* opt, T& slot) {
  if (opt != nullptr && opt->count() > 0) return;
  const ordered_json* v = find_key(j, name);
  if (v == nullptr) return;
  try {
    slot = v->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw std::invalid_argument("config key '" + name + "' has the wrong type");
  }
}

RunConfig resolve(const Raw& raw_in, const SubOpts& so, const std::string& command) {
  Raw raw = raw_in;
  bool use_theta = so.theta != nullptr && so.theta->count() > 0;
  if (!raw.config.empty()) {
    ordered_json j = load_config(raw.config);
    take(j, "alpha_re", so.alpha_re, raw.alpha_re);
    take(j, "alpha_im", so.alpha_im, raw.alpha_im);
    take(j, "r", so.r, raw.r);
    take(j, "phi", so.phi, raw.phi);
    take(j, "p", so.p, raw.p);
    take(j, "basis", so.basis, raw.basis);
    take(j, "extent", so.extent, raw.extent);
    take(j, "samples", so.samples, raw.samples);
    take(j, "phi_dir", so.phi_dir, raw.phi_dir);
    take(j, "out", so.out, raw.out);
    take(j, "format", so.format, raw.format);
    take(j, "seed", so.seed, raw.seed);
    take(j, "quick", so.quick, raw.quick);
    bool cli_thermal = (so.nbar != nullptr && so.nbar->count() > 0) || use_theta;
    if (!cli_thermal) {
      bool has_n = find_key(j, "nbar") != nullptr;
      bool has_t = find_key(j, "theta") != nullptr;
      if (has_n && has_t)
        throw std::invalid_argument("config sets both nbar and theta; they are exclusive");
      if (has_t) {
        take(j, "theta", so.theta, raw.theta);
        use_theta = true;
      } else if (has_n) {
        take(j, "nbar", so.nbar, raw.nbar);
      }
    }
  }

  RunConfig cfg;
  double nb = use_theta ? nbar_from_theta(raw.theta) : raw.nbar;
  cfg.params = StateParams(Complex(raw.alpha_re, raw.alpha_im), SqueezeParam(raw.r, raw.phi),
                           ThermalParam(nb));
  cfg.p = raw.p;
  cfg.basis = raw.basis == "a" ? Basis::a : Basis::B;
  if (raw.extent < 0.0) throw std::invalid_argument("extent must be positive");
  cfg.extent = raw.extent;
  if (raw.samples < 0) throw std::invalid_argument("samples must be positive");
  cfg.samples = raw.samples;
  cfg.phi_dir = raw.phi_dir;
  cfg.out = raw.out;
  cfg.format = raw.format;
  cfg.cross_verify = raw.cross_verify;
  cfg.seed = raw.seed;
  cfg.quick = raw.quick;
  cfg.flip_c_sign = raw.flip_c_sign;
  cfg.command = command;
  return cfg;
}

int emit(const std::string& payload, const std::string& out_path) {
  if (out_path.empty()) {
    std::fwrite(payload.data(), 1, payload.size(), stdout);
    return 0;
  }
  if (!write_text_file(out_path, payload)) throw IoFailure("cannot write output file: " + out_path);
  return 0;
}

const char* basis_name(Basis b) { return b == Basis::B ? "B" : "a"; }

ordered_json params_json(const RunConfig& cfg) {
  ordered_json pj;
  pj["alpha_re"] = cfg.params.alpha.real();
  pj["alpha_im"] = cfg.params.alpha.imag();
  pj["r"] = cfg.params.squeeze.r;
  pj["phi"] = cfg.params.squeeze.phi;
  pj["nbar"] = cfg.params.thermal.n_bar;
  return pj;
}

ordered_json metadata_json(const RunConfig& cfg) {
  ordered_json meta;
  meta["version"] = kVersion;
  meta["command"] = cfg.command;
  meta["params"] = params_json(cfg);
  meta["p"] = cfg.p;
  meta["basis"] = basis_name(cfg.basis);
  return meta;
}

int dispatch_grid(const RunConfig& cfg) {
  OrderingParam p(cfg.p);
  PhaseSpaceGrid g = default_grid(cfg.params, p, cfg.basis);
  if (cfg.extent > 0.0 || cfg.samples > 0) {
    double he_re = cfg.extent > 0.0 ? cfg.extent : g.half_extent_re;
    double he_im = cfg.extent > 0.0 ? cfg.extent : g.half_extent_im;
    int n_re = cfg.samples > 0 ? cfg.samples : g.n_re;
    int n_im = cfg.samples > 0 ? cfg.samples : g.n_im;
    g = PhaseSpaceGrid(g.center, he_re, he_im, n_re, n_im);
  }
  QuasiProbGrid qp = fill_closed(g, cfg.params, p, cfg.basis);

  if (cfg.format == "csv") return emit(grid_csv(qp), cfg.out);

  ordered_json meta = metadata_json(cfg);
  meta["distribution"] = classify_distribution(p);
  ordered_json gj;
  gj["center_re"] = g.center.real();
  gj["center_im"] = g.center.imag();
  gj["half_extent_re"] = g.half_extent_re;
  gj["half_extent_im"] = g.half_extent_im;
  gj["n_re"] = g.n_re;
  gj["n_im"] = g.n_im;
  meta["grid"] = gj;
  meta["normalization_residual"] = qp.normalization_residual();
  ordered_json data = ordered_json::array();
  for (int j = 0; j < g.n_im; ++j)
    for (int i = 0; i < g.n_re; ++i)
      data.push_back(ordered_json::array({g.x(i), g.y(j), qp.value(i, j)}));
  ordered_json root;
  root["metadata"] = meta;
  root["data"] = data;
  return emit(root.dump(2) + "\n", cfg.out);
}

int dispatch_moments(const RunConfig& cfg) {
  OrderingParam p(cfg.p);
  MomentReport rep = closed_report(cfg.params, p, cfg.basis);

  ordered_json d;
  d["mean"] = rep.mean;
  d["variance"] = rep.second_combination;
  if (rep.variance_p1.has_value()) d["delta_n2"] = *rep.variance_p1;
  d["method"] = rep.method;

  bool cross_ok = true;
  if (cfg.cross_verify) {
    auto rel_gate = [](double dev, double ref, double tol) {
      return dev <= tol * std::max(1.0, std::abs(ref));
    };
    ordered_json v;

    ChiFnL chi = cfg.basis == Basis::B ? chi_a_extended(cfg.params, p)
                                       : chi_b_extended(cfg.params, p);
    double f11 = moment_fd(chi, 1, 1, p).real();
    double f22 = moment_fd(chi, 2, 2, p).real();
    double fd_comb = f22 - f11 * f11 + f11;
    ordered_json fj;
    fj["mean"] = f11;
    fj["variance"] = fd_comb;
    fj["dev_mean"] = std::abs(f11 - rep.mean);
    fj["dev_variance"] = std::abs(fd_comb - rep.second_combination);
    v["finite_difference"] = fj;
    cross_ok = cross_ok && rel_gate(std::abs(f11 - rep.mean), rep.mean, 1e-6) &&
               rel_gate(std::abs(fd_comb - rep.second_combination), rep.second_combination, 1e-6);

    try {
      QuasiProbGrid qp =
          fill_closed(moment_grid(cfg.params, p, cfg.basis), cfg.params, p, cfg.basis);
      double q11 = moment_quadrature(qp, 1, 1).real();
      double q22 = moment_quadrature(qp, 2, 2).real();
      double q_comb = q22 - q11 * q11 + q11;
      ordered_json qj;
      qj["mean"] = q11;
      qj["variance"] = q_comb;
      qj["dev_mean"] = std::abs(q11 - rep.mean);
      qj["dev_variance"] = std::abs(q_comb - rep.second_combination);
      v["quadrature"] = qj;
      cross_ok = cross_ok && rel_gate(std::abs(q11 - rep.mean), rep.mean, 1e-4) &&
                 rel_gate(std::abs(q_comb - rep.second_combination), rep.second_combination, 1e-4);
    } catch (const SingularDistributionError&) {
      v["quadrature"] = nullptr;  // no normalizable distribution at this p
    }

    int cutoff = adaptive_cutoff(cfg.params, 1e-12);
    double m1 = 0.0;
    double m2 = 0.0;
    if (cfg.basis == Basis::B) {
      FockOperators ops = build_operators(cfg.params, cutoff);
      DensityMatrix rho = rho_a(cfg.params.thermal.n_bar, cutoff);
      Eigen::MatrixXcd numop = ops.bdag_mat * ops.b_mat;
      m1 = oracle_moment(rho, numop, 1);
      m2 = oracle_moment(rho, numop, 2);
    } else {
      DensityMatrix rho = rho_b(cfg.params, cutoff);
      Eigen::MatrixXcd numop = Eigen::MatrixXcd::Zero(cutoff, cutoff);
      for (int k = 0; k < cutoff; ++k) numop(k, k) = static_cast<double>(k);
      m1 = oracle_moment(rho, numop, 1);
      m2 = oracle_moment(rho, numop, 2);
    }
    // p = 1 measurements shifted to the requested ordering.
    double om = m1 + 0.5 * (1.0 - cfg.p);
    double oc = (m2 - m1 * m1) + (1.0 - cfg.p) * (m1 + 0.5) +
                0.25 * (1.0 - cfg.p) * (1.0 - cfg.p);
    ordered_json oj;
    oj["cutoff"] = cutoff;
    oj["mean"] = om;
    oj["variance"] = oc;
    oj["dev_mean"] = std::abs(om - rep.mean);
    oj["dev_variance"] = std::abs(oc - rep.second_combination);
    v["oracle"] = oj;
    cross_ok = cross_ok && std::abs(om - rep.mean) <= 1e-6 &&
               std::abs(oc - rep.second_combination) <= 1e-6;

    ordered_json tj;
    tj["finite_difference_rel"] = 1e-6;
    tj["quadrature_rel"] = 1e-4;
    tj["oracle_abs"] = 1e-6;
    v["tolerances"] = tj;
    v["pass"] = cross_ok;
    d["verify"] = v;
  }

  ordered_json root;
  root["metadata"] = metadata_json(cfg);
  root["data"] = ordered_json::array({d});
  int rc = emit(root.dump(2) + "\n", cfg.out);
  if (rc != 0) return rc;
  return cross_ok ? 0 : 1;
}

int dispatch_chi_slice(const RunConfig& cfg) {
  OrderingParam p(cfg.p);
  double extent = cfg.extent > 0.0 ? cfg.extent : 3.0;
  int n = cfg.samples > 0 ? cfg.samples : 256;
  if (n < 2) throw std::invalid_argument("chi-slice needs at least 2 samples");
  Complex dir = std::polar(1.0, cfg.phi_dir);

  std::vector<std::array<double, 5>> rows;
  rows.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    double t = -extent + 2.0 * extent * k / (n - 1);
    Complex xi = t * dir;
    Complex chi = cfg.basis == Basis::B ? chi_a(xi, cfg.params, p) : chi_b(xi, cfg.params, p);
    rows.push_back({xi.real(), xi.imag(), chi.real(), chi.imag(), std::abs(chi)});
  }

  if (cfg.format == "csv") {
    std::string out = "xi_re,xi_im,chi_re,chi_im,chi_abs\n";
    for (const auto& row : rows) {
      out += format_g17(row[0]);
      for (int k = 1; k < 5; ++k) {
        out += ',';
        out += format_g17(row[k]);
      }
      out += '\n';
    }
    return emit(out, cfg.out);
  }

  ordered_json meta = metadata_json(cfg);
  meta["phi_dir"] = cfg.phi_dir;
  meta["extent"] = extent;
  meta["samples"] = n;
  ordered_json data = ordered_json::array();
  for (const auto& row : rows)
    data.push_back(ordered_json::array({row[0], row[1], row[2], row[3], row[4]}));
  ordered_json root;
  root["metadata"] = meta;
  root["data"] = data;
  return emit(root.dump(2) + "\n", cfg.out);
}

int dispatch_verify(const RunConfig& cfg) {
  VerifyOptions vo;
  vo.seed = cfg.seed;
  vo.quick = cfg.quick;
  vo.flip_c_sign = cfg.flip_c_sign;
  VerifyReport report = run_suite(vo);
  std::string summary = render_summary(report, vo);
  std::fwrite(summary.data(), 1, summary.size(), stdout);
  if (!cfg.out.empty() && !write_text_file(cfg.out, summary))
    throw IoFailure("cannot write output file: " + cfg.out);
  return report.pass ? 0 : 1;
}

template <typename F>
int guarded(F&& fn) {
  try {
    return fn();
  } catch (const OracleCapError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const CutoffError& e) {
    if (e.suggested_cutoff > 0)
      std::fprintf(stderr, "error: %s (suggested cutoff: %d)\n", e.what(), e.suggested_cutoff);
    else
      std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const IoFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    // SingularDistribution, grid support/resolution, numerical health and
    // plain domain errors all land here: the validity-domain exit.
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"phase-space distributions of a displaced squeezed thermal mode"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Raw raw;

  SubOpts grid;
  grid.cmd = app.add_subcommand("grid", "evaluate a quasi-probability distribution on a grid");
  add_state_opts(grid, raw);
  grid.extent = grid.cmd->add_option("--extent", raw.extent, "half-extent around the grid center");
  grid.samples = grid.cmd->add_option("--samples", raw.samples,
                                      "grid points per axis (power of two, >= 8)");
  add_output_opts(grid, raw);
  add_config_opt(grid, raw);

  SubOpts moments;
  moments.cmd = app.add_subcommand("moments", "closed-form moment report, optionally cross-checked");
  add_state_opts(moments, raw);
  moments.cmd->add_flag("--verify", raw.cross_verify,
                        "cross-check against finite differences, quadrature and the Fock oracle");
  moments.out = moments.cmd->add_option("--out", raw.out, "output file (default: stdout)");
  add_config_opt(moments, raw);

  SubOpts slice;
  slice.cmd = app.add_subcommand("chi-slice", "characteristic function along a ray through xi = 0");
  add_state_opts(slice, raw);
  slice.phi_dir = slice.cmd->add_option("--phi-dir", raw.phi_dir, "ray direction angle");
  slice.extent = slice.cmd->add_option("--extent", raw.extent, "ray half-length (default 3)");
  slice.samples = slice.cmd->add_option("--samples", raw.samples, "samples along the ray (default 256)");
  add_output_opts(slice, raw);
  add_config_opt(slice, raw);

  SubOpts verify;
  verify.cmd = app.add_subcommand("verify", "run the full property suite");
  verify.seed = verify.cmd->add_option("--seed", raw.seed, "sweep seed (fixed default)");
  verify.quick = verify.cmd->add_flag("--quick", raw.quick, "reduced sweep: 5 draws, 4 xi each");
  verify.cmd->add_flag("--flip-c-sign", raw.flip_c_sign)->group("");  // mutation canary hook
  verify.out = verify.cmd->add_option("--out", raw.out, "also write the summary to a file");
  add_config_opt(verify, raw);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (grid.cmd->parsed())
    return guarded([&] { return dispatch_grid(resolve(raw, grid, "grid")); });
  if (moments.cmd->parsed())
    return guarded([&] { return dispatch_moments(resolve(raw, moments, "moments")); });
  if (slice.cmd->parsed())
    return guarded([&] { return dispatch_chi_slice(resolve(raw, slice, "chi-slice")); });
  return guarded([&] { return dispatch_verify(resolve(raw, verify, "verify")); });
}

}  // namespace qphase
