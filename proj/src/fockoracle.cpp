#include "qphase/fockoracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "qphase/errors.hpp"

namespace qphase {
namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

int round32(double x) {
  int v = static_cast<int>(std::ceil(x));
  if (v < 32) v = 32;
  return ((v + 31) / 32) * 32;
}

// 16, 24, 32, 48, 64, 96, ... each step doubles the value two back.
std::vector<int> cutoff_ladder(int cap) {
  std::vector<int> lad;
  int a = 16, b = 24;
  while (a <= cap) {
    lad.push_back(a);
    int next = 2 * a;
    a = b;
    b = next;
  }
  return lad;
}

MatrixXcd displacement_generator(Complex alpha, int n) {
  MatrixXcd g = MatrixXcd::Zero(n, n);
  for (int m = 0; m + 1 < n; ++m) {
    double root = std::sqrt(static_cast<double>(m + 1));
    g(m + 1, m) += alpha * root;            // alpha adag
    g(m, m + 1) -= std::conj(alpha) * root; // -alpha* a
  }
  return g;
}

MatrixXcd squeeze_generator(Complex zeta, int n) {
  MatrixXcd g = MatrixXcd::Zero(n, n);
  for (int m = 0; m + 2 < n; ++m) {
    double root = std::sqrt(static_cast<double>((m + 1) * (m + 2)));
    g(m + 2, m) -= 0.5 * zeta * root;            // -zeta/2 adag^2
    g(m, m + 2) += 0.5 * std::conj(zeta) * root; // +zeta*/2 a^2
  }
  return g;
}

struct ChainExp {
  std::vector<int> idx;
  VectorXcd phase;  // unit factors rotating the chain real
  MatrixXd vecs;
  VectorXd vals;
};

// expm(i H) for Hermitian H that splits into index chains, kept in factored
// form so large probe bases never pay for full matrix products per column.
struct ExpOperator {
  int n = 0;
  std::vector<ChainExp> chains;

  MatrixXcd apply(const MatrixXcd& x, bool adjoint) const {
    MatrixXcd out = MatrixXcd::Zero(x.rows(), x.cols());
    const int cols = static_cast<int>(x.cols());
    for (const ChainExp& ch : chains) {
      const int m = static_cast<int>(ch.idx.size());
      MatrixXcd xc(m, cols);
      for (int k = 0; k < m; ++k) xc.row(k) = std::conj(ch.phase(k)) * x.row(ch.idx[k]);
      MatrixXd tre = ch.vecs.transpose() * xc.real();
      MatrixXd tim = ch.vecs.transpose() * xc.imag();
      for (int k = 0; k < m; ++k) {
        double ang = adjoint ? -ch.vals(k) : ch.vals(k);
        double cs = std::cos(ang), sn = std::sin(ang);
        for (int c = 0; c < cols; ++c) {
          double re = tre(k, c), im = tim(k, c);
          tre(k, c) = cs * re - sn * im;
          tim(k, c) = sn * re + cs * im;
        }
      }
      MatrixXd yre = ch.vecs * tre;
      MatrixXd yim = ch.vecs * tim;
      for (int k = 0; k < m; ++k)
        for (int c = 0; c < cols; ++c)
          out(ch.idx[k], c) += ch.phase(k) * Complex(yre(k, c), yim(k, c));
    }
    return out;
  }

  MatrixXcd full() const {
    MatrixXcd e = MatrixXcd::Zero(n, n);
    for (const ChainExp& ch : chains) {
      const int m = static_cast<int>(ch.idx.size());
      MatrixXd bre = ch.vecs.transpose();
      MatrixXd bim = bre;
      for (int k = 0; k < m; ++k) {
        bre.row(k) *= std::cos(ch.vals(k));
        bim.row(k) *= std::sin(ch.vals(k));
      }
      MatrixXd cre = ch.vecs * bre;
      MatrixXd cim = ch.vecs * bim;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          e(ch.idx[i], ch.idx[j]) =
              ch.phase(i) * Complex(cre(i, j), cim(i, j)) * std::conj(ch.phase(j));
    }
    return e;
  }
};

MatrixXcd hermitian_part_of(const MatrixXcd& g) {
  MatrixXcd h = Complex(0.0, -1.0) * g;
  double scale = 1.0 + h.cwiseAbs().maxCoeff();
  double dev = (h - h.adjoint()).cwiseAbs().maxCoeff();
  if (!(dev <= 1e-12 * scale))
    throw NumericalHealthError("matrix exponential generator is not anti-Hermitian");
  return 0.5 * (h + MatrixXcd(h.adjoint()));
}

bool chain_groups(const MatrixXcd& h, std::vector<std::vector<int>>& groups) {
  const int n = static_cast<int>(h.rows());
  bool band1 = false, band2 = false;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      if (h(i, j) == Complex(0.0, 0.0)) continue;
      int d = j - i;
      if (d == 1)
        band1 = true;
      else if (d == 2)
        band2 = true;
      else
        return false;
    }
  }
  if (band1 && band2) return false;
  groups.clear();
  if (band2) {
    std::vector<int> evens, odds;
    for (int i = 0; i < n; i += 2) evens.push_back(i);
    for (int i = 1; i < n; i += 2) odds.push_back(i);
    groups.push_back(std::move(evens));
    groups.push_back(std::move(odds));
  } else {
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    groups.push_back(std::move(all));
  }
  return true;
}

ExpOperator make_exp_operator(const MatrixXcd& g) {
  MatrixXcd h = hermitian_part_of(g);
  std::vector<std::vector<int>> groups;
  if (!chain_groups(h, groups))
    throw std::invalid_argument("generator is not chain-structured");
  ExpOperator op;
  op.n = static_cast<int>(h.rows());
  for (const std::vector<int>& idx : groups) {
    const int m = static_cast<int>(idx.size());
    if (m == 0) continue;
    ChainExp ch;
    ch.idx = idx;
    ch.phase = VectorXcd::Ones(m);
    VectorXd diag(m), off(std::max(m - 1, 0));
    for (int k = 0; k < m; ++k) diag(k) = h(idx[k], idx[k]).real();
    for (int k = 0; k + 1 < m; ++k) {
      Complex u = h(idx[k], idx[k + 1]);
      double mag = std::abs(u);
      off(k) = mag;
      ch.phase(k + 1) = (mag == 0.0) ? ch.phase(k) : ch.phase(k) * std::conj(u) / mag;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
      throw NumericalHealthError("tridiagonal eigensolve failed");
    ch.vecs = solver.eigenvectors();
    ch.vals = solver.eigenvalues();
    op.chains.push_back(std::move(ch));
  }
  return op;
}

double suggest_thermal_cutoff(double q, double tol) {
  if (q <= 0.0) return 16;
  return round32(std::log(tol * 0.1) / std::log(q));
}

double diagonal_occupancy(const MatrixXcd& rho) {
  double occ = 0.0;
  for (int k = 0; k < rho.rows(); ++k) occ += k * rho(k, k).real();
  return occ;
}

// Shared probe: columns 0..n_cols-1 of S D on an inflated basis, plus the
// geometric weights. Throws when no affordable basis can hold the support.
struct ColumnProbe {
  int m = 0;
  int n_cols = 0;
  double q = 0.0;
  double leftover = 0.0;  // thermal mass of the omitted columns
  MatrixXcd u;            // m x n_cols
  VectorXd w;
};

ColumnProbe run_column_probe(const StateParams& params, double weight_floor, int min_rows) {
  ColumnProbe pr;
  double nb = params.thermal.n_bar;
  pr.q = nb / (nb + 1.0);
  pr.n_cols = 1;
  if (pr.q > 0.0)
    pr.n_cols = std::max(1, static_cast<int>(std::ceil(std::log(weight_floor) / std::log(pr.q))));
  pr.leftover = (pr.q > 0.0) ? std::pow(pr.q, pr.n_cols) : 0.0;
  double amag = std::abs(params.alpha);
  double reach = std::sqrt(static_cast<double>(pr.n_cols)) + amag;
  int n_d = static_cast<int>(std::ceil(reach * reach)) + 32;
  double want = 1.5 * std::exp(2.0 * params.squeeze.r) * n_d + 64.0;
  if (want > 3072.0) throw OracleCapError("parameters too hot/squeezed for oracle");
  pr.m = round32(std::max(want, static_cast<double>(min_rows)));
  if (pr.m > 3072) throw OracleCapError("parameters too hot/squeezed for oracle");
  ExpOperator disp = make_exp_operator(displacement_generator(params.alpha, pr.m));
  ExpOperator sqz = make_exp_operator(squeeze_generator(params.squeeze.zeta(), pr.m));
  MatrixXcd seed = MatrixXcd::Zero(pr.m, pr.n_cols);
  for (int k = 0; k < pr.n_cols; ++k) seed(k, k) = 1.0;
  pr.u = sqz.apply(disp.apply(seed, false), false);
  pr.w = VectorXd(pr.n_cols);
  double wk = 1.0 - pr.q;
  for (int k = 0; k < pr.n_cols; ++k) {
    pr.w(k) = (pr.q == 0.0) ? (k == 0 ? 1.0 : 0.0) : wk;
    wk *= pr.q;
  }
  return pr;
}

double trailing_mass(const ColumnProbe& pr, int n) {
  if (n >= pr.m) return pr.leftover;
  double mass = pr.leftover;
  for (int k = 0; k < pr.n_cols; ++k)
    mass += pr.w(k) * pr.u.col(k).tail(pr.m - n).squaredNorm();
  return mass;
}

}  // namespace

int safe_block(int cutoff) { return cutoff - std::max(10, cutoff / 5); }

int max_oracle_cutoff() {
  const char* env = std::getenv("QPHASE_MAX_CUTOFF");
  if (env != nullptr) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 16 && v <= 1 << 20) return static_cast<int>(v);
  }
  return 1024;
}

MatrixXcd expm_antihermitian(const MatrixXcd& g) {
  if (g.rows() != g.cols()) throw std::invalid_argument("generator must be square");
  MatrixXcd h = hermitian_part_of(g);
  std::vector<std::vector<int>> groups;
  if (chain_groups(h, groups)) return make_exp_operator(g).full();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success)
    throw NumericalHealthError("dense Hermitian eigensolve failed");
  const int n = static_cast<int>(h.rows());
  VectorXcd cis(n);
  for (int k = 0; k < n; ++k) cis(k) = std::polar(1.0, solver.eigenvalues()(k));
  return solver.eigenvectors() * cis.asDiagonal() * solver.eigenvectors().adjoint();
}

double dual_construction_residual(const StateParams& params, int block) {
  if (block < 1) throw std::invalid_argument("block must be positive");
  double r = params.squeeze.r;
  double want = std::max(1.5 * std::exp(2.0 * r) * block + 64.0, block + 32.0);
  if (want > 3072.0) throw OracleCapError("parameters too hot/squeezed for oracle");
  const int m = round32(want);
  ExpOperator disp = make_exp_operator(displacement_generator(params.alpha, m));
  ExpOperator sqz = make_exp_operator(squeeze_generator(params.squeeze.zeta(), m));
  MatrixXcd seed = MatrixXcd::Zero(m, block);
  for (int k = 0; k < block; ++k) seed(k, k) = 1.0;
  // w_j = D^dag S^dag e_j, so the block of S D a D^dag S^dag is W^dag a W
  MatrixXcd w = disp.apply(sqz.apply(seed, true), true);
  MatrixXcd aw = MatrixXcd::Zero(m, block);
  for (int i = 0; i + 1 < m; ++i)
    aw.row(i) = std::sqrt(static_cast<double>(i + 1)) * w.row(i + 1);
  MatrixXcd sandwiched = w.adjoint() * aw;
  double c = std::cosh(r), s = std::sinh(r);
  Complex phase = std::polar(1.0, params.squeeze.phi);
  double worst = 0.0;
  for (int i = 0; i < block; ++i) {
    for (int j = 0; j < block; ++j) {
      Complex closed(0.0, 0.0);
      if (i == j - 1) closed += c * std::sqrt(static_cast<double>(j));
      if (i == j + 1) closed += s * phase * std::sqrt(static_cast<double>(i));
      if (i == j) closed -= params.alpha;
      worst = std::max(worst, std::abs(sandwiched(i, j) - closed));
    }
  }
  return worst;
}

int adaptive_cutoff(const StateParams& params, double tol) {
  if (!(tol >= 1e-14 && tol <= 1e-6))
    throw std::domain_error("tolerance out of range [1e-14, 1e-6]");
  const int cap = max_oracle_cutoff();
  const std::vector<int> lad = cutoff_ladder(cap);
  double nb = params.thermal.n_bar;
  double q = nb / (nb + 1.0);
  auto thermal_ok = [&](int n) { return q == 0.0 || std::pow(q, n) < tol; };
  if (params.squeeze.r == 0.0 && params.alpha == Complex(0.0, 0.0)) {
    for (int n : lad)
      if (thermal_ok(n)) return n;
    throw OracleCapError("parameters too hot/squeezed for oracle");
  }
  ColumnProbe pr = run_column_probe(params, tol * 1e-2, 64);
  for (int n : lad) {
    if (!thermal_ok(n)) continue;
    if (trailing_mass(pr, n) < tol) return n;
  }
  throw OracleCapError("parameters too hot/squeezed for oracle");
}

FockOperators build_operators(const StateParams& params, int cutoff) {
  if (cutoff < 16) throw std::invalid_argument("cutoff must be at least 16");
  int needed = adaptive_cutoff(params, 1e-6);
  if (cutoff < needed)
    throw CutoffError("cutoff too small for requested parameters", needed);
  FockOperators ops;
  ops.cutoff = cutoff;
  ops.params = params;
  ops.a_mat = MatrixXcd::Zero(cutoff, cutoff);
  for (int m = 1; m < cutoff; ++m) ops.a_mat(m - 1, m) = std::sqrt(static_cast<double>(m));
  ops.adag_mat = ops.a_mat.adjoint();
  ops.d_mat = expm_antihermitian(displacement_generator(params.alpha, cutoff));
  ops.s_mat = expm_antihermitian(squeeze_generator(params.squeeze.zeta(), cutoff));
  double c = std::cosh(params.squeeze.r), s = std::sinh(params.squeeze.r);
  Complex phase = std::polar(1.0, params.squeeze.phi);
  ops.b_mat = c * ops.a_mat + (s * phase) * ops.adag_mat -
              params.alpha * MatrixXcd::Identity(cutoff, cutoff);
  ops.bdag_mat = ops.b_mat.adjoint();
  ops.dual_residual = dual_construction_residual(params, std::min(cutoff, 64));
  if (!(ops.dual_residual <= 1e-8))
    throw NumericalHealthError("dual construction of the quasi-mode ladder disagrees");
  return ops;
}

DensityMatrix rho_a(double n_bar, int cutoff) {
  if (!(n_bar >= 0.0)) throw std::domain_error("n_bar must be nonnegative");
  if (cutoff < 1) throw std::invalid_argument("cutoff must be positive");
  double q = n_bar / (n_bar + 1.0);
  double tail = (q == 0.0) ? 0.0 : std::pow(q, cutoff);
  if (!(tail < 1e-12))
    throw CutoffError("cutoff too small for n_bar",
                      static_cast<int>(suggest_thermal_cutoff(q, 1e-12)));
  DensityMatrix out;
  out.rho = MatrixXcd::Zero(cutoff, cutoff);
  double wk = 1.0 - q;
  double sum = 0.0;
  for (int k = 0; k < cutoff; ++k) {
    double v = (q == 0.0) ? (k == 0 ? 1.0 : 0.0) : wk;
    out.rho(k, k) = v;
    sum += v;
    wk *= q;
  }
  out.rho /= sum;
  out.basis_label = "a-thermal";
  return out;
}

DensityMatrix rho_b(const StateParams& params, int cutoff) {
  if (cutoff < 16) throw std::invalid_argument("cutoff must be at least 16");
  double nb = params.thermal.n_bar;
  double q = nb / (nb + 1.0);
  double thermal_tail = (q == 0.0) ? 0.0 : std::pow(q, cutoff);
  if (!(thermal_tail < 1e-12))
    throw CutoffError("cutoff too small for n_bar",
                      static_cast<int>(suggest_thermal_cutoff(q, 1e-12)));
  if (params.squeeze.r == 0.0 && params.alpha == Complex(0.0, 0.0)) {
    DensityMatrix out = rho_a(nb, cutoff);
    out.basis_label = "B-thermal";
    return out;
  }
  ColumnProbe pr = run_column_probe(params, 1e-15, cutoff + 32);
  double tail = trailing_mass(pr, cutoff);
  if (!(tail < 1e-8)) {
    int suggested = cutoff;
    try {
      suggested = adaptive_cutoff(params, 1e-8);
    } catch (const OracleCapError&) {
      suggested = max_oracle_cutoff();
    }
    throw CutoffError("cutoff too small for requested parameters", suggested);
  }
  MatrixXcd top = pr.u.topRows(cutoff);
  MatrixXcd rho = top * pr.w.asDiagonal() * top.adjoint();
  rho = 0.5 * (rho + MatrixXcd(rho.adjoint()));
  rho /= rho.trace().real();
  // construction gate: diagonal mean against the closed physical-mode mean
  double r = params.squeeze.r;
  Complex t_minus = params.alpha * std::cosh(r) -
                    std::conj(params.alpha) * std::sinh(r) * std::polar(1.0, params.squeeze.phi);
  double sh = std::sinh(r);
  double want = nb * std::cosh(2.0 * r) + sh * sh + std::norm(t_minus);
  double mean = diagonal_occupancy(rho);
  if (!(std::abs(mean - want) <= 1e-6 * std::max(1.0, std::abs(want)))) {
    int suggested = cutoff;
    try {
      suggested = adaptive_cutoff(params, 1e-8);
    } catch (const OracleCapError&) {
      suggested = max_oracle_cutoff();
    }
    throw CutoffError("cutoff too small for requested parameters", suggested);
  }
  DensityMatrix out;
  out.rho = std::move(rho);
  out.basis_label = "B-thermal";
  return out;
}

OracleValue oracle_chi(const DensityMatrix& rho, const MatrixXcd& op,
                       const MatrixXcd& opdag, ComplexAmplitude xi, OrderingParam p) {
  const int n = static_cast<int>(rho.rho.rows());
  if (rho.rho.cols() != n || op.rows() != n || op.cols() != n || opdag.rows() != n ||
      opdag.cols() != n)
    throw std::invalid_argument("cutoff mismatch between rho and ladder");
  require_finite(xi, "xi");
  MatrixXcd gen = xi * opdag - std::conj(xi) * op;
  MatrixXcd e = expm_antihermitian(gen);
  Complex tr = rho.rho.transpose().cwiseProduct(e).sum();
  OracleValue out;
  out.value = tr * std::exp(0.5 * p.p * std::norm(xi));
  double occ = std::max(diagonal_occupancy(rho.rho), 0.0);
  double reach = std::sqrt(occ) + std::abs(xi);
  double n_top = reach * reach;
  out.trusted = n_top + 10.0 * std::sqrt(n_top + 1.0) + 16.0 <= static_cast<double>(n);
  return out;
}

double oracle_moment(const DensityMatrix& rho, const MatrixXcd& number_op, int power) {
  const int n = static_cast<int>(rho.rho.rows());
  if (number_op.rows() != n || number_op.cols() != n)
    throw std::invalid_argument("cutoff mismatch between rho and number operator");
  if (power != 1 && power != 2) throw std::invalid_argument("power must be 1 or 2");
  Complex tr;
  if (power == 1) {
    tr = rho.rho.transpose().cwiseProduct(number_op).sum();
  } else {
    MatrixXcd sq = number_op * number_op;
    tr = rho.rho.transpose().cwiseProduct(sq).sum();
  }
  if (!(std::abs(tr.imag()) < 1e-10))
    throw NumericalHealthError("oracle moment carries a non-negligible imaginary part");
  return tr.real();
}

double commutator_deviation(const FockOperators& ops) {
  const int n = ops.cutoff;
  const int sb = safe_block(n);
  const MatrixXcd& b = ops.b_mat;
  double worst = 0.0;
  for (int i = 0; i < sb; ++i) {
    for (int j = std::max(0, i - 2); j < std::min(sb, i + 3); ++j) {
      Complex bbd(0.0, 0.0), bdb(0.0, 0.0);
      int lo = std::max(0, std::min(i, j) - 1);
      int hi = std::min(n - 1, std::max(i, j) + 1);
      for (int k = lo; k <= hi; ++k) {
        bbd += b(i, k) * std::conj(b(j, k));
        bdb += std::conj(b(k, i)) * b(k, j);
      }
      Complex want = (i == j) ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
      worst = std::max(worst, std::abs(bbd - bdb - want));
    }
  }
  return worst;
}

}  // namespace qphase
