#include "stability.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace memsdde {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double norm_inf(const Eigen::MatrixXd& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

double norm_2(const Eigen::MatrixXd& m) {
  if (m.isZero(0.0)) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

DelayLinearization linearize_at_equilibrium(const ActuatorParams& p, double x_star) {
  const double v0 = p.voltage.v0();
  const double residual = std::abs((1.0 - x_star) * x_star * x_star - p.e * v0 * v0);
  if (residual > 1e-8)
    fail(ErrorCode::NotAnEquilibrium,
         "equilibrium residual " + std::to_string(residual) + " exceeds 1e-8");

  DelayLinearization lin{};
  lin.a = (2.0 - 3.0 * x_star) / x_star;
  lin.b = -p.damping.dvel(x_star);
  // equal to 2 e v0 g_i / x^2 through (1-x)x^2 = e v0^2
  lin.g1hat = 2.0 * (1.0 - x_star) * p.g1 / v0;
  lin.g2hat = 2.0 * (1.0 - x_star) * p.g2 / v0;
  lin.A << 0.0, 1.0, lin.a - lin.g1hat, lin.b - lin.g2hat;
  lin.B << 0.0, 0.0, lin.g1hat, lin.g2hat;
  return lin;
}

LyapunovCertificate lyapunov_certificate(const DelayLinearization& lin) {
  const double a = lin.a;
  const double b = lin.b;
  if (!(a < 0.0) || !(b < 0.0))
    fail(ErrorCode::SignAssumptionViolated, "certificate requires a < 0 and b < 0");

  LyapunovCertificate cert{};
  cert.C << (b * b - a * (1.0 - a)) / (2.0 * a * b), -1.0 / (2.0 * a), -1.0 / (2.0 * a),
      (1.0 - a) / (2.0 * a * b);

  // With P = (1-a)^2 + b^2 and Q = (1+a)^2 + b^2 the ratio
  //   -(a^2+b^2+1 - sqrt((a^2+b^2+1)^2 - 4a^2)) / (2a)
  // equals (sqrt(P) - sqrt(Q))^2 / (4|a|) = 4|a| / (sqrt(P)+sqrt(Q))^2,
  // which is free of the cancellation that kills the printed form when
  // |b| is large or |a| is near 1.
  const double sp = std::sqrt((1.0 - a) * (1.0 - a) + b * b);
  const double sq = std::sqrt((1.0 + a) * (1.0 + a) + b * b);
  cert.lambda_ratio = -4.0 * a / ((sp + sq) * (sp + sq));

  const Eigen::Matrix2d M = lin.A + lin.B;
  const Eigen::Matrix2d res =
      M.transpose() * cert.C + cert.C * M + Eigen::Matrix2d::Identity();
  cert.residual_inf = norm_inf(res);
  return cert;
}

double delay_bound_d0(const DelayLinearization& lin) {
  const LyapunovCertificate cert = lyapunov_certificate(lin);
  const double gsum = std::abs(lin.g1hat + lin.g2hat);
  if (gsum == 0.0) return kInf;  // no delayed term in the linearization

  const double a = lin.a;
  const double b = lin.b;
  const double cb_factor = std::max(1.0, (a - 1.0) / b);
  const double norm_a = std::max(1.0, std::abs(a - lin.g1hat) + std::abs(b - lin.g2hat));
  return std::sqrt(cert.lambda_ratio) * std::abs(a) / (gsum * cb_factor * (norm_a + gsum));
}

double khusainov_tau0(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const auto n = A.rows();
  if (A.cols() != n || B.rows() != n || B.cols() != n)
    fail(ErrorCode::Config, "khusainov_tau0 requires square matrices of equal size");
  if (B.isZero(0.0)) return kInf;

  const Eigen::MatrixXd M = A + B;
  const Eigen::VectorXcd eig = M.eigenvalues();
  for (Eigen::Index i = 0; i < eig.size(); ++i)
    if (eig(i).real() >= 0.0)
      fail(ErrorCode::NotHurwitz, "A + B has an eigenvalue with non-negative real part");

  // vec(M^T C + C M) = (I (x) M^T + M^T (x) I) vec(C) = -vec(I)
  const auto nn = n * n;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nn, nn);
  const Eigen::MatrixXd Mt = M.transpose();
  for (Eigen::Index i = 0; i < n; ++i)
    K.block(i * n, i * n, n, n) += Mt;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      K.block(i * n, j * n, n, n).diagonal().array() += Mt(i, j);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nn);
  for (Eigen::Index i = 0; i < n; ++i) rhs(i * n + i) = -1.0;

  const Eigen::VectorXd cvec = K.colPivHouseholderQr().solve(rhs);
  Eigen::MatrixXd C(n, n);
  for (Eigen::Index j = 0; j < n; ++j) C.col(j) = cvec.segment(j * n, n);
  C = 0.5 * (C + C.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  if (!(lmin > 0.0))
    fail(ErrorCode::NotHurwitz, "Lyapunov solution is not positive definite");

  return std::sqrt(lmin / lmax) / (2.0 * (norm_inf(A) + norm_inf(B)) * norm_inf(C * B));
}

std::complex<double> hn_determinant(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double T,
                                    double d, int n) {
  if (!(T > 0.0)) fail(ErrorCode::Config, "hn_determinant requires T > 0");
  const std::complex<double> iw(0.0, 2.0 * n * kPi / T);
  const std::complex<double> rot = std::exp(std::complex<double>(0.0, -2.0 * n * kPi * d / T));
  Eigen::MatrixXcd M = -A.cast<std::complex<double>>() - rot * B.cast<std::complex<double>>();
  M.diagonal().array() += iw;
  return M.determinant();
}

NondegeneracyResult is_nondegenerate_delay(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                           double T, double d, double tol) {
  if (!(T > 0.0)) fail(ErrorCode::Config, "is_nondegenerate_delay requires T > 0");
  // |2 n pi / T| > ||A||_2 + ||B||_2 >= spectral radius of A + e^{-i theta} B
  // rules out zeros of h_n beyond n_max.
  const int n_max =
      static_cast<int>(std::ceil(T * (norm_2(A) + norm_2(B)) / (2.0 * kPi)));
  NondegeneracyResult out{true, 0, kInf};
  for (int n = -n_max; n <= n_max; ++n) {
    const double mag = std::abs(hn_determinant(A, B, T, d, n));
    if (mag < out.min_abs) {
      out.min_abs = mag;
      out.witness_n = n;
    }
  }
  out.ok = out.min_abs > tol;
  if (out.ok) out.witness_n = 0;
  return out;
}

int poincare_degree_sign(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const double det = (A + B).determinant();
  if (std::abs(det) <= 1e-14)
    fail(ErrorCode::SingularMatrix, "det(A+B) vanishes; degree sign undefined");
  return det > 0.0 ? 1 : -1;
}

double velocity_bound(double sigma, double rho, double c, double e, const VoltageProfile& voltage,
                      double T) {
  if (!(0.0 < sigma) || !(sigma <= rho))
    fail(ErrorCode::Config, "velocity_bound requires 0 < sigma <= rho");
  const double vmin = voltage.min_value();
  const double vmax = voltage.max_value();
  const double lo = std::abs(1.0 - sigma - e * vmin * vmin / (rho * rho));
  const double hi = std::abs(1.0 - rho - e * vmax * vmax / (sigma * sigma));
  return c * (rho - sigma) + std::max(lo, hi) * T;
}

HillVerdict hill_nondegenerate(const HillCoefficients& h) {
  if (h.a.empty() || h.a.size() != h.b.size() || h.a.size() != h.bdot.size())
    fail(ErrorCode::Config, "hill coefficients require equal non-empty grids");
  if (!(h.T > 0.0)) fail(ErrorCode::Config, "hill coefficients require T > 0");

  double qmin = kInf;
  double qabs = 0.0;
  double bsum = 0.0;
  for (size_t i = 0; i < h.a.size(); ++i) {
    const double cb = h.c + h.b[i];
    const double q = 4.0 * h.a[i] - cb * cb - 2.0 * h.bdot[i] * h.bdot[i];
    qmin = std::min(qmin, q);
    qabs = std::max(qabs, std::abs(q));
    bsum += h.b[i];
  }
  const double bound = (kPi / h.T) * (kPi / h.T);

  HillVerdict v{};
  v.margin_pointwise = qmin;
  v.margin_linf = bound - qabs;
  v.margin_mean = std::abs(h.c + bsum / static_cast<double>(h.b.size()));
  // 1e-9 safety margin against the finite sampling grid
  v.ok = v.margin_pointwise >= 1e-9 && v.margin_linf >= 1e-9 && v.margin_mean > 1e-12;
  return v;
}

GainCaseReport gain_case_gates(const ActuatorParams& p, const BracketSet& brackets, double T) {
  if (p.damping.kind != DampingKind::Linear)
    fail(ErrorCode::Inapplicable, "gain-case gates require linear damping");
  if (p.g2 == 0.0)
    fail(ErrorCode::Inapplicable, "gain-case gates require a velocity gain g2 != 0");

  const double c = p.damping.coeff;
  const double xi2 = brackets.xi2;
  const double eta2 = brackets.eta2;
  const double vmin = p.voltage.min_value();
  const double vmax = p.voltage.max_value();
  const double lambda = velocity_bound(xi2, eta2, c, p.e, p.voltage, T);

  GainCaseReport r{};
  r.b_star = 2.0 * p.g2 * (1.0 - xi2) / vmax;
  r.bdot_star = 2.0 * p.e * std::abs(p.g2) / (xi2 * xi2 * xi2) *
                (xi2 * p.voltage.max_derivative() + 2.0 * vmax * lambda);

  const double a_eq_lo = (3.0 * xi2 - 2.0) / xi2;
  const double a_eq_hi = (3.0 * eta2 - 2.0) / eta2;
  if (p.g1 >= 0.0) {
    r.a_lower = 2.0 * p.g1 * (1.0 - eta2) / vmin + a_eq_lo;
    r.a_upper = 2.0 * p.g1 * (1.0 - xi2) / vmax + a_eq_hi;
  } else {
    r.a_lower = 2.0 * p.g1 * (1.0 - xi2) / vmax + a_eq_lo;
    r.a_upper = 2.0 * p.g1 * (1.0 - eta2) / vmin + a_eq_hi;
  }

  const double cb = c + r.b_star;
  r.margin_q_positive = r.a_lower - 0.25 * cb * cb - 0.5 * r.bdot_star * r.bdot_star;
  r.margin_linf = (kPi / T) * (kPi / T) + 0.25 * c * c - r.a_upper;

  if (p.g2 > 0.0) {
    r.evaluated = p.g1 >= 0.0 ? GainCase::A : GainCase::B;
    // b(t) > 0 pointwise, so c + mean(b) stays above c + b lower bound
    r.margin_mean = c + 2.0 * p.g2 * (1.0 - eta2) / vmin;
    r.margin_sign_gate = kNaN;
    r.margin_extra_gate = kNaN;
    const bool ok = r.margin_q_positive >= 0.0 && r.margin_linf > 0.0 && r.margin_mean > 0.0;
    r.tag = ok ? r.evaluated : GainCase::None;
  } else {
    r.evaluated = p.g1 >= 0.0 ? GainCase::C : GainCase::D;
    // damping gate: c + b(t) bounded away from zero on one side
    const double gate_neg = -(c + 2.0 * p.g2 * (1.0 - eta2) / vmin);  // c + b stays < 0
    const double gate_pos = c + 2.0 * p.g2 * (1.0 - xi2) / vmax;      // c + b stays > 0
    r.margin_sign_gate = std::max(gate_neg, gate_pos);
    r.margin_extra_gate = p.g2 + c * vmax / (1.0 - xi2);
    r.margin_mean = r.margin_sign_gate;
    const bool ok = r.margin_sign_gate > 0.0 && r.margin_extra_gate > 0.0 &&
                    r.margin_q_positive > 0.0 && r.margin_linf > 0.0;
    r.tag = ok ? r.evaluated : GainCase::None;
  }
  return r;
}

namespace detail {

double solve_r_offset(double target) {
  if (!(target >= 0.0)) fail(ErrorCode::Config, "solve_r_offset requires target >= 0");
  if (target == 0.0) return 0.0;
  auto f = [target](double r) { return r - std::log1p(r) - target; };
  double hi = 1.0;
  while (f(hi) < 0.0) hi *= 2.0;
  double lo = 0.0;
  while (hi - lo > 1e-13 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double solve_lstar(double M, double T) {
  const double bound = (kPi / T) * (kPi / T);
  if (M > bound * (1.0 + 1e-12))
    fail(ErrorCode::NoLstarRoot, "no root interval: M exceeds (pi/T)^2");
  if (M >= bound) return bound;  // both sides of the defining equation vanish

  auto f = [M, T](double L) {
    const double s = T * std::sqrt(L);
    return std::sin(s) - s * (L - M) / (L + M);
  };
  double lo = M;
  double hi = bound;
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo < 0.0 || fhi > 0.0)
    fail(ErrorCode::NoLstarRoot, "defining equation has no sign change on [M, (pi/T)^2]");
  while (hi - lo > 1e-13 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) >= 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

std::vector<DelaySweepRow> delay_bound_sweep(double e, double c, double gamma, double g1,
                                             double g2, double v0_lo, double v0_hi,
                                             double v0_step) {
  if (!(v0_step > 0.0) || !(v0_hi >= v0_lo))
    fail(ErrorCode::Config, "sweep requires v0_hi >= v0_lo and v0_step > 0");
  auto companion = [](double a, double b, double g1h, double g2h) {
    DelayLinearization lin{};
    lin.a = a;
    lin.b = b;
    lin.g1hat = g1h;
    lin.g2hat = g2h;
    lin.A << 0.0, 1.0, a - g1h, b - g2h;
    lin.B << 0.0, 0.0, g1h, g2h;
    return lin;
  };
  std::vector<DelaySweepRow> rows;
  for (double v0 = v0_lo; v0 <= v0_hi + 1e-9 * v0_step; v0 += v0_step) {
    const double x2 = equilibria(e, v0).x2;
    const double a = (2.0 - 3.0 * x2) / x2;
    const double g1h = 2.0 * (1.0 - x2) * g1 / v0;
    const double g2h = 2.0 * (1.0 - x2) * g2 / v0;
    const double om = 1.0 - x2;
    rows.push_back(DelaySweepRow{
        v0, delay_bound_d0(companion(a, -c, g1h, g2h)),
        delay_bound_d0(companion(a, -gamma / (om * om * om), g1h, g2h))});
  }
  return rows;
}

SqueezeFlags squeeze_conditions(double gamma, const BracketSet& brackets, double T) {
  if (!(gamma > 0.0)) fail(ErrorCode::Config, "squeeze_conditions requires gamma > 0");
  if (!(T > 0.0)) fail(ErrorCode::Config, "squeeze_conditions requires T > 0");
  const double xi2 = brackets.xi2;
  const double eta2 = brackets.eta2;
  if (!(xi2 > 0.0) || !(xi2 <= eta2) || !(eta2 < 1.0))
    fail(ErrorCode::Config, "squeeze_conditions requires 0 < xi2 <= eta2 < 1");

  SqueezeFlags out{};
  out.N = gamma / (eta2 * eta2 * eta2);
  out.a_hat = std::max(out.N, eta2 - xi2);
  out.R = detail::solve_r_offset(out.a_hat * (eta2 - xi2));
  out.M = 3.0 * gamma * out.R / (eta2 * eta2 * eta2 * eta2) + (3.0 * eta2 - 2.0) / eta2;

  const double bound = (kPi / T) * (kPi / T);
  out.m_ok = out.M <= bound * (1.0 + 1e-12);
  if (!out.m_ok) {
    out.Lstar = kNaN;
    out.H = kNaN;
    out.n_ok = false;
    out.satisfied = false;
    return out;
  }
  out.Lstar = detail::solve_lstar(out.M, T);
  const double s = T * std::sqrt(out.Lstar);
  out.H = (out.Lstar - out.M) / std::sqrt(out.Lstar) * (std::cos(0.5 * s) / std::sin(0.5 * s));
  out.n_ok = out.N <= out.H;
  out.satisfied = out.m_ok && out.n_ok;
  return out;
}

}  // namespace memsdde
