#include "nmr/spectrum.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nmr {

namespace {

Eigen::MatrixXd to_eigen(const DenseSymmetricMatrix& M) {
  const int d = M.dim();
  Eigen::MatrixXd A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) A(i, j) = M(i, j);
  return A;
}

Eigen::VectorXd to_eigen(const Vector& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<long>(v.size()));
}

Vector from_eigen(const Eigen::VectorXd& v) {
  return Vector(v.data(), v.data() + v.size());
}

// Orthonormal basis of the order-t Krylov space, rank-truncated.
Eigen::MatrixXd krylov_basis(const Eigen::MatrixXd& A, const Eigen::VectorXd& g,
                             int t) {
  const int d = static_cast<int>(A.rows());
  Eigen::MatrixXd B(d, t);
  int rank = 0;
  Eigen::VectorXd z = g;
  for (int k = 0; k < t; ++k) {
    if (k > 0) z = A * B.col(rank - 1);
    const double pre = z.norm();
    // Modified Gram-Schmidt with one repeat pass.
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i < rank; ++i) z -= B.col(i).dot(z) * B.col(i);
    const double nz = z.norm();
    if (nz <= 1e-10 * pre) break;  // Krylov space stopped growing
    B.col(rank) = z / nz;
    ++rank;
  }
  return B.leftCols(rank);
}

}  // namespace

double SpectrumReport::relevant_mass() const {
  double s = 0.0;
  for (const auto& e : relevant) s += e.weight;
  return s;
}

double SpectrumReport::nonzero_mass() const {
  double s = 0.0;
  for (const auto& e : relevant)
    if (e.lambda != 0.0) s += e.weight;
  return s;
}

double SpectrumReport::nu_j(int j) const {
  if (j < 1 || j > static_cast<int>(relevant.size()))
    throw std::invalid_argument("nu_j: index out of range");
  double tail = 0.0;
  for (int i = j - 1; i < static_cast<int>(relevant.size()); ++i)
    tail += relevant[static_cast<std::size_t>(i)].weight;
  const double total = nonzero_mass();
  return total > 0.0 ? tail / total : 0.0;
}

double SpectrumReport::kappa_j(int j) const {
  if (j < 1 || j > static_cast<int>(relevant.size()))
    throw std::invalid_argument("kappa_j: index out of range");
  const double lj = relevant[static_cast<std::size_t>(j - 1)].lambda;
  if (lj >= 0.0) throw std::invalid_argument("kappa_j: lambda_j must be negative");
  return relevant.front().lambda / (-lj);
}

SpectrumReport g_relevant_spectrum(const DenseSymmetricMatrix& M, const Vector& g,
                                   double eig_cluster_tol, double proj_tol) {
  if (M.dim() != static_cast<int>(g.size()))
    throw std::invalid_argument("g_relevant_spectrum: dimension mismatch");
  if (M.dim() > 200)
    throw std::invalid_argument("g_relevant_spectrum: dense oracle capped at d <= 200");
  const double gnorm2 = dot(g, g);
  if (gnorm2 == 0.0)
    throw std::invalid_argument("g_relevant_spectrum: zero right-hand side");

  const Eigen::MatrixXd A = to_eigen(M);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("g_relevant_spectrum: eigendecomposition failed");

  const Eigen::VectorXd lam = es.eigenvalues();  // ascending
  const Eigen::MatrixXd U = es.eigenvectors();
  const Eigen::VectorXd ge = to_eigen(g);
  const int d = M.dim();
  const double scale = std::max(std::abs(lam(0)), std::abs(lam(d - 1)));
  const double ctol = eig_cluster_tol * std::max(scale, 1e-300);

  SpectrumReport rep;
  int i = d - 1;
  while (i >= 0) {  // walk descending, grouping eigenvalues within ctol
    int j = i;
    while (j - 1 >= 0 && lam(i) - lam(j - 1) <= ctol) --j;
    double wsum = 0.0, lsum = 0.0;
    for (int k = j; k <= i; ++k) {
      const double p = U.col(k).dot(ge);
      wsum += p * p;
      lsum += lam(k);
    }
    double lrep = lsum / (i - j + 1);
    if (std::abs(lrep) <= ctol) lrep = 0.0;
    if (wsum > proj_tol * gnorm2) rep.relevant.push_back({lrep, wsum});
    i = j - 1;
  }

  for (const auto& e : rep.relevant) {
    if (e.lambda > 0.0) ++rep.psi_plus;
    else if (e.lambda < 0.0) ++rep.psi_minus;
    else ++rep.psi_zero;
  }
  rep.grade = rep.psi_plus + rep.psi_minus + rep.psi_zero;
  if (!rep.relevant.empty()) {
    rep.lambda_max_rel = rep.relevant.front().lambda;
    rep.lambda_min_rel = rep.relevant.back().lambda;
  }
  return rep;
}

int krylov_rank(const DenseSymmetricMatrix& M, const Vector& g, double tol) {
  const Eigen::MatrixXd A = to_eigen(M);
  const Eigen::VectorXd ge = to_eigen(g);
  const int d = M.dim();
  Eigen::MatrixXd K(d, d);
  Eigen::VectorXd z = ge;
  for (int k = 0; k < d; ++k) {
    K.col(k) = z;
    z = A * z;
    const double nz = K.col(k).norm();
    if (nz > 0) K.col(k) /= nz;  // column scaling keeps the QR threshold meaningful
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(K);
  qr.setThreshold(tol);
  return static_cast<int>(qr.rank());
}

Vector krylov_brute_force_minres(const DenseSymmetricMatrix& M, const Vector& g,
                                 int t) {
  if (t < 1 || t > M.dim())
    throw std::invalid_argument("krylov_brute_force_minres: bad order");
  const Eigen::MatrixXd A = to_eigen(M);
  const Eigen::VectorXd ge = to_eigen(g);
  const Eigen::MatrixXd B = krylov_basis(A, ge, t);
  const Eigen::MatrixXd AB = A * B;
  // min_y ||AB y + g||
  const Eigen::VectorXd y =
      AB.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(-ge);
  return from_eigen(B * y);
}

Vector krylov_brute_force_minres_normal_eq(const DenseSymmetricMatrix& M,
                                           const Vector& g, int t) {
  if (t < 1 || t > M.dim())
    throw std::invalid_argument("krylov_brute_force_minres: bad order");
  const Eigen::MatrixXd A = to_eigen(M);
  const Eigen::VectorXd ge = to_eigen(g);
  const Eigen::MatrixXd B = krylov_basis(A, ge, t);
  const Eigen::MatrixXd AB = A * B;
  const Eigen::MatrixXd G = AB.transpose() * AB;
  const Eigen::VectorXd rhs = -AB.transpose() * ge;
  const Eigen::VectorXd y = G.ldlt().solve(rhs);
  return from_eigen(B * y);
}

double lambda_min_tridiag(const std::vector<double>& alpha,
                          const std::vector<double>& beta) {
  const int t = static_cast<int>(alpha.size());
  if (t == 0) throw std::invalid_argument("lambda_min_tridiag: empty");
  if (static_cast<int>(beta.size()) != t - 1)
    throw std::invalid_argument("lambda_min_tridiag: off-diagonal size");
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(t, t);
  for (int i = 0; i < t; ++i) T(i, i) = alpha[static_cast<std::size_t>(i)];
  for (int i = 0; i + 1 < t; ++i) {
    T(i, i + 1) = beta[static_cast<std::size_t>(i)];
    T(i + 1, i) = beta[static_cast<std::size_t>(i)];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  return es.eigenvalues()(0);
}

BoundInputs sol_bound_inputs(const SpectrumReport& report, std::optional<int> i_in,
                             std::optional<int> j_in) {
  if (report.psi_plus + report.psi_minus < 1)
    throw std::invalid_argument("sol_bound_inputs: no nonzero relevant eigenvalue");
  const int i = i_in.value_or(report.psi_plus);
  const int j = j_in.value_or(report.psi_plus + report.psi_zero + 1);
  const int psi = static_cast<int>(report.relevant.size());

  BoundInputs inp;
  inp.grade = report.grade;
  inp.L_g = std::max(std::abs(report.lambda_max_rel), std::abs(report.lambda_min_rel));

  double mu_pos = 0.0, mu_neg = 0.0;
  double mass = 0.0;
  if (report.psi_plus >= 1) {
    if (i < 1 || i > report.psi_plus)
      throw std::invalid_argument("sol_bound_inputs: i out of range");
    mu_pos = report.relevant[static_cast<std::size_t>(i - 1)].lambda;
    inp.kappa_plus = report.relevant.front().lambda / mu_pos;
    for (int k = 1; k <= i; ++k)
      mass += report.relevant[static_cast<std::size_t>(k - 1)].weight;
  }
  if (report.psi_minus >= 1) {
    if (j < report.psi_plus + report.psi_zero + 1 || j > psi)
      throw std::invalid_argument("sol_bound_inputs: j out of range");
    mu_neg = -report.relevant[static_cast<std::size_t>(j - 1)].lambda;
    inp.kappa_minus = report.relevant.back().lambda /
                      report.relevant[static_cast<std::size_t>(j - 1)].lambda;
    for (int k = j; k <= psi; ++k)
      mass += report.relevant[static_cast<std::size_t>(k - 1)].weight;
  }
  if (report.psi_plus >= 1 && report.psi_minus >= 1)
    inp.mu = std::min(mu_pos, mu_neg);
  else
    inp.mu = std::max(mu_pos, mu_neg);
  const double total = report.nonzero_mass();
  inp.nu = total > 0.0 ? std::min(mass / total, 1.0) : 0.0;
  return inp;
}

BoundInputs npc_bound_inputs(const SpectrumReport& report, std::optional<int> j_in) {
  if (report.psi_minus < 1)
    throw std::invalid_argument("npc_bound_inputs: needs a negative relevant eigenvalue");
  const int j = j_in.value_or(report.psi_plus + report.psi_zero + 1);
  const int psi = static_cast<int>(report.relevant.size());
  if (j < report.psi_plus + report.psi_zero + 1 || j > psi)
    throw std::invalid_argument("npc_bound_inputs: j out of range");

  BoundInputs inp;
  inp.grade = report.grade;
  inp.L_g = std::max(std::abs(report.lambda_max_rel), std::abs(report.lambda_min_rel));
  inp.mu = -report.relevant[static_cast<std::size_t>(j - 1)].lambda;
  if (report.psi_plus >= 1)
    inp.kappa_plus = report.relevant.front().lambda /
                     report.relevant[static_cast<std::size_t>(report.psi_plus - 1)].lambda;
  inp.kappa_minus = report.relevant.back().lambda /
                    report.relevant[static_cast<std::size_t>(j - 1)].lambda;
  inp.nu = report.nu_j(j);
  return inp;
}

int bound_T_S(const BoundInputs& inp, double eta) {
  if (eta <= 0.0) throw std::invalid_argument("bound_T_S: eta must be positive");
  const double frac = eta * eta / (inp.L_g * inp.L_g + eta * eta);
  const double arg = frac - (1.0 - inp.nu);
  if (arg <= 0.0) throw std::invalid_argument("bound_T_S: eta too small for nu");
  const double raw = std::sqrt(inp.L_g / inp.mu) / 4.0 * std::log(4.0 / arg);
  const int t = static_cast<int>(std::ceil(raw)) + 1;
  return std::min(std::max(t, 1), inp.grade);
}

int bound_T_N(const BoundInputs& inp) {
  if (inp.nu >= 1.0) return 1;
  const double lead = std::sqrt(2.0 * (inp.L_g + inp.mu) / inp.mu) / 4.0;
  const double arg = 2.0 * (inp.L_g + inp.mu) * (1.0 - inp.nu) / (inp.mu * inp.nu);
  const double raw = lead * std::log(arg) + 1.0;
  const int t = std::max(static_cast<int>(std::ceil(raw)), 1);
  return std::min(t, inp.grade);
}

double lanczos_eig_gap_bound(const SpectrumReport& report, int j, int t) {
  if (report.psi_plus < 1 || report.psi_minus < 1)
    throw std::invalid_argument("lanczos_eig_gap_bound: needs indefinite relevant spectrum");
  const double nuj = report.nu_j(j);
  const double kj = report.kappa_j(j);
  const double l1 = report.relevant.front().lambda;
  const double lj = report.relevant[static_cast<std::size_t>(j - 1)].lambda;
  if (nuj >= 1.0) return 0.0;
  const double rt = std::sqrt(kj + 1.0);
  const double ratio = (rt - 1.0) / (rt + 1.0);
  return 4.0 * ((1.0 - nuj) / nuj) * (l1 - lj) *
         std::pow(ratio, 2.0 * (t - 1));
}

int bound_T_NL(double L_g, double eps_h, double delta, int d) {
  if (delta <= 0.0 || delta >= 1.0)
    throw std::invalid_argument("bound_T_NL: delta must be in (0,1)");
  const double raw =
      std::sqrt(L_g / eps_h) / 2.0 * std::log(2.75 * d / (delta * delta)) + 1.0;
  return std::min(static_cast<int>(std::ceil(raw)), d);
}

int bound_T_P(double L_g, double mu, double eps_h, double delta, int d) {
  if (0.5 * eps_h >= mu)
    throw std::invalid_argument("bound_T_P: eps_h/2 must be below mu");
  if (d < 3) throw std::invalid_argument("bound_T_P: d must be at least 3");
  const double cd = std::exp(std::lgamma(d / 2.0) - std::lgamma((d - 1) / 2.0)) /
                    std::sqrt(std::numbers::pi);
  const double den = mu - 0.5 * eps_h;
  const double lead = 0.25 * std::sqrt((L_g + mu) / den);
  const double arg =
      4.0 * (L_g + mu) / den * (4.0 * cd * cd / (delta * delta) - 1.0);
  const double raw = lead * std::log(arg) + 1.0;
  const int t = std::max(static_cast<int>(std::ceil(raw)), 3);
  return std::min(t, d);
}

}  // namespace nmr
