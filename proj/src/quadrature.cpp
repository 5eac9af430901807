#include "adboot/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace adboot {

QuadratureRule gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("quadrature needs at least one node");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = std::sqrt(k / 2.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  if (eig.info() != Eigen::Success) throw std::runtime_error("Golub-Welsch eigensolver failed");
  QuadratureRule rule;
  rule.nodes = eig.eigenvalues();
  rule.weights.resize(n);
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  for (int i = 0; i < n; ++i) {
    const double v = eig.eigenvectors()(0, i);
    rule.weights(i) = sqrt_pi * v * v;
  }
  // Symmetrize: the rule is exactly symmetric about 0.
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const double x = 0.5 * (rule.nodes(j) - rule.nodes(i));
    const double w = 0.5 * (rule.weights(i) + rule.weights(j));
    rule.nodes(i) = -x;
    rule.nodes(j) = x;
    rule.weights(i) = w;
    rule.weights(j) = w;
  }
  if (n % 2 == 1) rule.nodes(n / 2) = 0.0;
  return rule;
}

QuadratureRule gauss_hermite_normal(int n) {
  QuadratureRule rule = gauss_hermite(n);
  rule.nodes *= std::numbers::sqrt2;
  rule.weights /= std::sqrt(std::numbers::pi);
  return rule;
}

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
  double a, b, value, error;
  bool operator<(const Piece& o) const { return error < o.error; }
};

Piece kronrod(const Integrand& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int k = 0; k < 7; ++k) {
    const double dx = r * kXgk[k];
    const double s = f(c - dx) + f(c + dx);
    kron += kWgk[k] * s;
    if (k % 2 == 1) gauss += kWg[k / 2] * s;
  }
  return {a, b, kron * r, std::abs((kron - gauss) * r)};
}

}  // namespace

IntegrationResult integrate_adaptive(const Integrand& f, double a, double b, double abs_tol, double rel_tol,
                                     const std::vector<double>& breaks, int max_intervals) {
  if (!(b > a)) throw std::invalid_argument("integration interval must satisfy a < b");
  std::vector<double> cuts{a};
  std::vector<double> inner;
  for (double x : breaks)
    if (x > a && x < b) inner.push_back(x);
  std::sort(inner.begin(), inner.end());
  inner.erase(std::unique(inner.begin(), inner.end()), inner.end());
  cuts.insert(cuts.end(), inner.begin(), inner.end());
  cuts.push_back(b);

  std::priority_queue<Piece> heap;
  IntegrationResult out;
  double value = 0.0, error = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    Piece p = kronrod(f, cuts[k], cuts[k + 1]);
    out.evaluations += 15;
    value += p.value;
    error += p.error;
    heap.push(p);
  }
  while (error > std::max(abs_tol, rel_tol * std::abs(value)) && static_cast<int>(heap.size()) < max_intervals) {
    Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      break;
    }
    Piece left = kronrod(f, worst.a, mid);
    Piece right = kronrod(f, mid, worst.b);
    out.evaluations += 30;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = value;
  out.error = error;
  out.converged = error <= std::max(abs_tol, rel_tol * std::abs(value));
  return out;
}

IntegrationResult integrate_real_line(const Integrand& f, double abs_tol, double rel_tol, int max_intervals) {
  auto g = [&f](double t) {
    const double s = 1.0 - t * t;
    if (s <= 0.0) return 0.0;
    const double x = t / s;
    const double jac = (1.0 + t * t) / (s * s);
    const double v = f(x) * jac;
    return std::isfinite(v) ? v : 0.0;
  };
  return integrate_adaptive(g, -1.0, 1.0, abs_tol, rel_tol, {0.0}, max_intervals);
}

}  // namespace adboot
