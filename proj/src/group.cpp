#include "hausdorff/group.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <map>
#include <mutex>
#include <utility>

namespace hausdorff {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

// Index pairs (i, j), i < j, of the so(n) basis in lexicographic order.
std::pair<int, int> basis_pair(int n, int index) {
  for (int i = 0; i < n; ++i) {
    const int row = n - 1 - i;
    if (index < row) return {i, i + 1 + index};
    index -= row;
  }
  throw DomainError("Lie algebra basis index out of range");
}

// Density of the rotation angles of a Haar-random element of SO(n) on the
// folded torus [0, pi]^m, up to a constant.
double weyl_density(int n, const std::vector<double>& theta) {
  double w = 1.0;
  const std::size_t m = theta.size();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double diff = std::cos(theta[i]) - std::cos(theta[j]);
      w *= diff * diff;
    }
    if (n % 2 == 1) {
      const double s = std::sin(0.5 * theta[i]);
      w *= s * s;
    }
  }
  return w;
}

double torus_integral(int n, std::size_t level, double remaining_sq, std::vector<double>& theta) {
  if (level == theta.size()) return weyl_density(n, theta);
  const double upper = std::min(kPi, std::sqrt(std::max(0.0, remaining_sq)));
  if (upper <= 0.0) return 0.0;
  auto integrand = [&](double t) {
    theta[level] = t;
    return torus_integral(n, level + 1, remaining_sq - t * t, theta);
  };
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  // The inner upper limit min(pi, sqrt(R^2 - t^2)) has a kink where it leaves pi.
  const double kink = remaining_sq > kPi * kPi ? std::sqrt(remaining_sq - kPi * kPi) : 0.0;
  if (level + 1 < theta.size() && kink > 0.0 && kink < upper) {
    return Rule::integrate(integrand, 0.0, kink, 12, 1e-12) +
           Rule::integrate(integrand, kink, upper, 12, 1e-12);
  }
  return Rule::integrate(integrand, 0.0, upper, 12, 1e-12);
}

double torus_total(int n) {
  static std::mutex mutex;
  static std::map<int, double> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> theta(static_cast<std::size_t>(n / 2));
  const double total = torus_integral(n, 0, kInf, theta);
  cache.emplace(n, total);
  return total;
}

double so_ball_volume(int n, double r) {
  if (r < 0.0) return 0.0;
  if (n <= 1) return 1.0;
  // |log x|_F = sqrt(2 sum theta_i^2) for rotation angles theta_i.
  const double angle_radius = r / kSqrt2;
  if (n == 2) return std::min(angle_radius, kPi) / kPi;
  if (n == 3) {
    const double t = std::min(angle_radius, kPi);
    return (t - std::sin(t)) / kPi;
  }
  const int m = n / 2;
  if (angle_radius * angle_radius >= m * kPi * kPi) return 1.0;
  std::vector<double> theta(static_cast<std::size_t>(m));
  const double part = torus_integral(n, 0, angle_radius * angle_radius, theta);
  return std::clamp(part / torus_total(n), 0.0, 1.0);
}

// exp of a skew-symmetric matrix together with its rotation angles |theta_i|.
std::pair<Matrix, std::vector<double>> exp_with_angles(const Matrix& algebra_element, int n) {
  const Matrix skew = 0.5 * (algebra_element - algebra_element.transpose());
  if (n == 1) return {Matrix::Identity(1, 1), {}};
  if (n == 2) {
    const double t = skew(1, 0);
    Matrix r(2, 2);
    r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    return {r, {std::abs(t)}};
  }
  if (n == 3) {
    // Rodrigues: exp(X) = I + (sin t / t) X + ((1 - cos t) / t^2) X^2, t = |X|_F / sqrt(2).
    const double t = skew.norm() / kSqrt2;
    const double a = t < 1e-4 ? 1.0 - t * t / 6.0 : std::sin(t) / t;
    const double b = t < 1e-4 ? 0.5 - t * t / 24.0 : (1.0 - std::cos(t)) / (t * t);
    Matrix r = Matrix::Identity(3, 3) + a * skew + b * skew * skew;
    return {r, {t}};
  }
  if (n == 4) {
    // X = X+ + X- (self-dual and anti-self-dual parts) commute and square to -t^2 I.
    Matrix dual = Matrix::Zero(4, 4);
    dual(0, 1) = skew(2, 3);
    dual(0, 2) = -skew(1, 3);
    dual(0, 3) = skew(1, 2);
    dual(1, 2) = skew(0, 3);
    dual(1, 3) = -skew(0, 2);
    dual(2, 3) = skew(0, 1);
    dual -= Matrix(dual.transpose());
    Matrix r = Matrix::Identity(4, 4);
    double t[2];
    for (int k = 0; k < 2; ++k) {
      const Matrix part = 0.5 * (skew + (k == 0 ? 1.0 : -1.0) * dual);
      t[k] = part.row(0).norm();
      const double s = t[k] < 1e-8 ? 1.0 - t[k] * t[k] / 6.0 : std::sin(t[k]) / t[k];
      r = r * (std::cos(t[k]) * Matrix::Identity(4, 4) + s * part);
    }
    return {r, {t[0] + t[1], std::abs(t[0] - t[1])}};
  }
  Eigen::RealSchur<Matrix> schur(skew);
  if (schur.info() != Eigen::Success) throw NumericalError("matrix exponential: Schur iteration did not converge");
  const Matrix& t = schur.matrixT();
  Matrix block_exp = Matrix::Identity(n, n);
  std::vector<double> angles;
  for (int i = 0; i + 1 < n;) {
    if (t(i + 1, i) != 0.0) {
      const double angle = 0.5 * (t(i + 1, i) - t(i, i + 1));
      block_exp(i, i) = std::cos(angle);
      block_exp(i + 1, i + 1) = std::cos(angle);
      block_exp(i + 1, i) = std::sin(angle);
      block_exp(i, i + 1) = -std::sin(angle);
      angles.push_back(std::abs(angle));
      i += 2;
    } else {
      ++i;
    }
  }
  angles.resize(static_cast<std::size_t>(n / 2), 0.0);
  return {schur.matrixU() * block_exp * schur.matrixU().transpose(), angles};
}

double sinc_squared(double t) {
  if (std::abs(t) < 1e-6) return 1.0 - t * t / 3.0;
  const double v = std::sin(t) / t;
  return v * v;
}

double jacobian_from_angles(int n, const std::vector<double>& theta) {
  double j = 1.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    for (std::size_t k = i + 1; k < theta.size(); ++k) {
      j *= sinc_squared(0.5 * (theta[i] - theta[k])) * sinc_squared(0.5 * (theta[i] + theta[k]));
    }
    if (n % 2 == 1) j *= sinc_squared(0.5 * theta[i]);
  }
  return j;
}

// Approximate rotation angles of x in SO(4) from tr x and tr x^2.
std::pair<double, double> so4_angles_from_traces(const Matrix& x) {
  const double s = 0.5 * x.trace();
  const double t = (x.array() * x.transpose().array()).sum();
  const double sum_sq = 0.25 * (t + 4.0);
  const double p = 0.5 * (s * s - sum_sq);
  const double root = std::sqrt(std::max(0.0, s * s - 4.0 * p));
  const double a = std::clamp(0.5 * (s + root), -1.0, 1.0);
  const double b = std::clamp(0.5 * (s - root), -1.0, 1.0);
  return {std::acos(a), std::acos(b)};
}

}  // namespace

std::string to_string(GroupKind kind) {
  return kind == GroupKind::euclidean ? "euclidean" : "special_orthogonal";
}

GroupKind group_kind_from_string(const std::string& name) {
  if (name == "euclidean") return GroupKind::euclidean;
  if (name == "special_orthogonal") return GroupKind::special_orthogonal;
  throw DomainError("unknown group kind: " + name);
}

Group Group::euclidean(int n) {
  if (n < 1) throw DomainError("dimension must be positive");
  return Group(GroupKind::euclidean, n);
}

Group Group::special_orthogonal(int n) {
  if (n < 1) throw DomainError("dimension must be positive");
  return Group(GroupKind::special_orthogonal, n);
}

int Group::lie_algebra_dim() const { return compact() ? n_ * (n_ - 1) / 2 : n_; }

double Group::diameter() const {
  if (!compact()) return kInf;
  return kPi * kSqrt2 * std::sqrt(static_cast<double>(n_ / 2));
}

std::string Group::name() const {
  return (compact() ? "SO(" : "R^(") + std::to_string(n_) + ")";
}

Point Group::identity() const {
  return compact() ? Matrix(Matrix::Identity(n_, n_)) : Matrix(Matrix::Zero(n_, 1));
}

Point Group::multiply(const Point& x, const Point& y) const {
  return compact() ? Matrix(x * y) : Matrix(x + y);
}

Point Group::inverse(const Point& x) const {
  return compact() ? Matrix(x.transpose()) : Matrix(-x);
}

bool Group::contains(const Point& x, double tol) const {
  if (!compact()) return x.rows() == n_ && x.cols() == 1 && x.allFinite();
  if (x.rows() != n_ || x.cols() != n_ || !x.allFinite()) return false;
  const double drift = (x.transpose() * x - Matrix::Identity(n_, n_)).cwiseAbs().maxCoeff();
  return drift <= tol && std::abs(x.determinant() - 1.0) <= tol;
}

Point Group::reorthogonalize(const Point& x) const {
  if (!compact()) return x;
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix polar = svd.matrixU() * svd.matrixV().transpose();
  if (polar.determinant() < 0.0) {
    Matrix u = svd.matrixU();
    u.col(n_ - 1) *= -1.0;
    polar = u * svd.matrixV().transpose();
  }
  return polar;
}

Matrix Group::log(const Point& x) const {
  if (!compact()) return x;
  if (n_ == 1) return Matrix::Zero(1, 1);
  Eigen::RealSchur<Matrix> schur(x);
  if (schur.info() != Eigen::Success) throw NumericalError("matrix logarithm: Schur iteration did not converge");
  const Matrix& t = schur.matrixT();
  const Matrix& u = schur.matrixU();
  Matrix block_log = Matrix::Zero(n_, n_);
  std::vector<int> minus_one;
  for (int i = 0; i < n_;) {
    if (i + 1 < n_ && std::abs(t(i + 1, i)) > 1e-300) {
      const double angle = std::atan2(0.5 * (t(i + 1, i) - t(i, i + 1)), 0.5 * (t(i, i) + t(i + 1, i + 1)));
      block_log(i + 1, i) = angle;
      block_log(i, i + 1) = -angle;
      i += 2;
      continue;
    }
    if (t(i, i) < 0.0) minus_one.push_back(i);
    ++i;
  }
  if (minus_one.size() % 2 != 0) throw NumericalError("matrix logarithm: argument is not in SO(n)");
  // Eigenvalue -1 pairs become rotations by +pi in the Schur basis.
  for (std::size_t k = 0; k < minus_one.size(); k += 2) {
    const int a = minus_one[k];
    const int b = minus_one[k + 1];
    block_log(b, a) = kPi;
    block_log(a, b) = -kPi;
  }
  Matrix result = u * block_log * u.transpose();
  return 0.5 * (result - result.transpose());
}

Point Group::exp(const Matrix& algebra_element) const {
  if (!compact()) return algebra_element;
  return exp_with_angles(algebra_element, n_).first;
}

double Group::distance(const Point& x, const Point& y) const {
  if (!compact()) return (x - y).norm();
  return norm(Matrix(x.transpose() * y));
}

double Group::norm(const Point& x) const {
  if (!compact()) return x.norm();
  double sum = 0.0;
  for (double t : rotation_angles(x)) sum += t * t;
  return kSqrt2 * std::sqrt(sum);
}

std::vector<double> Group::rotation_angles(const Point& x) const {
  if (!compact()) throw DomainError("rotation angles are defined on SO(n) only");
  if (n_ == 1) return {};
  if (n_ == 2) return {std::abs(std::atan2(x(1, 0), x(0, 0)))};
  if (n_ == 3) {
    const double c = 0.5 * (x.trace() - 1.0);
    const double s = 0.5 * std::sqrt((x(2, 1) - x(1, 2)) * (x(2, 1) - x(1, 2)) +
                                     (x(0, 2) - x(2, 0)) * (x(0, 2) - x(2, 0)) +
                                     (x(1, 0) - x(0, 1)) * (x(1, 0) - x(0, 1)));
    return {std::atan2(s, c)};
  }
  Eigen::RealSchur<Matrix> schur(x, false);
  if (schur.info() != Eigen::Success) throw NumericalError("rotation angles: Schur iteration did not converge");
  const Matrix& t = schur.matrixT();
  std::vector<double> angles;
  int minus_one = 0;
  for (int i = 0; i < n_;) {
    if (i + 1 < n_ && std::abs(t(i + 1, i)) > 1e-300) {
      angles.push_back(std::abs(std::atan2(0.5 * (t(i + 1, i) - t(i, i + 1)), 0.5 * (t(i, i) + t(i + 1, i + 1)))));
      i += 2;
      continue;
    }
    if (t(i, i) < 0.0) ++minus_one;
    ++i;
  }
  for (int k = 0; k < minus_one / 2; ++k) angles.push_back(kPi);
  angles.resize(static_cast<std::size_t>(n_ / 2), 0.0);
  return angles;
}

bool Group::within(const Point& x, const Point& y, double r) const {
  if (!compact()) return (x - y).norm() <= r;
  if (n_ == 4) {
    const auto [a, b] = so4_angles_from_traces(x.transpose() * y);
    const double approx = kSqrt2 * std::hypot(a, b);
    // The trace route loses up to ~1e-4 near repeated or small angles.
    if (std::abs(approx - r) > 2e-3) return approx <= r;
  }
  return distance(x, y) <= r;
}

double Group::exp_jacobian(const Matrix& algebra_element) const {
  if (!compact()) return 1.0;
  return jacobian_from_angles(n_, exp_with_angles(algebra_element, n_).second);
}

std::pair<Point, Point> Group::ball_sample_pair(const Point& center, double r, std::uint64_t seed,
                                                std::uint64_t index) const {
  if (!(r > 0.0)) throw DomainError("ball radius must be positive");
  CounterRng rng(seed, index);
  const int dim = lie_algebra_dim();
  auto lie_ball_point = [&]() {
    Vector c(dim);
    do {
      for (int k = 0; k < dim; ++k) c(k) = rng.normal();
    } while (c.squaredNorm() == 0.0);
    return Vector(c * (r * std::pow(rng.uniform(), 1.0 / dim) / c.norm()));
  };
  if (!compact()) {
    const Vector z = lie_ball_point();
    return {center + z, center - z};
  }
  constexpr int kMaxAttempts = 100000;
  if (r < std::min(diameter(), kPi * kSqrt2) * 0.999) {
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      const Matrix x = algebra_element(lie_ball_point());
      auto [e, angles] = exp_with_angles(x, n_);
      if (rng.uniform() < jacobian_from_angles(n_, angles)) {
        return {center * e, center * e.transpose()};
      }
    }
  } else {
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      const Matrix y = random_rotation(n_, rng);
      if (within(center, y, r)) return {y, center * y.transpose() * center};
    }
  }
  throw NumericalError("ball sampling: rejection sampler did not accept");
}

Matrix Group::algebra_basis(int index) const {
  if (index < 0 || index >= lie_algebra_dim()) throw DomainError("Lie algebra basis index out of range");
  if (!compact()) {
    Matrix e = Matrix::Zero(n_, 1);
    e(index, 0) = 1.0;
    return e;
  }
  const auto [i, j] = basis_pair(n_, index);
  Matrix e = Matrix::Zero(n_, n_);
  e(i, j) = 1.0 / kSqrt2;
  e(j, i) = -1.0 / kSqrt2;
  return e;
}

Vector Group::algebra_coordinates(const Matrix& algebra_element) const {
  if (!compact()) return algebra_element.col(0);
  Vector c(lie_algebra_dim());
  for (int k = 0; k < c.size(); ++k) {
    const auto [i, j] = basis_pair(n_, k);
    c(k) = (algebra_element(i, j) - algebra_element(j, i)) / kSqrt2;
  }
  return c;
}

Matrix Group::algebra_element(const Vector& coordinates) const {
  if (coordinates.size() != lie_algebra_dim()) throw DomainError("coordinate vector has wrong size");
  if (!compact()) return coordinates;
  Matrix x = Matrix::Zero(n_, n_);
  for (int k = 0; k < coordinates.size(); ++k) x += coordinates(k) * algebra_basis(k);
  return x;
}

Matrix random_rotation(int n, CounterRng& rng) {
  if (n == 1) return Matrix::Identity(1, 1);
  Matrix gaussian(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) gaussian(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(gaussian);
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  if (q.determinant() < 0.0) q.col(0) *= -1.0;
  return q;
}

Point Group::haar_sample_one(std::uint64_t seed, std::uint64_t index) const {
  if (!compact()) throw DomainError("non-normalizable Haar measure on " + name());
  CounterRng rng(seed, index);
  return random_rotation(n_, rng);
}

std::vector<Point> Group::haar_sample(std::size_t count, std::uint64_t seed) const {
  if (!compact()) throw DomainError("non-normalizable Haar measure on " + name());
  if (count == 0) throw DomainError("sample count must be at least 1");
  std::vector<Point> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = haar_sample_one(seed, i);
  return out;
}

double unit_ball_volume(int n) {
  return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double Group::ball_volume_exact(double r) const {
  if (r < 0.0) throw DomainError("radius must be nonnegative");
  if (!compact()) return unit_ball_volume(n_) * std::pow(r, n_);
  return so_ball_volume(n_, r);
}

}  // namespace hausdorff
