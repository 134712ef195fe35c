#include "svarid/svar.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "svarid/error.hpp"

namespace svarid {

SvarParams SvarParams::zeros(const LagStructure& g) {
  SvarParams p;
  p.graph = g;
  const int d = g.dim();
  p.coeffs.assign(static_cast<std::size_t>(g.order() + 1),
                  Eigen::MatrixXd::Zero(d, d));
  p.noise_var = Eigen::VectorXd::Ones(d);
  return p;
}

double SvarParams::coef(int lag, SeriesId target, SeriesId source) const {
  if (lag < 0 || lag > order()) return 0.0;
  return coeffs[static_cast<std::size_t>(lag)](target.index, source.index);
}

void SvarParams::set(int lag, SeriesId target, SeriesId source, double value) {
  const auto& l = graph.lags(target, source);
  if (std::find(l.begin(), l.end(), lag) == l.end())
    throw SpecError("no edge " + graph.name(source) + " -> " +
                    graph.name(target) + " at lag " + std::to_string(lag));
  coeffs[static_cast<std::size_t>(lag)](target.index, source.index) = value;
}

void SvarParams::validate() const {
  const int d = dim();
  if (static_cast<int>(coeffs.size()) != order() + 1)
    throw SpecError("expected " + std::to_string(order() + 1) +
                    " coefficient matrices");
  if (noise_var.size() != d) throw SpecError("noise_var has wrong length");
  for (int i = 0; i < d; ++i)
    if (!(noise_var(i) >= 0.0) || !std::isfinite(noise_var(i)))
      throw SpecError("noise variances must be finite and nonnegative");
  for (int h = 0; h <= order(); ++h) {
    const auto& A = coeffs[static_cast<std::size_t>(h)];
    if (A.rows() != d || A.cols() != d)
      throw SpecError("coefficient matrix has wrong shape");
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        const auto& l = graph.lags(SeriesId{j}, SeriesId{k});
        bool declared = std::find(l.begin(), l.end(), h) != l.end();
        if (!std::isfinite(A(j, k)))
          throw SpecError("non-finite coefficient");
        if (!declared && A(j, k) != 0.0)
          throw SpecError("coefficient on undeclared edge " +
                          graph.name(SeriesId{k}) + " -> " +
                          graph.name(SeriesId{j}) + " lag " +
                          std::to_string(h));
      }
  }
}

CompanionForm companion(const SvarParams& params) {
  params.validate();
  const int d = params.dim();
  const int p = params.order();
  CompanionForm cf;
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(I - params.coeffs[0]);
  if (!lu.isInvertible()) throw NumericalError("I - A^(0) is singular");
  cf.B0 = lu.inverse();
  for (int h = 1; h <= p; ++h)
    cf.reduced.push_back(cf.B0 * params.coeffs[static_cast<std::size_t>(h)]);
  cf.big_B = Eigen::MatrixXd::Zero(d * p, d * p);
  for (int h = 1; h <= p; ++h)
    cf.big_B.block(0, (h - 1) * d, d, d) = cf.reduced[static_cast<std::size_t>(h - 1)];
  for (int h = 1; h < p; ++h)
    cf.big_B.block(h * d, (h - 1) * d, d, d) = I;
  return cf;
}

double spectral_margin(const SvarParams& params) {
  auto cf = companion(params);
  if (cf.big_B.size() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(cf.big_B, false);
  if (es.info() != Eigen::Success)
    throw NumericalError("eigenvalue computation failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

CovarianceTable::CovarianceTable(std::vector<Eigen::MatrixXd> gamma, bool exact,
                                 std::int64_t sample_size)
    : gamma_(std::move(gamma)), exact_(exact), sample_size_(sample_size) {
  if (gamma_.empty()) throw SpecError("covariance table needs Γ(0)");
}

Eigen::MatrixXd CovarianceTable::at(std::int64_t h) const {
  const std::int64_t a = h < 0 ? -h : h;
  if (a > h_max())
    throw SpecError("covariance lag " + std::to_string(a) +
                    " exceeds table range " + std::to_string(h_max()));
  const auto& G = gamma_[static_cast<std::size_t>(a)];
  return h < 0 ? Eigen::MatrixXd(G.transpose()) : G;
}

double CovarianceTable::cov(const Vertex& a, const Vertex& b) const {
  const std::int64_t h = a.time - b.time;
  const std::int64_t m = h < 0 ? -h : h;
  if (m > h_max())
    throw SpecError("covariance lag " + std::to_string(m) +
                    " exceeds table range " + std::to_string(h_max()));
  const auto& G = gamma_[static_cast<std::size_t>(m)];
  return h >= 0 ? G(a.series.index, b.series.index)
                : G(b.series.index, a.series.index);
}

CovarianceTable CovarianceTable::scaled(double c) const {
  auto g = gamma_;
  for (auto& m : g) m *= c;
  return CovarianceTable(std::move(g), exact_, sample_size_);
}

Eigen::MatrixXd simulate(const SvarParams& params, std::int64_t T,
                         std::int64_t burnin, std::uint64_t seed,
                         const NoiseSampler& noise) {
  if (T < 0 || burnin < 0) throw SpecError("T and burnin must be nonnegative");
  if (spectral_margin(params) >= 1.0)
    throw NumericalError("cannot simulate an unstable process");
  const int d = params.dim();
  const auto& g = params.graph;
  struct Term {
    int source;
    int lag;
    double a;
  };
  std::vector<std::vector<Term>> terms(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j)
    for (const auto& e : g.incoming(SeriesId{j})) {
      double a = params.coef(e.lag, SeriesId{j}, e.other);
      if (a != 0.0) terms[static_cast<std::size_t>(j)].push_back({e.other.index, e.lag, a});
    }
  Eigen::VectorXd sd = params.noise_var.cwiseSqrt();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::int64_t total = T + burnin;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(d, total);
  Eigen::VectorXd eps(d);
  for (std::int64_t t = 0; t < total; ++t) {
    for (int j = 0; j < d; ++j) eps(j) = sd(j) * (noise ? noise(rng) : gauss(rng));
    for (const auto& s : g.contemporaneous_order()) {
      double x = eps(s.index);
      for (const auto& term : terms[static_cast<std::size_t>(s.index)])
        if (t - term.lag >= 0) x += term.a * S(term.source, t - term.lag);
      S(s.index, t) = x;
    }
  }
  return S.rightCols(T);
}

namespace {

Eigen::MatrixXd kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::MatrixXd K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

Eigen::MatrixXd lyapunov(const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                         const LyapunovOptions& opt) {
  const Eigen::Index n = B.rows();
  if (n <= opt.direct_max_dim) {
    Eigen::MatrixXd K = Eigen::MatrixXd::Identity(n * n, n * n) - kron(B, B);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
    if (std::abs(lu.determinant()) == 0.0)
      throw NumericalError("I - B (x) B is singular");
    Eigen::VectorXd x = lu.solve(Eigen::Map<const Eigen::VectorXd>(Q.data(), n * n));
    return Eigen::Map<Eigen::MatrixXd>(x.data(), n, n);
  }
  Eigen::MatrixXd X = Q;
  Eigen::MatrixXd A = B;
  for (int k = 0; k < opt.max_doublings; ++k) {
    Eigen::MatrixXd step = A * X * A.transpose();
    X += step;
    A = A * A;
    if (step.norm() <= 1e-17 * X.norm() && A.norm() < 1e-12) return X;
  }
  throw NumericalError("Lyapunov doubling did not converge");
}

}  // namespace

CovarianceTable exact_autocov(const SvarParams& params, int h_max,
                              LyapunovOptions opt) {
  if (h_max < 0) throw SpecError("h_max must be nonnegative");
  auto cf = companion(params);
  const int d = params.dim();
  const int p = params.order();
  Eigen::MatrixXd G0 = cf.B0 * params.noise_var.asDiagonal() * cf.B0.transpose();
  std::vector<Eigen::MatrixXd> gamma;
  if (p == 0) {
    gamma.assign(static_cast<std::size_t>(h_max + 1), Eigen::MatrixXd::Zero(d, d));
    gamma[0] = G0;
    return CovarianceTable(std::move(gamma), true);
  }
  if (spectral_margin(params) >= 1.0)
    throw NumericalError("exact autocovariance needs a stable process");
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(d * p, d * p);
  Q.topLeftCorner(d, d) = G0;
  Eigen::MatrixXd big = lyapunov(cf.big_B, Q, opt);
  const int known = std::min(p - 1, h_max);
  for (int h = 0; h <= known; ++h) gamma.push_back(big.block(0, h * d, d, d));
  gamma[0] = 0.5 * (gamma[0] + gamma[0].transpose()).eval();
  auto G = [&](int h) -> Eigen::MatrixXd {
    return h >= 0 ? gamma[static_cast<std::size_t>(h)]
                  : Eigen::MatrixXd(gamma[static_cast<std::size_t>(-h)].transpose());
  };
  for (int h = known + 1; h <= h_max; ++h) {
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(d, d);
    for (int k = 1; k <= p; ++k) next += cf.reduced[static_cast<std::size_t>(k - 1)] * G(h - k);
    gamma.push_back(next);
  }
  return CovarianceTable(std::move(gamma), true);
}

}  // namespace svarid
