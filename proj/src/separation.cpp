#include "pscm/separation.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "pscm/matching.hpp"
#include "pscm/rng.hpp"

namespace pscm {

Matrix normalize_columns(const Matrix& w) {
  Matrix out = w;
  for (int j = 0; j < out.cols(); ++j) {
    int idx = 0;
    double top = out.col(j).cwiseAbs().maxCoeff(&idx);
    if (top == 0.0) continue;
    out.col(j) /= out(idx, j);  // signed divisor: largest entry becomes +1
  }
  return out;
}

namespace {

struct Whitening {
  Matrix projector;   // m x p, maps centred data to whitened coordinates
  Matrix back;        // p x m, maps whitened coordinates back
};

Whitening whiten(const Matrix& centred, int m) {
  const int p = static_cast<int>(centred.rows());
  const double n = static_cast<double>(centred.cols());
  Matrix cov = centred * centred.transpose() / n;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success) throw data_error("covariance eigendecomposition failed");
  // Eigenvalues come back ascending; keep the top m.
  Vector lambda(m);
  Matrix basis(p, m);
  for (int c = 0; c < m; ++c) {
    lambda(c) = eig.eigenvalues()(p - 1 - c);
    basis.col(c) = eig.eigenvectors().col(p - 1 - c);
  }
  if (!(lambda(m - 1) > 1e-12 * lambda(0)))
    throw data_error("data covariance is rank deficient; cannot whiten to the requested dimension");
  Whitening out;
  out.projector = lambda.cwiseSqrt().cwiseInverse().asDiagonal() * basis.transpose();
  out.back = basis * lambda.cwiseSqrt().asDiagonal();
  return out;
}

double excess_kurtosis(const Eigen::RowVectorXd& y) {
  const double n = static_cast<double>(y.size());
  double mean = y.mean();
  double m2 = 0.0, m4 = 0.0;
  for (int i = 0; i < y.size(); ++i) {
    double d = y(i) - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m4 /= n;
  if (m2 <= 0.0) return 0.0;
  return m4 / (m2 * m2) - 3.0;
}

}  // namespace

IcaResult fastica(const Dataset& data, const IcaConfig& cfg) {
  const Matrix& X = data.X;
  const int p = static_cast<int>(X.rows());
  const int n = static_cast<int>(X.cols());
  if (p < 1 || n < 2) throw data_error("separation needs at least one row and two samples");
  if (!X.allFinite()) throw data_error("data matrix has non-finite entries");
  const int m = cfg.m > 0 ? cfg.m : p;
  if (m > p)
    throw config_error("cannot extract more components than observed variables (m > p is unsupported)");
  if (cfg.contrast != "logcosh" && cfg.contrast != "cube")
    throw config_error("unknown contrast '" + cfg.contrast + "'");
  if (cfg.max_iter < 1 || !(cfg.conv_tol > 0)) throw config_error("bad iteration controls");

  Matrix centred = X;
  for (int i = 0; i < p; ++i) centred.row(i).array() -= centred.row(i).mean();
  Whitening wh = whiten(centred, m);
  Matrix Z = wh.projector * centred;  // m x n, identity covariance

  Rng rng(cfg.seed);
  const bool logcosh = cfg.contrast == "logcosh";
  Matrix R(m, m);
  IcaResult result;

  for (int c = 0; c < m; ++c) {
    Vector w(m);
    auto randomize = [&]() {
      for (int i = 0; i < m; ++i) w(i) = rng.gaussian();
      for (int prev = 0; prev < c; ++prev) w -= w.dot(R.row(prev)) * R.row(prev).transpose();
      double norm = w.norm();
      if (norm > 1e-12) w /= norm;
      return norm > 1e-12;
    };
    while (!randomize()) {
    }

    bool converged = false;
    for (int iter = 0; iter < cfg.max_iter; ++iter) {
      Eigen::RowVectorXd u = w.transpose() * Z;
      Vector w_new(m);
      double mean_gprime = 0.0;
      if (logcosh) {
        Eigen::RowVectorXd g = u.array().tanh();
        w_new = Z * g.transpose() / n;
        mean_gprime = (1.0 - g.array().square()).mean();
      } else {
        Eigen::RowVectorXd g = u.array().cube();
        w_new = Z * g.transpose() / n;
        mean_gprime = 3.0 * u.array().square().mean();
      }
      w_new -= mean_gprime * w;
      for (int prev = 0; prev < c; ++prev)
        w_new -= w_new.dot(R.row(prev)) * R.row(prev).transpose();
      double norm = w_new.norm();
      if (norm <= 1e-12) {
        while (!randomize()) {
        }
        continue;
      }
      w_new /= norm;
      double agreement = std::abs(w_new.dot(w));
      w = w_new;
      if (1.0 - agreement < cfg.conv_tol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      result.converged = false;
      result.warnings.push_back("component " + std::to_string(c + 1) + " did not converge");
    }
    R.row(c) = w.transpose();
  }

  for (int c = 0; c < m; ++c) {
    Eigen::RowVectorXd y = R.row(c) * Z;
    if (std::abs(excess_kurtosis(y)) < 0.1) {
      result.warnings.push_back("component " + std::to_string(c + 1) +
                                " looks Gaussian; its column is unreliable");
      break;
    }
  }

  result.mixing.W = wh.back * R.transpose();
  result.mixing.eps = 1e-9;
  return result;
}

Matrix aggregate_bootstrap(const std::vector<Matrix>& estimates, double confidence,
                           std::vector<std::vector<bool>>* kept_mask) {
  if (estimates.size() < 2) throw config_error("aggregation needs at least two replicate estimates");
  if (!(confidence > 0.0 && confidence < 1.0)) throw config_error("confidence must lie in (0,1)");
  const int p = static_cast<int>(estimates.front().rows());
  const int m = static_cast<int>(estimates.front().cols());
  for (const auto& e : estimates)
    if (e.rows() != p || e.cols() != m) throw data_error("replicate estimates differ in shape");

  const int count = static_cast<int>(estimates.size());
  std::vector<Matrix> aligned;
  aligned.reserve(count);
  Matrix reference = normalize_columns(estimates.front());
  aligned.push_back(reference);
  for (int b = 1; b < count; ++b) {
    Matrix cur = normalize_columns(estimates[b]);
    Matrix cost(m, m);
    for (int a = 0; a < m; ++a)
      for (int r = 0; r < m; ++r) cost(a, r) = (cur.col(a) - reference.col(r)).squaredNorm();
    auto perm = hungarian(cost);
    Matrix arranged(p, m);
    for (int a = 0; a < m; ++a) arranged.col(perm[a]) = cur.col(a);
    aligned.push_back(std::move(arranged));
  }

  Matrix mean = Matrix::Zero(p, m);
  for (const auto& e : aligned) mean += e;
  mean /= count;
  Matrix var = Matrix::Zero(p, m);
  for (const auto& e : aligned) var += (e - mean).cwiseProduct(e - mean);
  var /= count - 1;

  boost::math::students_t t_dist(count - 1);
  const double crit = boost::math::quantile(t_dist, 0.5 + confidence / 2.0);

  if (kept_mask) kept_mask->assign(p, std::vector<bool>(m, true));
  Matrix out = mean;
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < m; ++j) {
      // The replicate spread approximates the estimate's own sampling error,
      // so the interval uses the plain standard deviation: scaling it by
      // 1/sqrt(count) would shrink the interval with the replicate count and
      // keep entries whose common resampling bias dwarfs their spread.
      double sd = std::sqrt(var(i, j));
      bool keep;
      if (sd == 0.0)
        keep = mean(i, j) != 0.0;
      else
        keep = std::abs(mean(i, j)) / sd > crit;
      if (!keep) {
        out(i, j) = 0.0;
        if (kept_mask) (*kept_mask)[i][j] = false;
      }
    }
  return out;
}

BootstrapResult bootstrap_prune(const Dataset& data, const IcaConfig& ica_cfg,
                                const BootstrapConfig& boot_cfg) {
  if (boot_cfg.n_boot < 2) throw config_error("need at least two bootstrap replicates");
  if (!(boot_cfg.confidence > 0.0 && boot_cfg.confidence < 1.0))
    throw config_error("confidence must lie in (0,1)");
  const int n = static_cast<int>(data.X.cols());
  const int p = static_cast<int>(data.X.rows());
  if (n < 2) throw data_error("bootstrap needs at least two samples");

  BootstrapResult result;
  std::vector<Matrix> estimates;
  for (int rep = 0; rep < boot_cfg.n_boot; ++rep) {
    Dataset resampled;
    resampled.source_dist = data.source_dist;
    bool usable = false;
    for (int retry = 0; retry < 10 && !usable; ++retry) {
      Rng rng(derive_seed(ica_cfg.seed, rep, 1000 + retry));
      resampled.X.resize(p, n);
      for (int t = 0; t < n; ++t) resampled.X.col(t) = data.X.col(rng.uniform_int(n));
      usable = true;
      for (int i = 0; i < p && usable; ++i) {
        double lo = resampled.X.row(i).minCoeff(), hi = resampled.X.row(i).maxCoeff();
        if (hi - lo == 0.0) usable = false;  // degenerate redraw
      }
    }
    if (!usable) throw data_error("bootstrap resampling kept producing constant rows");

    IcaConfig rep_cfg = ica_cfg;
    rep_cfg.seed = derive_seed(ica_cfg.seed, rep, 2);
    try {
      IcaResult ica = fastica(resampled, rep_cfg);
      if (!ica.converged) continue;  // non-converged replicates are dropped
      estimates.push_back(ica.mixing.W);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::data) throw;
      // A degenerate resample counts like a non-converged replicate.
    }
  }

  result.replicates_used = static_cast<int>(estimates.size());
  const int needed = std::max(2, boot_cfg.n_boot / 2);
  if (result.replicates_used < needed)
    throw data_error("only " + std::to_string(result.replicates_used) + " of " +
                     std::to_string(boot_cfg.n_boot) +
                     " bootstrap replicates converged; need at least " + std::to_string(needed));
  if (result.replicates_used < boot_cfg.n_boot)
    result.warnings.push_back(std::to_string(boot_cfg.n_boot - result.replicates_used) +
                              " bootstrap replicates dropped for non-convergence");

  result.mixing.W = aggregate_bootstrap(estimates, boot_cfg.confidence, &result.kept_mask);
  result.mixing.eps = 1e-9;
  return result;
}

MixingMatrix oracle_mixing(const Pscm& model, std::uint64_t seed, double eps) {
  return scramble(mixing_matrix(model, eps), seed);
}

}  // namespace pscm
