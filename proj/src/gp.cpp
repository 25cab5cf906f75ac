#include "greenopt/gp.hpp"

#include <cmath>
#include <stdexcept>

namespace greenopt {

namespace {

void check_unit_point(const std::vector<double>& x) {
    for (double v : x)
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("gp point component outside [0, 1]");
}

}  // namespace

double se_kernel(const KernelConfig& k, const std::vector<double>& a,
                 const std::vector<double>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("kernel arguments have different dims");
    double q = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double r = (a[i] - b[i]) / k.length_scale(i);
        q += r * r;
    }
    return k.amplitude_sq * std::exp(-0.5 * q);
}

GpModel gp_fit(const std::vector<std::vector<double>>& points, const std::vector<double>& scores,
               const KernelConfig& kernel) {
    if (points.size() != scores.size())
        throw std::invalid_argument("points/scores size mismatch");
    if (kernel.amplitude_sq <= 0.0)
        throw std::invalid_argument("kernel amplitude must be positive");

    GpModel m;
    m.kernel = kernel;
    const std::size_t n = points.size();
    if (n == 0)
        return m;

    m.dims = points[0].size();
    if (m.dims == 0)
        throw std::invalid_argument("gp points must have at least one dim");
    if (!kernel.length_scales.empty() && kernel.length_scales.size() != m.dims)
        throw std::invalid_argument("kernel length scales do not match point dims");
    for (const auto& p : points) {
        if (p.size() != m.dims)
            throw std::invalid_argument("gp points have inconsistent dims");
        check_unit_point(p);
    }
    for (double s : scores)
        if (!std::isfinite(s))
            throw std::invalid_argument("gp scores must be finite");
    m.x = points;

    double mean = 0.0;
    for (double s : scores)
        mean += s;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double s : scores)
        var += (s - mean) * (s - mean);
    var /= static_cast<double>(n);
    m.y_mean = mean;
    m.y_std = var > 0.0 ? std::sqrt(var) : 1.0;

    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        y(static_cast<Eigen::Index>(i)) = (scores[i] - m.y_mean) / m.y_std;

    Eigen::MatrixXd k(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double v = se_kernel(kernel, m.x[i], m.x[j]);
            k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            k(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }

    double jitter = kernel.jitter;
    constexpr double kMaxJitter = 1e-2;
    while (true) {
        Eigen::MatrixXd kj = k;
        kj.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(kj);
        if (llt.info() == Eigen::Success) {
            m.chol_lower = llt.matrixL();
            m.alpha = llt.solve(y);
            // Mixed-precision iterative refinement: near-duplicate points make
            // kj ill-conditioned enough that a plain double solve can lose
            // ~1e-8 of posterior mean.
            for (int step = 0; step < 2; ++step) {
                Eigen::VectorXd residual(y.size());
                for (Eigen::Index i = 0; i < y.size(); ++i) {
                    long double acc = y(i);
                    for (Eigen::Index j = 0; j < y.size(); ++j)
                        acc -= static_cast<long double>(kj(i, j)) * m.alpha(j);
                    residual(i) = static_cast<double>(acc);
                }
                m.alpha += llt.solve(residual);
            }
            m.effective_jitter = jitter;
            return m;
        }
        if (jitter >= kMaxJitter)
            throw std::runtime_error("kernel matrix not PD");
        jitter = std::min(jitter * 10.0, kMaxJitter);
    }
}

GpPrediction gp_predict(const GpModel& m, const std::vector<double>& point) {
    check_unit_point(point);
    const double amplitude = std::sqrt(m.kernel.amplitude_sq);
    if (m.size() == 0)
        return {m.y_mean, amplitude * m.y_std};
    if (point.size() != m.dims)
        throw std::invalid_argument("gp query point has wrong dims");

    const std::size_t n = m.size();
    Eigen::VectorXd kstar(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        kstar(static_cast<Eigen::Index>(i)) = se_kernel(m.kernel, m.x[i], point);

    // Near-duplicate training points give alpha large cancelling components;
    // accumulating in extended precision keeps the mean stable.
    long double mu_acc = 0.0L;
    for (std::size_t i = 0; i < n; ++i)
        mu_acc += static_cast<long double>(kstar(static_cast<Eigen::Index>(i))) *
                  m.alpha(static_cast<Eigen::Index>(i));
    const double mu_std = static_cast<double>(mu_acc);
    const Eigen::VectorXd v = m.chol_lower.triangularView<Eigen::Lower>().solve(kstar);
    double var = m.kernel.amplitude_sq - v.squaredNorm();
    if (var < 0.0)
        var = 0.0;
    return {m.y_mean + m.y_std * mu_std, m.y_std * std::sqrt(var)};
}

double std_normal_cdf(double z) {
    return 0.5 * std::erfc(-z * 0.7071067811865475244);
}

}  // namespace greenopt
