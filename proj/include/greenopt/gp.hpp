#pragma once

#include <Eigen/Dense>
#include <vector>

namespace greenopt {

// Squared-exponential kernel with per-dimension length scales. An empty
// length_scales vector means every dimension uses length_scale_default.
struct KernelConfig {
    double amplitude_sq = 1.0;
    std::vector<double> length_scales;
    double length_scale_default = 0.3;
    double jitter = 1e-6;

    double length_scale(std::size_t dim) const {
        return length_scales.empty() ? length_scale_default : length_scales.at(dim);
    }
};

double se_kernel(const KernelConfig&, const std::vector<double>& a, const std::vector<double>& b);

// Fitted model. Scores are standardized internally; predictions are reported
// in raw units. An empty model predicts the prior: mean 0, sigma = amplitude.
struct GpModel {
    KernelConfig kernel;
    std::size_t dims = 0;
    std::vector<std::vector<double>> x;  // training inputs
    Eigen::MatrixXd chol_lower;          // L with L L^T = K + jitter I
    Eigen::VectorXd alpha;               // (K + jitter I)^-1 y_standardized
    double y_mean = 0.0;
    double y_std = 1.0;
    double effective_jitter = 0.0;  // after any escalation

    std::size_t size() const { return x.size(); }
};

struct GpPrediction {
    double mean;
    double sigma;
};

// points: unit-cube rows (all components in [0,1], equal dims). Jitter
// escalates by x10 up to 1e-2 if the Cholesky factorization fails; beyond
// that the fit throws "kernel matrix not PD".
GpModel gp_fit(const std::vector<std::vector<double>>& points, const std::vector<double>& scores,
               const KernelConfig& kernel = {});

GpPrediction gp_predict(const GpModel&, const std::vector<double>& point);

double std_normal_cdf(double z);

}  // namespace greenopt
