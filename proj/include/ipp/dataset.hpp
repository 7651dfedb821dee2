#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

namespace ipp {

/// Observations from one environment: rows of X are covariate vectors.
struct EnvSlice {
    std::string label;
    Eigen::MatrixXd X;
    Eigen::VectorXd y;

    std::size_t size() const noexcept { return static_cast<std::size_t>(y.size()); }
};

/// Labeled multi-environment observations. Validated on construction:
/// at least two environments, unique labels, n_e >= 1, a common covariate
/// dimension d >= 1 and finite entries.
class EnvDataset {
public:
    explicit EnvDataset(std::vector<EnvSlice> environments);

    int dim() const noexcept { return dim_; }
    std::size_t num_envs() const noexcept { return envs_.size(); }
    std::size_t total_size() const noexcept;
    const std::vector<EnvSlice>& environments() const noexcept { return envs_; }
    const EnvSlice& operator[](std::size_t e) const { return envs_.at(e); }

private:
    std::vector<EnvSlice> envs_;
    int dim_ = 0;
};

}  // namespace ipp
