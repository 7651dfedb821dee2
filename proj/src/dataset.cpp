#include "ipp/dataset.hpp"

#include <set>

#include "ipp/errors.hpp"

namespace ipp {

EnvDataset::EnvDataset(std::vector<EnvSlice> environments) : envs_(std::move(environments)) {
    if (envs_.size() < 2) {
        throw InputError("a multi-environment dataset needs at least 2 environments, got " +
                         std::to_string(envs_.size()));
    }
    dim_ = static_cast<int>(envs_.front().X.cols());
    if (dim_ < 1) throw InputError("covariate dimension must be at least 1");

    std::set<std::string> labels;
    for (const auto& env : envs_) {
        if (!labels.insert(env.label).second) {
            throw InputError("duplicate environment label '" + env.label + "'");
        }
        if (env.y.size() < 1) {
            throw InputError("environment '" + env.label + "' has no observations");
        }
        if (env.X.rows() != env.y.size()) {
            throw InputError("environment '" + env.label + "': X has " +
                             std::to_string(env.X.rows()) + " rows but y has " +
                             std::to_string(env.y.size()) + " entries");
        }
        if (env.X.cols() != dim_) {
            throw InputError("environment '" + env.label + "' has dimension " +
                             std::to_string(env.X.cols()) + ", expected " + std::to_string(dim_));
        }
        if (!env.X.allFinite() || !env.y.allFinite()) {
            throw InputError("environment '" + env.label + "' contains non-finite values");
        }
    }
}

std::size_t EnvDataset::total_size() const noexcept {
    std::size_t n = 0;
    for (const auto& env : envs_) n += env.size();
    return n;
}

}  // namespace ipp
