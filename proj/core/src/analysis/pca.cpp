#include "smpred/analysis/pca.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace smpred::analysis {

PcaModel pca_fit(const nn::Matrix& codes) {
    const Eigen::Index n = codes.rows();
    const Eigen::Index d = codes.cols();
    if (n <= d) {
        throw std::invalid_argument("pca_fit: need more rows than dimensions (" +
                                    std::to_string(n) + " x " + std::to_string(d) + ")");
    }

    PcaModel model;
    model.mean = codes.colwise().mean();
    const nn::Matrix centered = codes.rowwise() - model.mean.transpose();
    const nn::Matrix cov =
        centered.transpose() * centered / static_cast<double>(n - 1);

    if (cov.trace() <= 0.0) {
        throw std::invalid_argument("pca_fit: degenerate input, all codes identical");
    }

    Eigen::SelfAdjointEigenSolver<nn::Matrix> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("pca_fit: eigendecomposition failed");
    }
    // Solver returns ascending eigenvalues; take the top two.
    model.components.resize(2, d);
    model.explained_variance.resize(2);
    for (int c = 0; c < 2; ++c) {
        const Eigen::Index src = d - 1 - c;
        model.explained_variance(c) = std::max(0.0, solver.eigenvalues()(src));
        nn::Vector v = solver.eigenvectors().col(src);
        // Deterministic sign: make the largest-magnitude entry positive.
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        if (v(imax) < 0.0) v = -v;
        model.components.row(c) = v.transpose();
    }
    return model;
}

nn::Matrix pca_project(const PcaModel& model, const nn::Matrix& codes) {
    if (codes.cols() != model.mean.size()) {
        throw std::invalid_argument("pca_project: dimension mismatch");
    }
    return (codes.rowwise() - model.mean.transpose()) * model.components.transpose();
}

}  // namespace smpred::analysis
