#include "ffa/gaussian.hpp"

namespace ffa {

void GaussianLaw::validate() const {
    if (cov.rows() != cov.cols()) throw DomainError("GaussianLaw: covariance not square");
    if (mean.size() != cov.rows()) throw DomainError("GaussianLaw: mean/cov dimension mismatch");
    if (static_cast<Eigen::Index>(coords.size()) != mean.size())
        throw DomainError("GaussianLaw: one coordinate tag required per coordinate");
    if (!is_symmetric(cov)) throw DomainError("GaussianLaw: covariance not symmetric");
}

GaussianLaw make_law(VectorXd mean, MatrixXd cov, std::vector<Coord> coords) {
    GaussianLaw law{std::move(mean), std::move(cov), std::move(coords)};
    law.validate();
    return law;
}

MatrixXd sample_gaussian(const GaussianLaw& law, int n, NormalStream& stream) {
    law.validate();
    if (n < 1) throw DomainError("sample_gaussian: n must be >= 1");
    const Eigen::Index d = law.dim();
    const MatrixXd factor = psd_factor(law.cov);
    MatrixXd draws(n, d);
    VectorXd z(d);
    for (int i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) z[j] = stream.normal();
        draws.row(i) = (law.mean + factor * z).transpose();
    }
    return draws;
}

}  // namespace ffa
