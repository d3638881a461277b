#include "ffa/spd.hpp"

#include <cmath>
#include <string>

namespace ffa {

namespace {

Eigen::SelfAdjointEigenSolver<MatrixXd> decompose(const MatrixXd& a, const char* op) {
    if (a.rows() != a.cols()) throw DomainError(std::string(op) + ": matrix not square");
    if (!is_symmetric(a)) throw DomainError(std::string(op) + ": matrix not symmetric");
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
    if (es.info() != Eigen::Success) throw DomainError(std::string(op) + ": eigendecomposition failed");
    return es;
}

}  // namespace

bool is_symmetric(const MatrixXd& a, double rtol) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    return (a - a.transpose()).cwiseAbs().maxCoeff() <= rtol * scale;
}

MatrixXd spd_sqrt(const MatrixXd& a) {
    auto es = decompose(a, "spd_sqrt");
    VectorXd ev = es.eigenvalues();
    const double floor = -1e-10 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] < floor)
            throw DomainError("spd_sqrt: negative eigenvalue " + std::to_string(ev[i]));
        if (ev[i] < 0.0) ev[i] = 0.0;
    }
    const MatrixXd& v = es.eigenvectors();
    return v * ev.cwiseSqrt().asDiagonal() * v.transpose();
}

VectorXd spd_solve(const MatrixXd& a, const VectorXd& b) {
    auto es = decompose(a, "spd_solve");
    const VectorXd& ev = es.eigenvalues();
    const double emax = ev.maxCoeff();
    const double emin = ev.minCoeff();
    const double cond = (emin > 0.0) ? emax / emin : std::numeric_limits<double>::infinity();
    if (!(cond <= 1e12))
        throw IllConditionedError("spd_solve: condition " + std::to_string(cond), cond);
    const MatrixXd& v = es.eigenvectors();
    return v * ev.cwiseInverse().asDiagonal() * (v.transpose() * b);
}

MatrixXd psd_factor(const MatrixXd& a) {
    auto es = decompose(a, "psd_factor");
    VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
}

double spd_condition(const MatrixXd& a) {
    auto es = decompose(a, "spd_condition");
    const double emin = es.eigenvalues().minCoeff();
    if (emin <= 0.0) return std::numeric_limits<double>::infinity();
    return es.eigenvalues().maxCoeff() / emin;
}

}  // namespace ffa
