#include "gpid/linalg.hpp"
#include "gpid/error.hpp"

#include <algorithm>
#include <cmath>

namespace gpid {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NotSymmetric: return "NotSymmetric";
        case ErrorCode::NotPositiveSemidefinite: return "NotPositiveSemidefinite";
        case ErrorCode::SingularMessageCovariance: return "SingularMessageCovariance";
        case ErrorCode::DeterministicChannel: return "DeterministicChannel";
        case ErrorCode::NumericalFailure: return "NumericalFailure";
        case ErrorCode::InsufficientSamples: return "InsufficientSamples";
        case ErrorCode::DegenerateInformation: return "DegenerateInformation";
        case ErrorCode::InfeasibleParameters: return "InfeasibleParameters";
        case ErrorCode::InvalidInput: return "InvalidInput";
    }
    return "Unknown";
}

namespace linalg {

Matrix symmetrize(const Matrix& a) {
    return 0.5 * (a + a.transpose());
}

EigenRange eigen_range(const Matrix& sym) {
    if (sym.size() == 0) {
        return {};
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return {ev.minCoeff(), ev.maxCoeff()};
}

Matrix sqrtm_psd(const Matrix& sym) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    const Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return symmetrize(es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose());
}

Matrix inv_sqrtm_spd(const Matrix& sym, double rel_threshold, bool& ok) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    const Vector& ev = es.eigenvalues();
    const double top = ev.maxCoeff();
    ok = top > 0.0 && ev.minCoeff() > rel_threshold * top;
    if (!ok) {
        return Matrix::Zero(sym.rows(), sym.cols());
    }
    const Vector inv_root = ev.cwiseSqrt().cwiseInverse();
    return symmetrize(es.eigenvectors() * inv_root.asDiagonal() * es.eigenvectors().transpose());
}

double logdet_spd(const Matrix& sym, bool& ok) {
    Eigen::LLT<Matrix> llt(sym);
    ok = llt.info() == Eigen::Success;
    if (!ok) {
        return 0.0;
    }
    const auto diag = llt.matrixLLT().diagonal();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
        if (!(diag(i) > 0.0)) {
            ok = false;
            return 0.0;
        }
        acc += std::log(diag(i));
    }
    return 2.0 * acc;
}

Matrix pinv(const Matrix& a, double rel_cutoff) {
    if (a.size() == 0) {
        return Matrix::Zero(a.cols(), a.rows());
    }
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    const double cutoff = rel_cutoff * (s.size() > 0 ? s(0) : 0.0);
    Vector inv = Vector::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > cutoff && s(i) > 0.0) {
            inv(i) = 1.0 / s(i);
        }
    }
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace linalg
}  // namespace gpid
