#include "gpid/model.hpp"
#include "gpid/error.hpp"

#include <cmath>
#include <sstream>

namespace gpid {

namespace {

[[nodiscard]] Matrix block(const Matrix& s, int row, int rows, int col, int cols) {
    return s.block(row, col, rows, cols);
}

[[nodiscard]] double half_logdet_bits(const Matrix& spd, const char* what) {
    bool ok = false;
    const double ld = linalg::logdet_spd(linalg::symmetrize(spd), ok);
    if (!ok) {
        throw Error(ErrorCode::NumericalFailure,
                    std::string("log-det argument is not positive definite: ") + what);
    }
    return 0.5 * ld / kLn2;
}

}  // namespace

Matrix GaussianSystem::sigma_m() const {
    return block(sigma_, 0, dims_.d_m, 0, dims_.d_m);
}

Matrix GaussianSystem::sigma_x() const {
    return block(sigma_, dims_.d_m, dims_.d_x, dims_.d_m, dims_.d_x);
}

Matrix GaussianSystem::sigma_y() const {
    const int o = dims_.d_m + dims_.d_x;
    return block(sigma_, o, dims_.d_y, o, dims_.d_y);
}

Matrix GaussianSystem::sigma_x_m() const {
    return block(sigma_, dims_.d_m, dims_.d_x, 0, dims_.d_m);
}

Matrix GaussianSystem::sigma_y_m() const {
    return block(sigma_, dims_.d_m + dims_.d_x, dims_.d_y, 0, dims_.d_m);
}

Matrix GaussianSystem::sigma_x_y() const {
    return block(sigma_, dims_.d_m, dims_.d_x, dims_.d_m + dims_.d_x, dims_.d_y);
}

Matrix GaussianSystem::sigma_xy() const {
    const int n = dims_.d_x + dims_.d_y;
    return block(sigma_, dims_.d_m, n, dims_.d_m, n);
}

Matrix GaussianSystem::sigma_xy_m() const {
    return block(sigma_, dims_.d_m, dims_.d_x + dims_.d_y, 0, dims_.d_m);
}

GaussianSystem validate_covariance(const Matrix& raw, const Dims& dims) {
    if (!dims.valid()) {
        throw Error(ErrorCode::DimensionMismatch, "all block dimensions must be positive");
    }
    if (raw.rows() != dims.total() || raw.cols() != dims.total()) {
        std::ostringstream msg;
        msg << "covariance is " << raw.rows() << "x" << raw.cols() << " but dims total "
            << dims.total();
        throw Error(ErrorCode::DimensionMismatch, msg.str());
    }
    if (!raw.allFinite()) {
        throw Error(ErrorCode::InvalidInput, "covariance contains non-finite entries");
    }
    const double scale = raw.cwiseAbs().maxCoeff();
    const double asym = (raw - raw.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTolerance * scale) {
        throw Error(ErrorCode::NotSymmetric, "covariance asymmetry exceeds tolerance");
    }
    Matrix sym = linalg::symmetrize(raw);
    const auto range = linalg::eigen_range(sym);
    if (range.min < -kPsdTolerance * std::max(range.max, 0.0) || range.max < 0.0) {
        std::ostringstream msg;
        msg << "covariance has eigenvalue " << range.min;
        throw Error(ErrorCode::NotPositiveSemidefinite, msg.str());
    }
    return GaussianSystem(dims, std::move(sym));
}

Matrix conditional_covariance(const GaussianSystem& system) {
    const Matrix sm = system.sigma_m();
    const auto range = linalg::eigen_range(sm);
    if (!(range.max > 0.0) || range.min <= kInvertibleThreshold * range.max) {
        throw Error(ErrorCode::SingularMessageCovariance, "Sigma_M is not invertible");
    }
    const Matrix cross = system.sigma_xy_m();
    const Matrix correction = cross * sm.ldlt().solve(cross.transpose());
    return linalg::symmetrize(system.sigma_xy() - correction);
}

WhitenedSystem whiten(const GaussianSystem& system) {
    const Dims& d = system.dims();
    const Matrix cond = conditional_covariance(system);

    bool ok = false;
    const Matrix m_isqrt = linalg::inv_sqrtm_spd(system.sigma_m(), kInvertibleThreshold, ok);
    if (!ok) {
        throw Error(ErrorCode::SingularMessageCovariance, "Sigma_M is not invertible");
    }
    const Matrix x_isqrt =
        linalg::inv_sqrtm_spd(cond.topLeftCorner(d.d_x, d.d_x), kInvertibleThreshold, ok);
    if (!ok) {
        throw Error(ErrorCode::DeterministicChannel, "Sigma_{X|M} is near-singular");
    }
    const Matrix y_isqrt =
        linalg::inv_sqrtm_spd(cond.bottomRightCorner(d.d_y, d.d_y), kInvertibleThreshold, ok);
    if (!ok) {
        throw Error(ErrorCode::DeterministicChannel, "Sigma_{Y|M} is near-singular");
    }

    WhitenedSystem w;
    w.dims = d;
    w.h_x = x_isqrt * system.sigma_x_m() * m_isqrt;
    w.h_y = y_isqrt * system.sigma_y_m() * m_isqrt;
    w.sigma_cross = x_isqrt * cond.topRightCorner(d.d_x, d.d_y) * y_isqrt;
    return w;
}

InfoTriple mutual_informations(const WhitenedSystem& w, double epsilon) {
    const int dm = w.dims.d_m;
    const int dx = w.dims.d_x;
    const int dy = w.dims.d_y;
    const Matrix id_m = Matrix::Identity(dm, dm);

    InfoTriple t;
    t.i_mx = half_logdet_bits(id_m + w.h_x.transpose() * w.h_x / (1.0 + epsilon), "I(M;X)");
    t.i_my = half_logdet_bits(id_m + w.h_y.transpose() * w.h_y, "I(M;Y)");

    // I(M;(X,Y)) = 1/2 log det(I + H^T Sigma_{XY|M}^{-1} H) with H = [H_X; H_Y].
    Matrix cond(dx + dy, dx + dy);
    cond.topLeftCorner(dx, dx) = (1.0 + epsilon) * Matrix::Identity(dx, dx);
    cond.topRightCorner(dx, dy) = w.sigma_cross;
    cond.bottomLeftCorner(dy, dx) = w.sigma_cross.transpose();
    cond.bottomRightCorner(dy, dy) = Matrix::Identity(dy, dy);
    Matrix h(dx + dy, dm);
    h.topRows(dx) = w.h_x;
    h.bottomRows(dy) = w.h_y;

    Eigen::LDLT<Matrix> ldlt(cond);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 0.0) {
        throw Error(ErrorCode::NumericalFailure, "Sigma_{XY|M} is not invertible");
    }
    t.i_mxy = half_logdet_bits(id_m + h.transpose() * ldlt.solve(h), "I(M;(X,Y))");
    return t;
}

GaussianSystem to_system(const WhitenedSystem& w) {
    const int dm = w.dims.d_m;
    const int dx = w.dims.d_x;
    const int dy = w.dims.d_y;
    const int mx = dm + dx;
    Matrix s(w.dims.total(), w.dims.total());
    s.topLeftCorner(dm, dm).setIdentity();
    s.block(dm, 0, dx, dm) = w.h_x;
    s.block(mx, 0, dy, dm) = w.h_y;
    s.block(0, dm, dm, dx) = w.h_x.transpose();
    s.block(0, mx, dm, dy) = w.h_y.transpose();
    s.block(dm, dm, dx, dx) = w.h_x * w.h_x.transpose() + Matrix::Identity(dx, dx);
    s.block(mx, mx, dy, dy) = w.h_y * w.h_y.transpose() + Matrix::Identity(dy, dy);
    s.block(dm, mx, dx, dy) = w.h_x * w.h_y.transpose() + w.sigma_cross;
    s.block(mx, dm, dy, dx) = s.block(dm, mx, dx, dy).transpose();
    return validate_covariance(s, w.dims);
}

}  // namespace gpid
