#include "gpid/solver.hpp"
#include "gpid/error.hpp"

#include <cmath>
#include <limits>

namespace gpid {

namespace {

constexpr double kProjectionSingular = 1e-12;

[[nodiscard]] Matrix sign_of(const Matrix& g) {
    return g.unaryExpr([](double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); });
}

[[nodiscard]] bool plateaued(const std::vector<double>& trace, int patience, double tol) {
    const auto n = static_cast<int>(trace.size());
    if (n <= patience) {
        return false;
    }
    for (int k = n - patience; k < n; ++k) {
        if (!(std::abs(trace[k] - trace[k - 1]) < tol)) {
            return false;
        }
    }
    return true;
}

}  // namespace

void SolverConfig::validate() const {
    const bool ok = eta0 > 0.0 && beta > 0.0 && beta < 1.0 && alpha > 0.0 && alpha <= 1.0 &&
                    epsilon >= 0.0 && tol > 0.0 && patience > 0 && max_iter > 0;
    if (!ok) {
        throw Error(ErrorCode::InvalidInput, "solver configuration out of range");
    }
}

ObjectiveAndGradient evaluate(const Matrix& sigma, const WhitenedSystem& w, double epsilon) {
    const int dx = w.dims.d_x;
    const int dm = w.dims.d_m;
    if (sigma.rows() != dx || sigma.cols() != w.dims.d_y) {
        throw Error(ErrorCode::DimensionMismatch, "optimization variable has wrong shape");
    }

    const Matrix s = linalg::symmetrize((1.0 + epsilon) * Matrix::Identity(dx, dx) -
                                        sigma * sigma.transpose());
    Eigen::LLT<Matrix> s_llt(s);
    if (s_llt.info() != Eigen::Success) {
        throw Error(ErrorCode::NumericalFailure, "regularized Schur complement is not invertible");
    }
    const Matrix b = w.h_x - sigma * w.h_y;
    const Matrix s_inv_b = s_llt.solve(b);
    const Matrix a = linalg::symmetrize(Matrix::Identity(dm, dm) + w.h_y.transpose() * w.h_y +
                                        b.transpose() * s_inv_b);
    Eigen::LLT<Matrix> a_llt(a);
    if (a_llt.info() != Eigen::Success) {
        throw Error(ErrorCode::NumericalFailure, "objective log-det argument is not positive definite");
    }

    double logdet = 0.0;
    const auto diag = a_llt.matrixLLT().diagonal();
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
        logdet += std::log(diag(i));
    }

    ObjectiveAndGradient out;
    out.value_bits = logdet / kLn2;  // 1/2 * 2 * sum(log L_ii)
    const Matrix tail = s_inv_b.transpose() * sigma - w.h_y.transpose();
    out.grad_nats = s_inv_b * a_llt.solve(tail);
    return out;
}

double objective(const Matrix& sigma, const WhitenedSystem& w, double epsilon) {
    return evaluate(sigma, w, epsilon).value_bits;
}

Matrix gradient(const Matrix& sigma, const WhitenedSystem& w, double epsilon) {
    return evaluate(sigma, w, epsilon).grad_nats;
}

Matrix project(const Matrix& sigma) {
    const Eigen::Index dx = sigma.rows();
    const Eigen::Index dy = sigma.cols();

    Eigen::LLT<Matrix> feasible(Matrix::Identity(dx, dx) - sigma * sigma.transpose());
    if (feasible.info() == Eigen::Success) {
        return sigma;
    }

    Matrix joint(dx + dy, dx + dy);
    joint.topLeftCorner(dx, dx).setIdentity();
    joint.bottomRightCorner(dy, dy).setIdentity();
    joint.topRightCorner(dx, dy) = sigma;
    joint.bottomLeftCorner(dy, dx) = sigma.transpose();

    Eigen::SelfAdjointEigenSolver<Matrix> es(joint);
    const Vector rectified = es.eigenvalues().cwiseMax(0.0);
    const Matrix clamped = linalg::symmetrize(es.eigenvectors() * rectified.asDiagonal() *
                                              es.eigenvectors().transpose());

    bool ok_x = false;
    bool ok_y = false;
    const Matrix x_isqrt =
        linalg::inv_sqrtm_spd(clamped.topLeftCorner(dx, dx), kProjectionSingular, ok_x);
    const Matrix y_isqrt =
        linalg::inv_sqrtm_spd(clamped.bottomRightCorner(dy, dy), kProjectionSingular, ok_y);
    if (!ok_x || !ok_y) {
        throw Error(ErrorCode::NumericalFailure, "projection produced a singular diagonal block");
    }
    return x_isqrt * clamped.topRightCorner(dx, dy) * y_isqrt;
}

Matrix init_sigma(const WhitenedSystem& w) {
    return project(w.h_x * linalg::pinv(w.h_y));
}

SolverResult solve_union_information(const WhitenedSystem& w, const SolverConfig& config) {
    config.validate();

    SolverResult result;
    result.objective_trace.reserve(static_cast<std::size_t>(config.max_iter));

    Matrix sigma = init_sigma(w);
    Matrix eta = Matrix::Constant(sigma.rows(), sigma.cols(), config.eta0);
    Matrix prev_sign = Matrix::Zero(sigma.rows(), sigma.cols());
    double best = std::numeric_limits<double>::infinity();
    double decay = 1.0;

    for (int i = 0; i < config.max_iter; ++i) {
        const auto eval = evaluate(sigma, w, config.epsilon);
        result.objective_trace.push_back(eval.value_bits);
        result.iterations = i + 1;
        if (eval.value_bits < best) {
            best = eval.value_bits;
            result.sigma_opt = sigma;
        }
        if (plateaued(result.objective_trace, config.patience, config.tol)) {
            result.converged = true;
            break;
        }

        const Matrix sign = sign_of(eval.grad_nats);
        if (i > 0) {
            // Same sign: grow by 1/beta. Flipped sign: shrink by beta. Zero: keep.
            const Matrix agreement = sign.cwiseProduct(prev_sign);
            eta = eta.cwiseProduct(
                agreement.unaryExpr([&](double s) { return std::pow(config.beta, -s); }));
        }
        sigma = project(sigma - decay * eta.cwiseProduct(sign));
        prev_sign = sign;
        decay *= config.alpha;
    }

    result.union_info = best;
    return result;
}

}  // namespace gpid
