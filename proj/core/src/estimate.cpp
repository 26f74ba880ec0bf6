#include "gpid/estimate.hpp"
#include "gpid/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <exception>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_set>

namespace gpid {

namespace {

[[nodiscard]] double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) {
        return 0.0;
    }
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

[[nodiscard]] Matrix centered(const Matrix& data) {
    return data.rowwise() - data.colwise().mean();
}

[[nodiscard]] unsigned resolve_threads(unsigned requested, int jobs) {
    unsigned t = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
    return std::max(1u, std::min<unsigned>(t, static_cast<unsigned>(std::max(jobs, 1))));
}

}  // namespace

void Dataset::validate() const {
    if (!dims.valid() || data.cols() != dims.total()) {
        throw Error(ErrorCode::DimensionMismatch, "dataset column count does not match dims");
    }
    if (data.rows() < 2) {
        throw Error(ErrorCode::InsufficientSamples, "dataset needs at least 2 rows");
    }
    if (!data.allFinite()) {
        throw Error(ErrorCode::InvalidInput, "dataset contains non-finite values");
    }
}

GaussianSystem sample_covariance(const Dataset& ds) {
    ds.validate();
    const Matrix c = centered(ds.data);
    const Matrix cov = (c.transpose() * c) / static_cast<double>(ds.n() - 1);
    return validate_covariance(linalg::symmetrize(cov), ds.dims);
}

BiasReport estimate_pid(const GaussianSystem& covariance, long long n, const SolverConfig& config,
                        bool bias_correct) {
    if (bias_correct && n <= covariance.dims().total()) {
        std::ostringstream msg;
        msg << "bias correction needs more than " << covariance.dims().total()
            << " samples, got " << n;
        throw Error(ErrorCode::InsufficientSamples, msg.str());
    }
    PidComponents raw = decompose(covariance, config);
    if (bias_correct) {
        return correct(raw, covariance.dims(), n);
    }
    BiasReport report;
    report.n = n;
    report.raw = raw;
    report.corrected = std::move(raw);
    return report;
}

BiasReport estimate_pid(const Dataset& ds, const SolverConfig& config, bool bias_correct) {
    return estimate_pid(sample_covariance(ds), ds.n(), config, bias_correct);
}

long long count_unique_rows(const Matrix& data) {
    const auto cols = static_cast<std::size_t>(data.cols());
    std::unordered_set<std::string> seen;
    seen.reserve(static_cast<std::size_t>(data.rows()));
    std::string key(cols * sizeof(double), '\0');
    for (Eigen::Index r = 0; r < data.rows(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double v = data(r, static_cast<Eigen::Index>(c));
            std::memcpy(key.data() + c * sizeof(double), &v, sizeof(double));
        }
        seen.insert(key);
    }
    return static_cast<long long>(seen.size());
}

ComponentStats summarize(std::vector<double> values) {
    ComponentStats s;
    if (values.empty()) {
        return s;
    }
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - s.mean) * (v - s.mean);
        }
        s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    s.q1 = quantile(values, 0.25);
    s.median = quantile(values, 0.5);
    s.q3 = quantile(values, 0.75);
    return s;
}

BootstrapSummary bootstrap_pid(const Dataset& ds, int b, std::uint64_t seed,
                               const SolverConfig& config, unsigned threads) {
    ds.validate();
    if (b <= 0) {
        throw Error(ErrorCode::InvalidInput, "bootstrap resample count must be positive");
    }
    const long long n = ds.n();

    // Indices are drawn serially so the result is independent of scheduling.
    Rng rng(seed);
    std::uniform_int_distribution<long long> pick(0, n - 1);
    std::vector<std::vector<long long>> indices(static_cast<std::size_t>(b));
    for (auto& idx : indices) {
        idx.resize(static_cast<std::size_t>(n));
        for (auto& i : idx) {
            i = pick(rng);
        }
    }

    std::vector<std::optional<PidComponents>> results(static_cast<std::size_t>(b));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (int j = next++; j < b; j = next++) {
            try {
                const auto& idx = indices[static_cast<std::size_t>(j)];
                Dataset resample{Matrix(n, ds.data.cols()), ds.dims};
                for (long long r = 0; r < n; ++r) {
                    resample.data.row(r) = ds.data.row(idx[static_cast<std::size_t>(r)]);
                }
                const long long n_eff = count_unique_rows(resample.data);
                if (n_eff <= ds.dims.total()) {
                    continue;
                }
                const BiasReport rep = estimate_pid(sample_covariance(resample), n_eff, config, true);
                results[static_cast<std::size_t>(j)] = rep.corrected;
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = b;
            }
        }
    };

    const unsigned t = resolve_threads(threads, b);
    if (t == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < t; ++i) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    BootstrapSummary summary;
    summary.b = b;
    summary.seed = seed;
    std::array<std::vector<double>, 4> columns;
    for (auto& r : results) {
        if (!r) {
            ++summary.skipped;
            continue;
        }
        ++summary.used;
        columns[0].push_back(r->ui_x);
        columns[1].push_back(r->ui_y);
        columns[2].push_back(r->ri);
        columns[3].push_back(r->si);
        summary.resamples.push_back(std::move(*r));
    }
    for (std::size_t c = 0; c < columns.size(); ++c) {
        summary.per_component[c] = summarize(std::move(columns[c]));
    }
    return summary;
}

Matrix pca_reduce(const Matrix& data, int k) {
    const Eigen::Index n = data.rows();
    const Eigen::Index d = data.cols();
    if (n < 2 || k < 1 || k > d || k > n) {
        throw Error(ErrorCode::DimensionMismatch, "pca_reduce needs n >= 2 and 1 <= k <= min(n, d)");
    }
    const Matrix c = centered(data);
    const Matrix cov = linalg::symmetrize((c.transpose() * c) / static_cast<double>(n - 1));
    Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
    // Eigenvalues come in ascending order.
    Matrix axes(d, k);
    for (int j = 0; j < k; ++j) {
        Vector v = es.eigenvectors().col(d - 1 - j);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0) {
            v = -v;
        }
        axes.col(j) = v;
    }
    return c * axes;
}

Dataset pca_reduce_blocks(const Dataset& ds, int k) {
    ds.validate();
    const Dims& d = ds.dims;
    const Matrix m = ds.data.leftCols(d.d_m);
    Matrix x = ds.data.middleCols(d.d_m, d.d_x);
    Matrix y = ds.data.rightCols(d.d_y);
    if (d.d_x > k) {
        x = pca_reduce(x, k);
    }
    if (d.d_y > k) {
        y = pca_reduce(y, k);
    }
    Dataset out;
    out.dims = Dims{d.d_m, static_cast<int>(x.cols()), static_cast<int>(y.cols())};
    out.data.resize(ds.n(), out.dims.total());
    out.data << m, x, y;
    return out;
}

Dataset sample_gaussian(const GaussianSystem& system, long long n, std::uint64_t seed) {
    if (n < 1) {
        throw Error(ErrorCode::InvalidInput, "sample count must be positive");
    }
    const Matrix root = linalg::sqrtm_psd(system.sigma());
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix z(n, system.dims().total());
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
        for (Eigen::Index c = 0; c < z.cols(); ++c) {
            z(r, c) = normal(rng);
        }
    }
    return Dataset{z * root, system.dims()};
}

}  // namespace gpid
