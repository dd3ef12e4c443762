#pragma once

// Soft-margin RBF support vector classifier trained by SMO with second-order
// working-set selection, plus stratified k-fold splitting and evaluation metrics.
//
// Dual problem:  min 1/2 a^T Q a - e^T a,   y^T a = 0,  0 <= a_i <= C,
// with Q_ij = y_i y_j exp(-gamma ||x_i - x_j||^2).

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <limits>
#include <list>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "common.hpp"
#include "pairfeat.hpp"

namespace bse {

// ---------------------------------------------------------------------------
// kernel

inline double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma) {
    if (x.size() != y.size()) throw Error("rbf_kernel: length mismatch");
    if (!(gamma > 0)) throw Error("rbf_kernel: gamma must be positive");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double d = x[i] - y[i];
        s += d * d;
    }
    return std::exp(-gamma * s);
}

/// gamma = 1 / (p * var(X)) over all entries of the training features ("scale"),
/// or a fixed value.
struct GammaRule {
    std::optional<double> fixed;

    double resolve(const RowMatrix& x) const {
        if (fixed) return *fixed;
        const double n = static_cast<double>(x.size());
        if (n == 0) return 1.0;
        const double mean = x.sum() / n;
        const double var = (x.array() - mean).square().sum() / n;
        if (!(var > 0)) return 1.0;
        return 1.0 / (static_cast<double>(x.cols()) * var);
    }
};

struct SvmParams {
    double C = 3.5;
    GammaRule gamma{};
    double tol = 1e-3;
    std::size_t max_iterations = 0;  // 0: max(10^7, 100 n)
    bool standardize = false;
};

/// Per-column z-scoring fitted on training rows.
struct Standardizer {
    Eigen::RowVectorXd mean;
    Eigen::RowVectorXd scale;

    static Standardizer fit(const RowMatrix& x) {
        Standardizer s;
        const double n = static_cast<double>(x.rows());
        s.mean = x.colwise().mean();
        s.scale = ((x.rowwise() - s.mean).array().square().colwise().sum() / std::max(1.0, n)).sqrt();
        for (Eigen::Index c = 0; c < s.scale.size(); ++c)
            if (!(s.scale[c] > 0)) s.scale[c] = 1.0;
        return s;
    }
    RowMatrix apply(const RowMatrix& x) const {
        return ((x.rowwise() - mean).array().rowwise() / scale.array()).matrix();
    }
};

struct SvmModel {
    RowMatrix support_vectors;
    Vector dual_coef;  // alpha_i * y_i for each support vector
    double bias = 0.0; // f(x) = sum coef_i k(sv_i, x) + bias
    double gamma = 1.0;
    double C = 1.0;
    bool converged = true;
    std::size_t iterations = 0;
    std::optional<Standardizer> standardizer;

    std::size_t features() const { return static_cast<std::size_t>(support_vectors.cols()); }
};

/// Raw SMO solution over a precomputed kernel matrix.
struct DualSolution {
    Vector alpha;
    double rho = 0.0;  // f(x) = sum alpha_i y_i K(x_i, x) - rho
    bool converged = true;
    std::size_t iterations = 0;
};

/// K_ij = exp(-gamma ||a_i - b_j||^2). Columns are centered on `a`'s means before
/// the norm expansion to limit cancellation; the result is built in one pass.
inline Matrix rbf_cross_kernel(const RowMatrix& a, const RowMatrix& b, double gamma) {
    const Eigen::RowVectorXd mu = a.colwise().mean();
    const Matrix ac = a.rowwise() - mu;
    const Matrix bc = b.rowwise() - mu;
    const Eigen::ArrayXd na = ac.rowwise().squaredNorm().array();
    const Vector nb = bc.rowwise().squaredNorm();
    Matrix k = ac * bc.transpose();
    for (Eigen::Index j = 0; j < k.cols(); ++j)
        k.col(j) = (-gamma * (na + nb[j] - 2.0 * k.col(j).array()).max(0.0)).exp().matrix();
    return k;
}

inline Matrix rbf_kernel_matrix(const RowMatrix& x, double gamma) {
    Matrix k = rbf_cross_kernel(x, x, gamma);
    k.diagonal().setOnes();
    return k;
}

/// Kernel columns from a precomputed dense matrix.
class DenseKernel {
public:
    explicit DenseKernel(const Matrix& k) : k_(&k) {}
    std::size_t size() const { return static_cast<std::size_t>(k_->rows()); }
    const double* column(std::size_t i) const { return k_->col(static_cast<Eigen::Index>(i)).data(); }
    double diag(std::size_t i) const { return (*k_)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)); }

private:
    const Matrix* k_;
};

/// Kernel columns computed on demand and kept in a least-recently-used cache.
/// A returned pointer stays valid until two further distinct columns are requested.
class CachedKernel {
public:
    CachedKernel(const RowMatrix& x, double gamma, std::size_t cache_bytes = std::size_t{1} << 30)
        : x_(&x), gamma_(gamma), mu_(x.colwise().mean()) {
        const std::size_t n = size();
        xc_ = x.rowwise() - mu_;
        norms_ = xc_.rowwise().squaredNorm();
        capacity_ = std::max<std::size_t>(2, cache_bytes / (sizeof(double) * std::max<std::size_t>(n, 1)));
        slot_of_.assign(n, kNone);
    }
    std::size_t size() const { return static_cast<std::size_t>(x_->rows()); }
    double diag(std::size_t) const { return 1.0; }

    const double* column(std::size_t i) const {
        if (slot_of_[i] != kNone) {
            touch(slot_of_[i]);
            return slots_[slot_of_[i]].values.data();
        }
        std::size_t slot;
        if (slots_.size() < capacity_) {
            slot = slots_.size();
            slots_.push_back({});
        } else {
            slot = lru_.back();
            lru_.pop_back();
            slot_of_[slots_[slot].column] = kNone;
        }
        auto& s = slots_[slot];
        s.column = i;
        Vector dots = xc_ * xc_.row(static_cast<Eigen::Index>(i)).transpose();
        s.values.resize(dots.size());
        const double ni = norms_[static_cast<Eigen::Index>(i)];
        for (Eigen::Index t = 0; t < dots.size(); ++t)
            s.values[t] = std::exp(-gamma_ * std::max(0.0, norms_[t] + ni - 2.0 * dots[t]));
        s.values[static_cast<Eigen::Index>(i)] = 1.0;
        slot_of_[i] = slot;
        lru_.push_front(slot);
        s.where = lru_.begin();
        return s.values.data();
    }

private:
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    struct Slot {
        std::size_t column = 0;
        Vector values;
        std::list<std::size_t>::iterator where;
    };
    void touch(std::size_t slot) const { lru_.splice(lru_.begin(), lru_, slots_[slot].where); }

    const RowMatrix* x_;
    double gamma_;
    Eigen::RowVectorXd mu_;
    Matrix xc_;
    Vector norms_;
    std::size_t capacity_ = 2;
    mutable std::vector<Slot> slots_;
    mutable std::vector<std::size_t> slot_of_;
    mutable std::list<std::size_t> lru_;
};

/// Training splits up to this size use a dense kernel matrix; larger ones a column cache.
inline constexpr std::size_t kDenseKernelLimit = 20000;

/// SMO with WSS2 (maximal violating pair, second-order choice of the partner).
/// `y` holds +1/-1. Stops when the maximal KKT violation drops below tol.
template <class Kernel>
DualSolution smo_solve(const Kernel& kernel, std::span<const int> y, double C, double tol,
                       std::size_t max_iterations = 0) {
    const std::size_t n = y.size();
    if (kernel.size() != n) throw Error("smo_solve: kernel size mismatch");
    if (max_iterations == 0) max_iterations = std::max<std::size_t>(10'000'000, 100 * n);
    constexpr double tau = 1e-12;

    DualSolution sol;
    sol.alpha = Vector::Zero(static_cast<Eigen::Index>(n));
    Vector g = Vector::Constant(static_cast<Eigen::Index>(n), -1.0);  // gradient Q a - e
    Vector yd(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) yd[static_cast<Eigen::Index>(i)] = y[i] > 0 ? 1.0 : -1.0;
    auto& a = sol.alpha;
    auto is_upper = [&](std::size_t t) { return a[static_cast<Eigen::Index>(t)] >= C; };
    auto is_lower = [&](std::size_t t) { return a[static_cast<Eigen::Index>(t)] <= 0; };
    // membership in the "up" and "low" index sets of the maximal-violating-pair rule
    std::vector<char> up(n), low(n);
    auto refresh = [&](std::size_t t) {
        const auto ti = static_cast<Eigen::Index>(t);
        up[t] = yd[ti] > 0 ? !is_upper(t) : !is_lower(t);
        low[t] = yd[ti] > 0 ? !is_lower(t) : !is_upper(t);
    };
    for (std::size_t t = 0; t < n; ++t) refresh(t);
    Vector kdiag(static_cast<Eigen::Index>(n));
    for (std::size_t t = 0; t < n; ++t) kdiag[static_cast<Eigen::Index>(t)] = kernel.diag(t);
    constexpr double inf = std::numeric_limits<double>::infinity();

    std::size_t iter = 0;
    while (true) {
        const double* gp = g.data();
        const double* yp = yd.data();
        double gmax = -inf;
        std::size_t i = n;
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -yp[t] * gp[t];
            if (up[t] && v >= gmax) {
                gmax = v;
                i = t;
            }
        }
        double gmax2 = -inf;
        std::size_t j = n;
        if (i < n) {
            const double* ki = kernel.column(i);
            const double* kd = kdiag.data();
            const double kii = kd[i];
            double best = inf;
            for (std::size_t t = 0; t < n; ++t) {
                if (!low[t]) continue;
                const double v = yp[t] * gp[t];
                gmax2 = std::max(gmax2, v);
                const double bb = gmax + v;
                if (bb > 0) {
                    double quad = kii + kd[t] - 2.0 * ki[t];
                    if (quad <= 0) quad = tau;
                    const double obj = -(bb * bb) / quad;
                    if (obj <= best) {
                        best = obj;
                        j = t;
                    }
                }
            }
        }
        if (i == n || j == n || gmax + gmax2 < tol) break;
        if (iter >= max_iterations) {
            sol.converged = false;
            break;
        }
        ++iter;

        const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
        const double* ki = kernel.column(i);
        const double* kj = kernel.column(j);
        const double qii = kdiag[ii], qjj = kdiag[jj];
        const double qij = yd[i] * yd[j] * ki[j];
        const double old_ai = a[ii], old_aj = a[jj];
        if (yd[i] != yd[j]) {
            double quad = qii + qjj + 2.0 * qij;
            if (quad <= 0) quad = tau;
            const double delta = (-g[i] - g[j]) / quad;
            const double diff = a[ii] - a[jj];
            a[ii] += delta;
            a[jj] += delta;
            if (diff > 0) {
                if (a[jj] < 0) {
                    a[jj] = 0;
                    a[ii] = diff;
                }
            } else if (a[ii] < 0) {
                a[ii] = 0;
                a[jj] = -diff;
            }
            if (diff > 0) {
                if (a[ii] > C) {
                    a[ii] = C;
                    a[jj] = C - diff;
                }
            } else if (a[jj] > C) {
                a[jj] = C;
                a[ii] = C + diff;
            }
        } else {
            double quad = qii + qjj - 2.0 * qij;
            if (quad <= 0) quad = tau;
            const double delta = (g[i] - g[j]) / quad;
            const double sum = a[ii] + a[jj];
            a[ii] -= delta;
            a[jj] += delta;
            if (sum > C) {
                if (a[ii] > C) {
                    a[ii] = C;
                    a[jj] = sum - C;
                }
            } else if (a[jj] < 0) {
                a[jj] = 0;
                a[ii] = sum;
            }
            if (sum > C) {
                if (a[jj] > C) {
                    a[jj] = C;
                    a[ii] = sum - C;
                }
            } else if (a[ii] < 0) {
                a[ii] = 0;
                a[jj] = sum;
            }
        }
        const double dai = a[ii] - old_ai, daj = a[jj] - old_aj;
        const double ci = yd[ii] * dai, cj = yd[jj] * daj;
        const auto nn = static_cast<Eigen::Index>(n);
        g.array() += yd.array() * (ci * Eigen::Map<const Eigen::ArrayXd>(ki, nn) + cj * Eigen::Map<const Eigen::ArrayXd>(kj, nn));
        refresh(i);
        refresh(j);
    }
    sol.iterations = iter;

    // bias: average y G over free vectors, midpoint of the feasible interval otherwise
    double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = yd[t] * g[t];
        if (is_upper(t)) {
            if (yd[t] < 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else if (is_lower(t)) {
            if (yd[t] > 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    sol.rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
    return sol;
}

inline DualSolution smo_solve(const Matrix& kernel, std::span<const int> y, double C, double tol,
                              std::size_t max_iterations = 0) {
    return smo_solve(DenseKernel(kernel), y, C, tol, max_iterations);
}

/// Dual objective 1/2 a^T Q a - sum a for a given solution.
inline double dual_objective(const Matrix& kernel, std::span<const int> y, const Vector& alpha) {
    Vector ya(alpha.size());
    for (Eigen::Index i = 0; i < alpha.size(); ++i) ya[i] = (y[static_cast<std::size_t>(i)] > 0 ? 1.0 : -1.0) * alpha[i];
    return 0.5 * ya.dot(kernel * ya) - alpha.sum();
}

/// Trains on rows of X with labels +1/-1.
inline SvmModel svm_fit(const RowMatrix& x_in, std::span<const int> y, const SvmParams& params = {}) {
    if (static_cast<std::size_t>(x_in.rows()) != y.size()) throw Error("svm_fit: sample/label count mismatch");
    if (!(params.C > 0)) throw Error("svm_fit: C must be positive");
    bool pos = false, neg = false;
    for (int v : y) {
        if (v != 1 && v != -1) throw Error("svm_fit: labels must be +1/-1");
        (v > 0 ? pos : neg) = true;
    }
    if (!pos || !neg) throw Error("svm_fit: training data must contain both classes");

    SvmModel model;
    RowMatrix x = x_in;
    if (params.standardize) {
        model.standardizer = Standardizer::fit(x);
        x = model.standardizer->apply(x);
    }
    model.gamma = params.gamma.resolve(x);
    model.C = params.C;
    DualSolution sol;
    if (y.size() <= kDenseKernelLimit) {
        const Matrix k = rbf_kernel_matrix(x, model.gamma);
        sol = smo_solve(k, y, params.C, params.tol, params.max_iterations);
    } else {
        sol = smo_solve(CachedKernel(x, model.gamma), y, params.C, params.tol, params.max_iterations);
    }
    model.converged = sol.converged;
    model.iterations = sol.iterations;
    model.bias = -sol.rho;

    std::vector<Eigen::Index> sv;
    for (Eigen::Index i = 0; i < sol.alpha.size(); ++i)
        if (sol.alpha[i] > 0) sv.push_back(i);
    model.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), x.cols());
    model.dual_coef.resize(static_cast<Eigen::Index>(sv.size()));
    for (std::size_t s = 0; s < sv.size(); ++s) {
        model.support_vectors.row(static_cast<Eigen::Index>(s)) = x.row(sv[s]);
        model.dual_coef[static_cast<Eigen::Index>(s)] = sol.alpha[sv[s]] * (y[static_cast<std::size_t>(sv[s])] > 0 ? 1.0 : -1.0);
    }
    if (!model.converged) warn("svm_fit: iteration cap reached; returning best-effort model");
    return model;
}

/// Decision values f(x) = sum coef_i k(sv_i, x) + bias.
inline Vector svm_decision(const SvmModel& model, const RowMatrix& x_in) {
    if (static_cast<std::size_t>(x_in.cols()) != model.features()) throw Error("svm_decision: feature length mismatch");
    const RowMatrix x = model.standardizer ? model.standardizer->apply(x_in) : x_in;
    Vector f = rbf_cross_kernel(x, model.support_vectors, model.gamma) * model.dual_coef;
    f.array() += model.bias;
    return f;
}

/// 0/1 predictions from decision values: f > 0 is positive, and so is f == 0.
inline std::vector<int> predict_labels(const Vector& scores) {
    std::vector<int> out(static_cast<std::size_t>(scores.size()));
    for (Eigen::Index i = 0; i < scores.size(); ++i) out[static_cast<std::size_t>(i)] = scores[i] >= 0 ? 1 : 0;
    return out;
}

// ---------------------------------------------------------------------------
// folds

struct FoldPlan {
    std::vector<std::vector<std::size_t>> folds;  // each sorted ascending
    std::uint64_t seed = 0;

    std::size_t k() const { return folds.size(); }

    std::vector<std::size_t> training(std::size_t f) const {
        std::vector<std::size_t> out;
        for (std::size_t g = 0; g < folds.size(); ++g)
            if (g != f) out.insert(out.end(), folds[g].begin(), folds[g].end());
        std::sort(out.begin(), out.end());
        return out;
    }
};

/// Shuffles each class with the seeded generator and deals it round-robin; the
/// negative class continues where the positive class stopped so fold sizes differ by at most one.
inline FoldPlan stratified_kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw Error("stratified_kfold: k must be at least 2");
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == 1 ? pos : neg).push_back(i);
    if (pos.size() < k || neg.size() < k)
        throw Error("stratified_kfold: each class needs at least k=" + std::to_string(k) + " members (have " +
                    std::to_string(pos.size()) + " positive, " + std::to_string(neg.size()) + " negative)");
    Rng rng(seed);
    shuffle(pos, rng);
    shuffle(neg, rng);
    FoldPlan plan;
    plan.seed = seed;
    plan.folds.resize(k);
    std::size_t slot = 0;
    for (auto* cls : {&pos, &neg})
        for (std::size_t idx : *cls) plan.folds[slot++ % k].push_back(idx);
    for (auto& f : plan.folds) std::sort(f.begin(), f.end());
    return plan;
}

// ---------------------------------------------------------------------------
// metrics

struct MetricSet {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
    double roc_auc = std::numeric_limits<double>::quiet_NaN();  // NaN when only one class is present

    bool has_auc() const { return !std::isnan(roc_auc); }
};

inline constexpr std::array<const char*, 5> kMetricNames = {"precision", "recall", "f1", "accuracy", "roc_auc"};

inline double metric_value(const MetricSet& m, std::size_t i) {
    switch (i) {
        case 0: return m.precision;
        case 1: return m.recall;
        case 2: return m.f1;
        case 3: return m.accuracy;
        default: return m.roc_auc;
    }
}

/// AUC by pair counting: P(score_pos > score_neg) + 1/2 P(equal). Sort-based, exact.
inline double auc_pair_count(std::span<const int> labels, std::span<const double> scores) {
    if (labels.size() != scores.size()) throw Error("auc: length mismatch");
    std::vector<std::size_t> idx(labels.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double concordant = 0.0;  // counted in half units to stay exact
    std::size_t neg_below = 0, npos = 0, nneg = 0;
    for (std::size_t s = 0; s < idx.size();) {
        std::size_t e = s;
        std::size_t gp = 0, gn = 0;
        while (e < idx.size() && scores[idx[e]] == scores[idx[s]]) {
            (labels[idx[e]] == 1 ? gp : gn)++;
            ++e;
        }
        concordant += 2.0 * static_cast<double>(gp) * static_cast<double>(neg_below) +
                      static_cast<double>(gp) * static_cast<double>(gn);
        neg_below += gn;
        npos += gp;
        nneg += gn;
        s = e;
    }
    if (npos == 0 || nneg == 0) throw Error("auc: both classes are required");
    return concordant / (2.0 * static_cast<double>(npos) * static_cast<double>(nneg));
}

/// AUC as the trapezoidal area under the ROC curve (thresholds at distinct scores).
inline double auc_trapezoid(std::span<const int> labels, std::span<const double> scores) {
    if (labels.size() != scores.size()) throw Error("auc: length mismatch");
    std::vector<std::size_t> idx(labels.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    double npos = 0, nneg = 0;
    for (int l : labels) (l == 1 ? npos : nneg) += 1;
    if (npos == 0 || nneg == 0) throw Error("auc: both classes are required");
    double tp = 0, fp = 0, area2 = 0;  // twice the area in count units
    for (std::size_t s = 0; s < idx.size();) {
        double tp0 = tp, fp0 = fp;
        std::size_t e = s;
        while (e < idx.size() && scores[idx[e]] == scores[idx[s]]) {
            (labels[idx[e]] == 1 ? tp : fp) += 1;
            ++e;
        }
        area2 += (fp - fp0) * (tp + tp0);
        s = e;
    }
    return area2 / (2.0 * npos * nneg);
}

inline MetricSet compute_metrics(std::span<const int> labels, std::span<const int> predictions,
                                 std::span<const double> scores) {
    if (labels.size() != predictions.size() || labels.size() != scores.size())
        throw Error("compute_metrics: length mismatch");
    double tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool truth = labels[i] == 1, pred = predictions[i] == 1;
        if (pred) (truth ? tp : fp) += 1;
        else (truth ? fn : tn) += 1;
    }
    MetricSet m;
    m.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    m.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    m.accuracy = labels.empty() ? 0.0 : (tp + tn) / static_cast<double>(labels.size());
    if (tp + fn > 0 && tn + fp > 0) m.roc_auc = auc_pair_count(labels, scores);
    return m;
}

// ---------------------------------------------------------------------------
// cross validation

namespace detail {
inline RowMatrix take_rows(const RowMatrix& x, std::span<const std::size_t> rows) {
    RowMatrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(rows[r]));
    return out;
}
inline std::vector<int> signed_labels(std::span<const int> labels01, std::span<const std::size_t> rows) {
    std::vector<int> out;
    out.reserve(rows.size());
    for (auto r : rows) out.push_back(labels01[r] == 1 ? 1 : -1);
    return out;
}
}  // namespace detail

struct FoldScore {
    MetricSet metrics;
    bool converged = true;
};

/// Trains on `train` rows and scores `test` rows (labels 0/1).
inline FoldScore train_and_score(const RowMatrix& x, std::span<const int> labels01, std::span<const std::size_t> train,
                                 std::span<const std::size_t> test, const SvmParams& params) {
    auto xtr = detail::take_rows(x, train);
    auto ytr = detail::signed_labels(labels01, train);
    SvmModel model = svm_fit(xtr, ytr, params);
    auto xte = detail::take_rows(x, test);
    Vector scores = svm_decision(model, xte);
    std::vector<int> truth;
    for (auto r : test) truth.push_back(labels01[r]);
    auto pred = predict_labels(scores);
    FoldScore fs;
    fs.metrics = compute_metrics(truth, pred, std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())));
    fs.converged = model.converged;
    return fs;
}

/// Mean test-fold AUC of a fold plan over the given feature matrix.
inline double cv_mean_auc(const RowMatrix& x, std::span<const int> labels01, const FoldPlan& plan,
                          const SvmParams& params) {
    double sum = 0.0;
    for (std::size_t f = 0; f < plan.k(); ++f) {
        auto train = plan.training(f);
        FoldScore s = train_and_score(x, labels01, train, plan.folds[f], params);
        if (!s.metrics.has_auc()) throw Error("cv_mean_auc: test fold has a single class");
        sum += s.metrics.roc_auc;
    }
    return sum / static_cast<double>(plan.k());
}

/// Mean AUC of a stratified k-fold run restricted to the given embedding columns.
inline double cross_val_mean_auc(const PairDataset& ds, std::span<const std::size_t> columns, std::size_t k,
                                 std::uint64_t seed, const SvmParams& params = {}) {
    PairDataset sub = select_coordinates(ds, columns);
    FoldPlan plan = stratified_kfold(sub.labels, k, seed);
    return cv_mean_auc(sub.features, sub.labels, plan, params);
}

inline void write_fold_metrics_csv(const std::vector<MetricSet>& folds, const std::string& path,
                                   const std::string& preamble = {}) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << preamble;
    out.precision(10);
    out << "fold,precision,recall,f1,accuracy,roc_auc\n";
    for (std::size_t f = 0; f < folds.size(); ++f) {
        out << f;
        for (std::size_t m = 0; m < kMetricNames.size(); ++m) out << ',' << metric_value(folds[f], m);
        out << '\n';
    }
}

}  // namespace bse
