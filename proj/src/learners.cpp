#include "sketchml/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sketchml/common.hpp"
#include "sketchml/dataset_ops.hpp"

namespace sketchml {

namespace {

std::vector<double> binary_targets(const std::vector<int>& y, int positive) {
    std::vector<double> t(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) t[i] = y[i] == positive ? 1.0 : -1.0;
    return t;
}

// max ||x_i||^2 with the implicit intercept coordinate included
double max_row_sq(const Matrix& x) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i)
        m = std::max(m, dot(x.row(i), x.row(i), x.cols()) + 1.0);
    return m;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

// Dense symmetric solve with a tiny ridge, for the Newton steps.
std::vector<double> cholesky_solve(std::vector<double> a, std::vector<double> b,
                                   std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] += 1e-10;
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k) diag -= a[j * n + k] * a[j * n + k];
        if (diag <= 0.0) throw Error("learners", "newton system not positive definite");
        diag = std::sqrt(diag);
        a[j * n + j] = diag;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) v -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = v / diag;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double v = b[i];
        for (std::size_t k = 0; k < i; ++k) v -= a[i * n + k] * b[k];
        b[i] = v / a[i * n + i];
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double v = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) v -= a[k * n + ii] * b[k];
        b[ii] = v / a[ii * n + ii];
    }
    return b;
}

struct IterState {
    long start = 0;       // absolute epoch the machine resumes at
    bool converged = false;
};

}  // namespace

double accuracy(const std::vector<int>& predicted, const std::vector<int>& actual) {
    if (predicted.size() != actual.size())
        throw Error("learners", "prediction/label length mismatch");
    if (predicted.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        if (predicted[i] == actual[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

// --------------------------------------------------------------------------
// logistic regression pieces

double logreg_binary_objective(const Matrix& x, const std::vector<double>& ypm,
                               const std::vector<double>& w, double b, double c_value,
                               bool l1) {
    const std::size_t n = x.rows(), d = x.cols();
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double margin = ypm[i] * (dot(x.row(i), w.data(), d) + b);
        // log(1 + exp(-m)) computed stably
        loss += margin > 0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
    }
    loss /= static_cast<double>(n);
    double reg = 0.0;
    for (double v : w) reg += l1 ? std::abs(v) : 0.5 * v * v;
    return reg / c_value + loss;
}

void logreg_binary_gradient(const Matrix& x, const std::vector<double>& ypm,
                            const std::vector<double>& w, double b, double c_value, bool l1,
                            std::vector<double>& gw, double& gb) {
    const std::size_t n = x.rows(), d = x.cols();
    gw.assign(d, 0.0);
    gb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double margin = ypm[i] * (dot(x.row(i), w.data(), d) + b);
        const double coef = -ypm[i] * sigmoid(-margin) / static_cast<double>(n);
        const double* xi = x.row(i);
        for (std::size_t j = 0; j < d; ++j) gw[j] += coef * xi[j];
        gb += coef;
    }
    for (std::size_t j = 0; j < d; ++j)
        gw[j] += l1 ? (w[j] > 0 ? 1.0 : (w[j] < 0 ? -1.0 : 0.0)) / c_value : w[j] / c_value;
}

double squared_hinge_objective(const Matrix& x, const std::vector<double>& ypm,
                               const std::vector<double>& w, double b, double c_value) {
    const std::size_t n = x.rows(), d = x.cols();
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double slack = std::max(0.0, 1.0 - ypm[i] * (dot(x.row(i), w.data(), d) + b));
        loss += slack * slack;
    }
    loss /= static_cast<double>(n);
    double reg = 0.0;
    for (double v : w) reg += 0.5 * v * v;
    return reg / c_value + loss;
}

void squared_hinge_gradient(const Matrix& x, const std::vector<double>& ypm,
                            const std::vector<double>& w, double b, double c_value,
                            std::vector<double>& gw, double& gb) {
    const std::size_t n = x.rows(), d = x.cols();
    gw.assign(d, 0.0);
    gb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double slack = 1.0 - ypm[i] * (dot(x.row(i), w.data(), d) + b);
        if (slack <= 0.0) continue;
        const double coef = -2.0 * slack * ypm[i] / static_cast<double>(n);
        const double* xi = x.row(i);
        for (std::size_t j = 0; j < d; ++j) gw[j] += coef * xi[j];
        gb += coef;
    }
    for (std::size_t j = 0; j < d; ++j) gw[j] += w[j] / c_value;
}

namespace {

// Full-batch gradient descent for one binary logistic machine; proximal step
// under l1. Constant step 1/L keeps warm and cold runs on the same sequence.
void lr_gradient_binary(const Matrix& x, const std::vector<double>& ypm, double c_value,
                        bool l1, double tol, long budget, std::vector<double>& w, double& b,
                        long& epochs, bool& converged) {
    const std::size_t d = x.cols();
    const double lips = 0.25 * max_row_sq(x) + (l1 ? 0.0 : 1.0 / c_value);
    const double eta = 1.0 / lips;
    std::vector<double> gw;
    double gb = 0.0;
    for (long it = 0; it < budget; ++it) {
        logreg_binary_gradient(x, ypm, w, b, c_value, false, gw, gb);
        double residual = std::abs(gb);
        if (l1) {
            // composite residual of the proximal step
            for (std::size_t j = 0; j < d; ++j) {
                const double smooth = gw[j] - w[j] / c_value;  // strip the l2 term added above
                const double wj = soft_threshold(w[j] - eta * smooth, eta / c_value);
                residual = std::max(residual, std::abs(wj - w[j]) / eta);
            }
        } else {
            for (std::size_t j = 0; j < d; ++j) residual = std::max(residual, std::abs(gw[j]));
        }
        if (residual < tol) {
            converged = true;
            break;
        }
        if (l1) {
            for (std::size_t j = 0; j < d; ++j) {
                const double smooth = gw[j] - w[j] / c_value;
                w[j] = soft_threshold(w[j] - eta * smooth, eta / c_value);
            }
        } else {
            for (std::size_t j = 0; j < d; ++j) w[j] -= eta * gw[j];
        }
        b -= eta * gb;
        ++epochs;
    }
}

// Damped Newton for one binary logistic machine, l2 only.
void lr_newton_binary(const Matrix& x, const std::vector<double>& ypm, double c_value,
                      double tol, long budget, std::vector<double>& w, double& b, long& epochs,
                      bool& converged) {
    const std::size_t n = x.rows(), d = x.cols(), dim = d + 1;
    std::vector<double> g(dim), h(dim * dim);
    for (long it = 0; it < budget; ++it) {
        std::fill(g.begin(), g.end(), 0.0);
        std::fill(h.begin(), h.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double* xi = x.row(i);
            const double p = sigmoid(dot(xi, w.data(), d) + b);
            const double t = ypm[i] > 0 ? 1.0 : 0.0;
            const double gcoef = (p - t) / static_cast<double>(n);
            const double hcoef = p * (1.0 - p) / static_cast<double>(n);
            for (std::size_t j = 0; j < d; ++j) {
                g[j] += gcoef * xi[j];
                for (std::size_t m = 0; m <= j; ++m) h[j * dim + m] += hcoef * xi[j] * xi[m];
                h[d * dim + j] += hcoef * xi[j];
            }
            g[d] += gcoef;
            h[d * dim + d] += hcoef;
        }
        for (std::size_t j = 0; j < d; ++j) {
            g[j] += w[j] / c_value;
            h[j * dim + j] += 1.0 / c_value;
        }
        for (std::size_t j = 0; j < dim; ++j)
            for (std::size_t m = j + 1; m < dim; ++m) h[j * dim + m] = h[m * dim + j];
        double gmax = 0.0;
        for (double v : g) gmax = std::max(gmax, std::abs(v));
        if (gmax < tol) {
            converged = true;
            break;
        }
        auto step = cholesky_solve(h, g, dim);
        for (std::size_t j = 0; j < d; ++j) w[j] -= step[j];
        b -= step[d];
        ++epochs;
    }
}

struct SoftmaxState {
    Matrix w;                 // K x d
    std::vector<double> b;    // K
};

void softmax_probs(const Matrix& x, const SoftmaxState& s, std::size_t i,
                   std::vector<double>& p) {
    const std::size_t k = s.w.rows(), d = x.cols();
    double mx = -1e300;
    for (std::size_t c = 0; c < k; ++c) {
        p[c] = dot(x.row(i), s.w.row(c), d) + s.b[c];
        mx = std::max(mx, p[c]);
    }
    double z = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        p[c] = std::exp(p[c] - mx);
        z += p[c];
    }
    for (std::size_t c = 0; c < k; ++c) p[c] /= z;
}

void lr_gradient_multinomial(const Matrix& x, const std::vector<int>& y, std::size_t k,
                             double c_value, bool l1, double tol, long budget, SoftmaxState& s,
                             long& epochs, bool& converged) {
    const std::size_t n = x.rows(), d = x.cols();
    const double lips = 0.5 * max_row_sq(x) + (l1 ? 0.0 : 1.0 / c_value);
    const double eta = 1.0 / lips;
    Matrix gw(k, d);
    std::vector<double> gb(k), p(k);
    for (long it = 0; it < budget; ++it) {
        std::fill(gw.data().begin(), gw.data().end(), 0.0);
        std::fill(gb.begin(), gb.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            softmax_probs(x, s, i, p);
            const double* xi = x.row(i);
            for (std::size_t c = 0; c < k; ++c) {
                const double coef =
                    (p[c] - (y[i] == static_cast<int>(c) ? 1.0 : 0.0)) / static_cast<double>(n);
                for (std::size_t j = 0; j < d; ++j) gw(c, j) += coef * xi[j];
                gb[c] += coef;
            }
        }
        double residual = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            residual = std::max(residual, std::abs(gb[c]));
            for (std::size_t j = 0; j < d; ++j) {
                if (l1) {
                    const double wj =
                        soft_threshold(s.w(c, j) - eta * gw(c, j), eta / c_value);
                    residual = std::max(residual, std::abs(wj - s.w(c, j)) / eta);
                } else {
                    residual = std::max(residual, std::abs(gw(c, j) + s.w(c, j) / c_value));
                }
            }
        }
        if (residual < tol) {
            converged = true;
            break;
        }
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t j = 0; j < d; ++j) {
                if (l1)
                    s.w(c, j) = soft_threshold(s.w(c, j) - eta * gw(c, j), eta / c_value);
                else
                    s.w(c, j) -= eta * (gw(c, j) + s.w(c, j) / c_value);
            }
            s.b[c] -= eta * gb[c];
        }
        ++epochs;
    }
}

void lr_newton_multinomial(const Matrix& x, const std::vector<int>& y, std::size_t k,
                           double c_value, double tol, long budget, SoftmaxState& s,
                           long& epochs, bool& converged) {
    const std::size_t n = x.rows(), d = x.cols(), dd = d + 1, dim = k * dd;
    std::vector<double> g(dim), h(dim * dim), p(k), xi_ext(dd);
    for (long it = 0; it < budget; ++it) {
        std::fill(g.begin(), g.end(), 0.0);
        std::fill(h.begin(), h.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            softmax_probs(x, s, i, p);
            const double* xi = x.row(i);
            for (std::size_t j = 0; j < d; ++j) xi_ext[j] = xi[j];
            xi_ext[d] = 1.0;
            for (std::size_t c = 0; c < k; ++c) {
                const double gcoef =
                    (p[c] - (y[i] == static_cast<int>(c) ? 1.0 : 0.0)) / static_cast<double>(n);
                for (std::size_t j = 0; j < dd; ++j) g[c * dd + j] += gcoef * xi_ext[j];
                for (std::size_t l = 0; l <= c; ++l) {
                    const double hcoef =
                        (p[c] * ((c == l ? 1.0 : 0.0) - p[l])) / static_cast<double>(n);
                    if (hcoef == 0.0) continue;
                    for (std::size_t j = 0; j < dd; ++j)
                        for (std::size_t m = 0; m < dd; ++m)
                            h[(c * dd + j) * dim + (l * dd + m)] += hcoef * xi_ext[j] * xi_ext[m];
                }
            }
        }
        for (std::size_t c = 0; c < k; ++c)
            for (std::size_t j = 0; j < d; ++j) {
                g[c * dd + j] += s.w(c, j) / c_value;
                h[(c * dd + j) * dim + (c * dd + j)] += 1.0 / c_value;
            }
        // intercepts are unregularized; add a small ridge so the softmax gauge
        // freedom does not make the system singular
        for (std::size_t c = 0; c < k; ++c)
            h[(c * dd + d) * dim + (c * dd + d)] += 1e-8;
        for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t b2 = a + 1; b2 < dim; ++b2) h[a * dim + b2] = h[b2 * dim + a];
        double gmax = 0.0;
        for (double v : g) gmax = std::max(gmax, std::abs(v));
        if (gmax < tol) {
            converged = true;
            break;
        }
        auto step = cholesky_solve(h, g, dim);
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t j = 0; j < d; ++j) s.w(c, j) -= step[c * dd + j];
            s.b[c] -= step[c * dd + d];
        }
        ++epochs;
    }
}

// ---------------------------------------------------------------------------
// perceptron

void perceptron_machine(const Matrix& x, const std::vector<double>& ypm,
                        const ModelSpec& spec, std::size_t machine_idx, long budget,
                        std::vector<double>& w, double& b, long& epoch_abs, bool& converged) {
    const std::size_t n = x.rows(), d = x.cols();
    const std::string penalty = spec.get<std::string>("penalty", "none");
    const double alpha = spec.get<double>("alpha", 1e-4);
    const double eta0 = spec.get<double>("eta0", 1.0);
    const bool shuffle = spec.get<bool>("shuffle", true);

    std::vector<std::size_t> order(n);
    const long stop = epoch_abs + budget;
    while (epoch_abs < stop) {
        std::iota(order.begin(), order.end(), 0);
        if (shuffle) {
            // per-epoch stream keyed by the absolute epoch, so warm resumes
            // replay exactly the order a cold run would use
            auto rng = make_rng(spec.seed, machine_idx, static_cast<std::uint64_t>(epoch_abs));
            std::shuffle(order.begin(), order.end(), rng);
        }
        std::size_t mistakes = 0;
        for (std::size_t i : order) {
            const double* xi = x.row(i);
            if (ypm[i] * (dot(xi, w.data(), d) + b) > 0.0) continue;
            if (penalty == "l2") {
                const double shrink = std::max(0.0, 1.0 - eta0 * alpha);
                for (auto& v : w) v *= shrink;
            } else if (penalty == "l1") {
                for (auto& v : w) v = soft_threshold(v, eta0 * alpha);
            }
            for (std::size_t j = 0; j < d; ++j) w[j] += eta0 * ypm[i] * xi[j];
            b += eta0 * ypm[i];
            ++mistakes;
        }
        ++epoch_abs;
        if (mistakes == 0) {
            converged = true;
            break;
        }
    }
}

// ---------------------------------------------------------------------------
// linear svm (primal, full batch)

void linear_svm_machine(const Matrix& x, const std::vector<double>& ypm,
                        const ModelSpec& spec, long budget, std::vector<double>& w, double& b,
                        long& epoch_abs, bool& converged) {
    const std::size_t n = x.rows(), d = x.cols();
    const double c_value = spec.get<double>("C", 1.0);
    const std::string loss = spec.get<std::string>("loss", "hinge");
    const double tol = spec.get<double>("tol", 1e-3);
    const double lips = (loss == "hinge" ? 1.0 : 2.0) * max_row_sq(x) + 1.0 / c_value;

    std::vector<double> gw(d);
    double gb = 0.0;
    const long stop = epoch_abs + budget;
    while (epoch_abs < stop) {
        if (loss == "squared_hinge") {
            squared_hinge_gradient(x, ypm, w, b, c_value, gw, gb);
            double gmax = std::abs(gb);
            for (double v : gw) gmax = std::max(gmax, std::abs(v));
            if (gmax < tol) {
                converged = true;
                break;
            }
            const double eta = 1.0 / lips;
            for (std::size_t j = 0; j < d; ++j) w[j] -= eta * gw[j];
            b -= eta * gb;
        } else {
            std::fill(gw.begin(), gw.end(), 0.0);
            gb = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double* xi = x.row(i);
                if (ypm[i] * (dot(xi, w.data(), d) + b) >= 1.0) continue;
                const double coef = -ypm[i] / static_cast<double>(n);
                for (std::size_t j = 0; j < d; ++j) gw[j] += coef * xi[j];
                gb += coef;
            }
            for (std::size_t j = 0; j < d; ++j) gw[j] += w[j] / c_value;
            // decaying step on the nonsmooth objective, keyed by absolute epoch
            const double eta = 4.0 / (lips * std::sqrt(static_cast<double>(epoch_abs) + 1.0));
            for (std::size_t j = 0; j < d; ++j) w[j] -= eta * gw[j];
            b -= eta * gb;
        }
        ++epoch_abs;
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// SMO

SmoResult smo_solve(const Matrix& kernel, const std::vector<double>& ypm, double c_value,
                    double tol, long max_iter) {
    const std::size_t n = ypm.size();
    SmoResult res;
    res.alpha.assign(n, 0.0);
    std::vector<double> grad(n, -1.0);  // grad of 1/2 a^T Q a - 1^T a at a = 0

    auto in_up = [&](std::size_t i) {
        return (ypm[i] > 0 && res.alpha[i] < c_value) || (ypm[i] < 0 && res.alpha[i] > 0);
    };
    auto in_low = [&](std::size_t i) {
        return (ypm[i] > 0 && res.alpha[i] > 0) || (ypm[i] < 0 && res.alpha[i] < c_value);
    };

    long it = 0;
    double gap = 0.0;
    for (;; ++it) {
        double m = -1e300, mm = 1e300;
        std::size_t sel_i = n, sel_j = n;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = -ypm[i] * grad[i];
            if (in_up(i) && v > m) {
                m = v;
                sel_i = i;
            }
            if (in_low(i) && v < mm) {
                mm = v;
                sel_j = i;
            }
        }
        gap = m - mm;
        if (sel_i == n || sel_j == n || gap < tol) break;
        if (it >= max_iter) {
            res.cap_hit = true;
            break;
        }
        const std::size_t i = sel_i, j = sel_j;
        double quad = kernel(i, i) + kernel(j, j) - 2.0 * kernel(i, j);
        quad = std::max(quad, 1e-12);
        double t = gap / quad;  // step along d_i = y_i, d_j = -y_j
        // box clipping for both coordinates
        if (ypm[i] > 0)
            t = std::min(t, c_value - res.alpha[i]);
        else
            t = std::min(t, res.alpha[i]);
        if (ypm[j] > 0)
            t = std::min(t, res.alpha[j]);
        else
            t = std::min(t, c_value - res.alpha[j]);
        const double di = ypm[i] * t, dj = -ypm[j] * t;
        res.alpha[i] += di;
        res.alpha[j] += dj;
        for (std::size_t k2 = 0; k2 < n; ++k2)
            grad[k2] += ypm[k2] * (ypm[i] * kernel(k2, i) * di + ypm[j] * kernel(k2, j) * dj);
    }
    res.iterations = it;
    res.kkt_violation = std::max(gap, 0.0);
    // recompute m/M for the bias after the final update
    double m = -1e300, mm = 1e300;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = -ypm[i] * grad[i];
        if (in_up(i)) m = std::max(m, v);
        if (in_low(i)) mm = std::min(mm, v);
    }
    res.intercept = (m + mm) / 2.0;
    double sum_a = 0.0, at_g = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum_a += res.alpha[i];
        at_g += res.alpha[i] * grad[i];
    }
    res.dual_objective = 0.5 * (sum_a - at_g);
    return res;
}

// ---------------------------------------------------------------------------
// train / predict

namespace {

void check_warm_compat(const ModelSpec& spec, const Matrix& x, std::size_t n_classes,
                       const TrainedModel* warm) {
    if (!warm) return;
    if (warm->id != spec.id)
        throw Error("learners", "warm-start classifier mismatch");
    if (warm->n_features != x.cols() || warm->n_classes != n_classes)
        throw Error("learners", "warm-start dimension mismatch");
    auto strip = [](nlohmann::json p) {
        p.erase("max_iter");
        return p;
    };
    if (strip(warm->hyperparams) != strip(spec.params))
        throw Error("learners",
                    "warm start requires identical hyperparameters except the iteration budget");
}

TrainedModel train_linear_family(const ModelSpec& spec, const Matrix& x,
                                 const std::vector<int>& y, std::size_t n_classes,
                                 const TrainedModel* warm) {
    TrainedModel model;
    model.id = spec.id;
    model.n_classes = n_classes;
    model.n_features = x.cols();
    const long budget = spec.get<long>("max_iter", 1000);
    const double tol = spec.get<double>("tol", 1e-4);
    const double c_value = spec.get<double>("C", 1.0);
    const bool multinomial = spec.id == ClassifierId::logistic_regression &&
                             spec.get<std::string>("multi_class", "ovr") == "multinomial";
    const std::string solver = spec.get<std::string>("solver", "gradient");
    const bool l1 = spec.get<std::string>("penalty", "l2") == "l1";
    if (spec.id == ClassifierId::logistic_regression && solver == "newton" && l1)
        throw Error("learners", "newton solver supports l2 only");

    if (multinomial) {
        SoftmaxState s;
        long epochs = 0;
        bool converged = false;
        if (warm) {
            s.w = warm->weights;
            s.b = warm->intercepts;
            epochs = warm->iterations_run.empty() ? 0 : warm->iterations_run[0];
            converged = !warm->converged.empty() && warm->converged[0];
        } else {
            s.w = Matrix(n_classes, x.cols());
            s.b.assign(n_classes, 0.0);
        }
        if (!converged) {
            long done = 0;
            if (solver == "newton")
                lr_newton_multinomial(x, y, n_classes, c_value, tol, budget, s, done, converged);
            else
                lr_gradient_multinomial(x, y, n_classes, c_value, l1, tol, budget, s, done,
                                        converged);
            epochs += done;
        }
        model.multinomial = true;
        model.weights = std::move(s.w);
        model.intercepts = std::move(s.b);
        model.iterations_run.assign(1, epochs);
        model.converged.assign(1, converged ? 1 : 0);
        model.cap_hit = !converged;
        return model;
    }

    const std::size_t machines = n_classes == 2 ? 1 : n_classes;
    model.weights = Matrix(machines, x.cols());
    model.intercepts.assign(machines, 0.0);
    model.iterations_run.assign(machines, 0);
    model.converged.assign(machines, 0);
    double objective = 0.0;
    for (std::size_t mi = 0; mi < machines; ++mi) {
        const int positive = machines == 1 ? 1 : static_cast<int>(mi);
        auto ypm = binary_targets(y, positive);
        std::vector<double> w(x.cols(), 0.0);
        double b = 0.0;
        long epoch_abs = 0;
        bool converged = false;
        if (warm) {
            for (std::size_t j = 0; j < x.cols(); ++j) w[j] = warm->weights(mi, j);
            b = warm->intercepts[mi];
            epoch_abs = warm->iterations_run[mi];
            converged = warm->converged[mi] != 0;
        }
        if (!converged) {
            switch (spec.id) {
                case ClassifierId::perceptron:
                    perceptron_machine(x, ypm, spec, mi, budget, w, b, epoch_abs, converged);
                    break;
                case ClassifierId::linear_svm:
                    linear_svm_machine(x, ypm, spec, budget, w, b, epoch_abs, converged);
                    break;
                case ClassifierId::logistic_regression: {
                    long done = 0;
                    if (solver == "newton")
                        lr_newton_binary(x, ypm, c_value, tol, budget, w, b, done, converged);
                    else
                        lr_gradient_binary(x, ypm, c_value, l1, tol, budget, w, b, done,
                                           converged);
                    epoch_abs += done;
                    break;
                }
                default:
                    break;
            }
        }
        for (std::size_t j = 0; j < x.cols(); ++j) model.weights(mi, j) = w[j];
        model.intercepts[mi] = b;
        model.iterations_run[mi] = epoch_abs;
        model.converged[mi] = converged ? 1 : 0;
        if (spec.id == ClassifierId::logistic_regression)
            objective += logreg_binary_objective(x, ypm, w, b, c_value, l1);
        else if (spec.id == ClassifierId::linear_svm &&
                 spec.get<std::string>("loss", "hinge") == "squared_hinge")
            objective += squared_hinge_objective(x, ypm, w, b, c_value);
    }
    model.final_objective = objective;
    for (std::size_t mi = 0; mi < machines; ++mi)
        if (!model.converged[mi]) model.cap_hit = true;
    return model;
}

TrainedModel train_kernel_svm(const ModelSpec& spec, const Matrix& x,
                              const std::vector<int>& y, std::size_t n_classes) {
    TrainedModel model;
    model.id = spec.id;
    model.n_classes = n_classes;
    model.n_features = x.cols();
    model.kparams.kind = kernel_kind_from_string(spec.get<std::string>("kernel", "rbf"));
    model.kparams.gamma = spec.get<double>("gamma", 1.0 / static_cast<double>(x.cols()));
    model.kparams.coef0 = spec.get<double>("coef0", 0.0);
    model.kparams.degree = static_cast<int>(spec.get<long>("degree", 3));
    const double c_value = spec.get<double>("C", 1.0);
    const double tol = spec.get<double>("tol", 1e-3);
    const long cap = spec.get<long>("smo_max_iter", 200000);

    const Matrix gram = gram_matrix(x, x, model.kparams);
    const std::size_t machines = n_classes == 2 ? 1 : n_classes;
    double objective = 0.0;
    for (std::size_t mi = 0; mi < machines; ++mi) {
        const int positive = machines == 1 ? 1 : static_cast<int>(mi);
        auto ypm = binary_targets(y, positive);
        auto res = smo_solve(gram, ypm, c_value, tol, cap);
        BinaryKernelMachine machine;
        std::vector<std::size_t> support;
        for (std::size_t i = 0; i < res.alpha.size(); ++i)
            if (res.alpha[i] > 1e-12) support.push_back(i);
        machine.support_vectors = select_rows(x, support);
        for (std::size_t i : support) machine.dual_coef.push_back(res.alpha[i] * ypm[i]);
        machine.intercept = res.intercept;
        machine.kkt_violation = res.kkt_violation;
        model.machines.push_back(std::move(machine));
        model.iterations_run.push_back(res.iterations);
        model.converged.push_back(res.cap_hit ? 0 : 1);
        if (res.cap_hit) model.cap_hit = true;
        objective += res.dual_objective;
    }
    model.final_objective = objective;
    return model;
}

}  // namespace

TrainedModel train(const ModelSpec& spec, const Matrix& x, const std::vector<int>& y,
                   std::size_t n_classes, const TrainedModel* warm) {
    if (x.rows() == 0 || x.rows() != y.size())
        throw Error("learners", "training data dimension mismatch");
    check_warm_compat(spec, x, n_classes, warm);
    TrainedModel model = spec.id == ClassifierId::kernel_svm
                             ? train_kernel_svm(spec, x, y, n_classes)
                             : train_linear_family(spec, x, y, n_classes, warm);
    model.hyperparams = spec.params;
    return model;
}

Matrix decision_values(const TrainedModel& model, const Matrix& x) {
    if (x.cols() != model.n_features)
        throw Error("learners", "feature count mismatch at prediction time");
    Matrix scores(x.rows(), model.n_classes);
    if (model.id == ClassifierId::kernel_svm) {
        for (std::size_t mi = 0; mi < model.machines.size(); ++mi) {
            const auto& machine = model.machines[mi];
            const Matrix k = gram_matrix(x, machine.support_vectors, model.kparams);
            for (std::size_t i = 0; i < x.rows(); ++i) {
                double f = machine.intercept;
                for (std::size_t s = 0; s < machine.dual_coef.size(); ++s)
                    f += machine.dual_coef[s] * k(i, s);
                if (model.machines.size() == 1) {
                    scores(i, 0) = -f;
                    scores(i, 1) = f;
                } else {
                    scores(i, mi) = f;
                }
            }
        }
        return scores;
    }
    const Matrix raw = linear_scores(x, model.weights, model.intercepts);
    if (model.multinomial || model.weights.rows() == model.n_classes) {
        return raw;
    }
    // single binary machine
    for (std::size_t i = 0; i < x.rows(); ++i) {
        scores(i, 0) = -raw(i, 0);
        scores(i, 1) = raw(i, 0);
    }
    return scores;
}

std::vector<int> predict(const TrainedModel& model, const Matrix& x) {
    const Matrix scores = decision_values(model, x);
    std::vector<int> labels(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        int best = 0;
        for (std::size_t c = 1; c < model.n_classes; ++c)
            if (scores(i, c) > scores(i, best)) best = static_cast<int>(c);
        labels[i] = best;
    }
    return labels;
}

nlohmann::json model_to_json(const TrainedModel& model) {
    nlohmann::json doc;
    doc["format_version"] = 1;
    doc["classifier_id"] = to_string(model.id);
    doc["hyperparameters"] = model.hyperparams;
    doc["n_classes"] = model.n_classes;
    doc["n_features"] = model.n_features;
    doc["iterations_run"] = model.iterations_run;
    doc["cap_hit"] = model.cap_hit;
    if (model.id == ClassifierId::kernel_svm) {
        doc["kernel"] = to_string(model.kparams.kind);
        doc["gamma"] = model.kparams.gamma;
        nlohmann::json machines = nlohmann::json::array();
        for (const auto& m : model.machines) {
            machines.push_back({{"n_support", m.dual_coef.size()},
                                {"dual_coef", m.dual_coef},
                                {"intercept", m.intercept},
                                {"kkt_violation", m.kkt_violation}});
        }
        doc["machines"] = machines;
    } else {
        doc["multinomial"] = model.multinomial;
        doc["weights"] = model.weights.data();
        doc["intercepts"] = model.intercepts;
    }
    return doc;
}

}  // namespace sketchml
