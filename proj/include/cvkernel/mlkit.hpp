#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cvkernel/closedforms.hpp"
#include "cvkernel/engine.hpp"
#include "cvkernel/errors.hpp"
#include "cvkernel/numeric.hpp"
#include "cvkernel/stellar.hpp"

namespace cvkernel::mlkit {

using Point = std::array<double, 2>;

struct CircleSet {
    double inner_ratio = 0.75;
    double scale = 1.0;
};

struct DatasetSpec {
    int variant = 1; // 1: tight circles, 2: variant 1 with flipped upper half, 3: wide + noisy
    int n_per_circle_set = 500;
    double noise = 0.05;
    std::vector<CircleSet> radii;
    bool flip_above_y0 = false;
    std::uint64_t seed = 42;
};

inline DatasetSpec dataset_defaults(int variant, std::uint64_t seed) {
    DatasetSpec s;
    s.variant = variant;
    s.seed = seed;
    switch (variant) {
        case 1:
        case 2:
            // six equally spaced rings at radius 0.4k with alternating labels
            s.radii = {{0.5, 0.8}, {0.75, 1.6}, {5.0 / 6.0, 2.4}};
            s.noise = 0.05;
            break;
        case 3:
            s.radii = {{0.3, 1.0}, {0.8, 2.5}, {0.9, 4.0}};
            s.noise = 0.3;
            break;
        default:
            throw RangeError("dataset variant must be 1, 2 or 3");
    }
    s.flip_above_y0 = (variant == 2);
    return s;
}

struct Dataset {
    std::vector<Point> points;
    std::vector<int> labels; // 0 inner circle, 1 outer circle (pre-flip)
    DatasetSpec spec;
};

/// Concentric-circles data: per circle set, points equally spaced on the
/// outer and inner circles with isotropic Gaussian coordinate noise.
inline Dataset make_annular(const DatasetSpec& spec) {
    if (spec.noise < 0.0) throw DomainError("make_annular: noise must be nonnegative");
    if (spec.n_per_circle_set < 2 || (spec.n_per_circle_set & 1))
        throw RangeError("make_annular: points per circle set must be even and >= 2");
    for (const auto& cs : spec.radii)
        if (!(cs.inner_ratio > 0.0 && cs.inner_ratio < 1.0))
            throw DomainError("make_annular: inner ratio must lie in (0,1)");

    Dataset ds;
    ds.spec = spec;
    Rng rng(spec.seed);
    const int half = spec.n_per_circle_set / 2;
    for (const auto& cs : spec.radii) {
        for (int pass = 0; pass < 2; ++pass) {
            const double r = pass == 0 ? cs.scale : cs.inner_ratio * cs.scale;
            const int label = pass == 0 ? 1 : 0;
            for (int i = 0; i < half; ++i) {
                const double th = 2.0 * M_PI * i / half;
                Point p{r * std::cos(th) + rng.normal(0.0, spec.noise),
                        r * std::sin(th) + rng.normal(0.0, spec.noise)};
                ds.points.push_back(p);
                ds.labels.push_back(label);
            }
        }
    }
    if (spec.flip_above_y0) {
        for (std::size_t i = 0; i < ds.points.size(); ++i)
            if (ds.points[i][1] > 0.0) ds.labels[i] = 1 - ds.labels[i];
    }
    return ds;
}

enum class Family { DisplacedFock, Coherent, Qudit, General, CatTruncation };

inline std::string family_name(Family f) {
    switch (f) {
        case Family::DisplacedFock: return "displaced-fock";
        case Family::Coherent: return "coherent";
        case Family::Qudit: return "qudit";
        case Family::General: return "general";
        default: return "cat-truncation";
    }
}

inline Family family_from_name(const std::string& s) {
    if (s == "displaced-fock") return Family::DisplacedFock;
    if (s == "coherent") return Family::Coherent;
    if (s == "qudit") return Family::Qudit;
    if (s == "general") return Family::General;
    if (s == "cat-truncation") return Family::CatTruncation;
    throw RangeError("unknown encoding family: " + s);
}

struct KernelSpec {
    Family family = Family::DisplacedFock;
    int n = 0;                    // stellar rank / cat truncation rank
    int d = 2;                    // qudit dimension
    double bandwidth = 1.0;
    stellar::CatParity parity = stellar::CatParity::Even;

    std::string canonical() const {
        std::ostringstream os;
        os << family_name(family) << ";n=" << n << ";d=" << d
           << ";c=" << format_double(bandwidth)
           << ";parity=" << (parity == stellar::CatParity::Even ? "even" : "odd");
        return os.str();
    }
};

/// Kernel value between two 2-D data points under the given encoding.
/// Displaced-Fock/coherent use the radial Laguerre form; cat truncations go
/// through the general engine.
inline double kernel_value(const KernelSpec& ks, const Point& a, const Point& b) {
    switch (ks.family) {
        case Family::DisplacedFock:
        case Family::Coherent: {
            const int n = ks.family == Family::Coherent ? 0 : ks.n;
            // scale each point first so bandwidth c on (a, b) is bit-identical
            // to c = 1 on pre-scaled data
            const double dx = ks.bandwidth * a[0] - ks.bandwidth * b[0];
            const double dy = ks.bandwidth * a[1] - ks.bandwidth * b[1];
            const double s2 = dx * dx + dy * dy;
            return closedforms::displaced_fock_kernel_laguerre(s2, n);
        }
        case Family::CatTruncation: {
            const cxd aa = ks.bandwidth * cxd{a[0], a[1]};
            const cxd ab = ks.bandwidth * cxd{b[0], b[1]};
            const auto f1 = stellar::encode_cat_truncated(aa, ks.n, ks.parity);
            const auto f2 = stellar::encode_cat_truncated(ab, ks.n, ks.parity);
            return engine::kernel(f1.state, f2.state);
        }
        default:
            throw DomainError("kernel_value: family is not a 2-D point encoding");
    }
}

struct GramMatrix {
    int n = 0;
    std::vector<double> values;
    std::uint64_t kernel_spec_hash = 0;
    std::uint64_t dataset_hash = 0;

    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * n + j]; }
    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * n + j]; }
};

inline std::uint64_t hash_points(const std::vector<Point>& pts) {
    std::string bytes;
    bytes.reserve(pts.size() * 32);
    for (const auto& p : pts) {
        bytes += format_double(p[0]);
        bytes += ',';
        bytes += format_double(p[1]);
        bytes += ';';
    }
    return fnv1a(bytes);
}

/// Symmetric Gram matrix; only the upper triangle is evaluated. Entries are
/// pure kernel calls, so rows are distributed over threads.
inline GramMatrix gram(const std::vector<Point>& pts, const KernelSpec& ks, int threads = 0) {
    const int n = static_cast<int>(pts.size());
    GramMatrix g;
    g.n = n;
    g.values.assign(static_cast<std::size_t>(n) * n, 0.0);
    g.kernel_spec_hash = fnv1a(ks.canonical());
    g.dataset_hash = hash_points(pts);

    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, n));

    std::exception_ptr first_error = nullptr;
    std::mutex err_mutex;
    auto worker = [&](int t0) {
        try {
            for (int i = t0; i < n; i += threads) {
                for (int j = i; j < n; ++j) g.at(i, j) = kernel_value(ks, pts[i], pts[j]);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(err_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };
    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) g.at(i, j) = g.at(j, i);
    return g;
}

struct SvmConfig {
    double C = 1.0;
    double tol = 1e-3;
    int max_passes = 50;
    std::vector<double>* objective_trace = nullptr; // optional per-pass dual objective
};

struct TrainedClassifier {
    std::vector<int> support;          // indices into the training set
    std::vector<double> dual_coeffs;   // alpha_i * y_i per support vector
    std::vector<Point> support_points; // filled by fit()
    double bias = 0.0;
    KernelSpec kernel_spec;
    double C = 1.0;
};

/// Non-convergence after the pass cap; carries the best iterate found.
struct ConvergenceError : Error {
    TrainedClassifier best;
    ConvergenceError(const std::string& msg, TrainedClassifier model)
        : Error(msg), best(std::move(model)) {}
};

inline double dual_objective(const GramMatrix& g, const std::vector<int>& y,
                             const std::vector<double>& alpha) {
    const int n = g.n;
    double obj = 0.0;
    for (int i = 0; i < n; ++i) obj += alpha[i];
    for (int i = 0; i < n; ++i) {
        if (alpha[i] == 0.0) continue;
        for (int j = 0; j < n; ++j) {
            if (alpha[j] == 0.0) continue;
            obj -= 0.5 * alpha[i] * alpha[j] * y[i] * y[j] * g.at(i, j);
        }
    }
    return obj;
}

namespace detail {

struct SmoState {
    const GramMatrix& g;
    const std::vector<int>& y;
    double C, tol;
    std::vector<double> alpha;
    std::vector<double> err; // f(x_i) - y_i
    double b = 0.0;

    static constexpr double kBoundEps = 1e-8; // snap band around 0 and C

    bool non_bound(int i) const {
        return alpha[i] > kBoundEps * C && alpha[i] < C * (1.0 - kBoundEps);
    }

    double kmat(int i, int j) const {
        double v = g.at(i, j);
        if (i == j) v += 1e-10; // PSD jitter
        return v;
    }

    bool take_step(int i1, int i2) {
        if (i1 == i2) return false;
        const double a1 = alpha[i1], a2 = alpha[i2];
        const int y1 = y[i1], y2 = y[i2];
        const double e1 = err[i1], e2 = err[i2];
        const double s = y1 * y2;
        double lo, hi;
        if (y1 != y2) {
            lo = std::max(0.0, a2 - a1);
            hi = std::min(C, C + a2 - a1);
        } else {
            lo = std::max(0.0, a1 + a2 - C);
            hi = std::min(C, a1 + a2);
        }
        if (lo >= hi) return false;
        const double k11 = kmat(i1, i1), k12 = kmat(i1, i2), k22 = kmat(i2, i2);
        const double eta = k11 + k22 - 2.0 * k12;
        if (eta <= 0.0) return false; // flat direction; PSD jitter makes this rare
        double a2new = a2 + y2 * (e1 - e2) / eta;
        a2new = std::clamp(a2new, lo, hi);
        if (a2new < kBoundEps * C)
            a2new = 0.0;
        else if (a2new > C * (1.0 - kBoundEps))
            a2new = C;
        if (std::abs(a2new - a2) < 1e-12 * (a2new + a2 + 1e-12)) return false;
        const double a1new = a1 + s * (a2 - a2new); // equality constraint stays exact

        const double d1 = y1 * (a1new - a1), d2 = y2 * (a2new - a2);
        const double b1 = b - e1 - d1 * k11 - d2 * k12;
        const double b2 = b - e2 - d1 * k12 - d2 * k22;
        double bnew;
        if (a1new > 0.0 && a1new < C)
            bnew = b1;
        else if (a2new > 0.0 && a2new < C)
            bnew = b2;
        else
            bnew = 0.5 * (b1 + b2);


        const int n = g.n;
        for (int i = 0; i < n; ++i) err[i] += d1 * kmat(i1, i) + d2 * kmat(i2, i) + (bnew - b);
        alpha[i1] = a1new;
        alpha[i2] = a2new;
        b = bnew;
        return true;
    }

    bool examine(int i2) {
        const double e2 = err[i2];
        const double r2 = e2 * y[i2];
        if (!((r2 < -tol && alpha[i2] < C) || (r2 > tol && alpha[i2] > 0.0))) return false;
        const int n = g.n;
        // second-choice heuristic: largest |E1 - E2| among non-bound points
        int best = -1;
        double best_gap = -1.0;
        for (int i = 0; i < n; ++i) {
            if (!non_bound(i)) continue;
            const double gap = std::abs(err[i] - e2);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best >= 0 && take_step(best, i2)) return true;
        for (int i = 0; i < n; ++i)
            if (non_bound(i) && take_step(i, i2)) return true;
        for (int i = 0; i < n; ++i)
            if (take_step(i, i2)) return true;
        return false;
    }
};

} // namespace detail

/// Soft-margin dual SVM via SMO with a deterministic working-set order.
inline TrainedClassifier train_svm(const GramMatrix& g, const std::vector<int>& labels,
                                   const SvmConfig& cfg = {}) {
    const int n = g.n;
    if (static_cast<int>(labels.size()) != n) throw ShapeError("train_svm: label count mismatch");
    bool has0 = false, has1 = false;
    for (int l : labels) (l ? has1 : has0) = true;
    if (!has0 || !has1) throw DegenerateLabelsError("train_svm: training set has a single class");

    std::vector<int> y(n);
    for (int i = 0; i < n; ++i) y[i] = labels[i] ? 1 : -1;

    detail::SmoState st{g, y, cfg.C, cfg.tol, std::vector<double>(n, 0.0),
                        std::vector<double>(n), 0.0};
    for (int i = 0; i < n; ++i) st.err[i] = -y[i];

    auto snapshot = [&]() {
        TrainedClassifier model;
        model.C = cfg.C;
        model.bias = st.b;
        for (int i = 0; i < n; ++i) {
            if (st.alpha[i] > detail::SmoState::kBoundEps * cfg.C) {
                model.support.push_back(i);
                model.dual_coeffs.push_back(st.alpha[i] * y[i]);
            }
        }
        return model;
    };

    bool examine_all = true;
    int changed = 0;
    int passes = 0; // full passes over the data; working-set sweeps are free
    while (changed > 0 || examine_all) {
        if (examine_all && passes++ >= cfg.max_passes)
            throw ConvergenceError("train_svm: no convergence after pass cap", snapshot());
        changed = 0;
        for (int i = 0; i < n; ++i) {
            if (!examine_all && !st.non_bound(i)) continue;
            changed += st.examine(i) ? 1 : 0;
        }
        if (cfg.objective_trace) cfg.objective_trace->push_back(dual_objective(g, y, st.alpha));
        if (examine_all)
            examine_all = false;
        else if (changed == 0)
            examine_all = true;
    }
    return snapshot();
}

/// Largest KKT violation over the trained multipliers (0 at exact optimum).
inline double kkt_violation(const GramMatrix& g, const std::vector<int>& labels,
                            const TrainedClassifier& model) {
    const int n = g.n;
    std::vector<double> ay(n, 0.0);
    for (std::size_t s = 0; s < model.support.size(); ++s)
        ay[model.support[s]] = model.dual_coeffs[s];
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        double f = model.bias;
        for (int j = 0; j < n; ++j) f += ay[j] * g.at(j, i);
        const int yi = labels[i] ? 1 : -1;
        const double margin = yi * f;
        const double a = std::abs(ay[i]);
        const double eps = 1e-8 * model.C;
        if (a <= eps)
            worst = std::max(worst, 1.0 - margin); // should have margin >= 1
        else if (a >= model.C - eps)
            worst = std::max(worst, margin - 1.0); // should have margin <= 1
        else
            worst = std::max(worst, std::abs(margin - 1.0));
    }
    return worst;
}

struct Prediction {
    std::vector<int> labels;
    std::vector<double> decision_values;
};

inline Prediction predict(const TrainedClassifier& model, const std::vector<Point>& pts) {
    if (model.support_points.size() != model.support.size())
        throw ShapeError("predict: model has no support points attached");
    Prediction out;
    out.labels.reserve(pts.size());
    out.decision_values.reserve(pts.size());
    for (const auto& p : pts) {
        double f = model.bias;
        for (std::size_t s = 0; s < model.support.size(); ++s)
            f += model.dual_coeffs[s] * kernel_value(model.kernel_spec, model.support_points[s], p);
        out.decision_values.push_back(f);
        out.labels.push_back(f >= 0.0 ? 1 : 0);
    }
    return out;
}

struct GridBounds {
    double x_min = -4.0, x_max = 4.0, y_min = -4.0, y_max = 4.0;
};

struct GridRow {
    double x1, x2, decision;
    int label;
};

inline std::vector<GridRow> decision_grid(const TrainedClassifier& model, const GridBounds& b,
                                          int resolution) {
    if (resolution < 1 || resolution > 512)
        throw RangeError("decision_grid: resolution out of [1,512]");
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(resolution) * resolution);
    for (int iy = 0; iy < resolution; ++iy) {
        for (int ix = 0; ix < resolution; ++ix) {
            const double fx = resolution == 1 ? 0.5 : static_cast<double>(ix) / (resolution - 1);
            const double fy = resolution == 1 ? 0.5 : static_cast<double>(iy) / (resolution - 1);
            pts.push_back({b.x_min + fx * (b.x_max - b.x_min),
                           b.y_min + fy * (b.y_max - b.y_min)});
        }
    }
    const Prediction pr = predict(model, pts);
    std::vector<GridRow> rows;
    rows.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        rows.push_back({pts[i][0], pts[i][1], pr.decision_values[i], pr.labels[i]});
    return rows;
}

inline void write_grid_csv(const std::string& path, const std::vector<GridRow>& rows) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open grid output: " + path);
    os << "x1,x2,decision,label\n";
    for (const auto& r : rows)
        os << format_double(r.x1) << ',' << format_double(r.x2) << ','
           << format_double(r.decision) << ',' << r.label << '\n';
}

inline void write_dataset_csv(const std::string& path, const Dataset& ds) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open dataset output: " + path);
    os << "x1,x2,label\n";
    for (std::size_t i = 0; i < ds.points.size(); ++i)
        os << format_double(ds.points[i][0]) << ',' << format_double(ds.points[i][1]) << ','
           << ds.labels[i] << '\n';
}

struct Split {
    std::vector<int> train_idx, test_idx;
};

inline Split train_test_split(int n, double train_fraction, std::uint64_t seed) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    Rng rng(seed ^ 0x9E3779B97F4A7C15ULL);
    for (int i = n - 1; i > 0; --i) std::swap(idx[i], idx[rng.uniform_int(0, i)]);
    const int cut = static_cast<int>(std::lround(train_fraction * n));
    Split sp;
    sp.train_idx.assign(idx.begin(), idx.begin() + cut);
    sp.test_idx.assign(idx.begin() + cut, idx.end());
    return sp;
}

struct ExperimentReport {
    int variant = 1;
    KernelSpec encoding;
    std::uint64_t seed = 42;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    int support_count = 0;
    double wall_time_ms = -1.0; // negative means "not recorded"
    std::string grid_path;
};

struct ExperimentResult {
    ExperimentReport report;
    TrainedClassifier model;
    Dataset dataset;
    Split split;
    std::vector<GridRow> grid;
};

inline double accuracy(const std::vector<int>& truth, const std::vector<int>& pred) {
    int hit = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hit += truth[i] == pred[i] ? 1 : 0;
    return truth.empty() ? 0.0 : static_cast<double>(hit) / truth.size();
}

/// One full learning run: generate, split 75/25, train, evaluate, grid.
inline ExperimentResult run_experiment(int variant, const KernelSpec& ks, std::uint64_t seed,
                                       int grid_resolution = 64, int threads = 0,
                                       const SvmConfig& svm_cfg = {}) {
    ExperimentResult res;
    res.dataset = make_annular(dataset_defaults(variant, seed));
    const int n = static_cast<int>(res.dataset.points.size());
    res.split = train_test_split(n, 0.75, seed);

    std::vector<Point> train_pts, test_pts;
    std::vector<int> train_labels, test_labels;
    for (int i : res.split.train_idx) {
        train_pts.push_back(res.dataset.points[i]);
        train_labels.push_back(res.dataset.labels[i]);
    }
    for (int i : res.split.test_idx) {
        test_pts.push_back(res.dataset.points[i]);
        test_labels.push_back(res.dataset.labels[i]);
    }

    const GramMatrix g = gram(train_pts, ks, threads);
    res.model = train_svm(g, train_labels, svm_cfg);
    res.model.kernel_spec = ks;
    for (int s : res.model.support) res.model.support_points.push_back(train_pts[s]);

    const Prediction on_train = predict(res.model, train_pts);
    const Prediction on_test = predict(res.model, test_pts);

    GridBounds bounds;
    double extent = 0.0;
    for (const auto& p : res.dataset.points)
        extent = std::max({extent, std::abs(p[0]), std::abs(p[1])});
    extent *= 1.1;
    bounds = {-extent, extent, -extent, extent};
    res.grid = decision_grid(res.model, bounds, grid_resolution);

    res.report.variant = variant;
    res.report.encoding = ks;
    res.report.seed = seed;
    res.report.train_accuracy = accuracy(train_labels, on_train.labels);
    res.report.test_accuracy = accuracy(test_labels, on_test.labels);
    res.report.support_count = static_cast<int>(res.model.support.size());
    return res;
}

} // namespace cvkernel::mlkit
