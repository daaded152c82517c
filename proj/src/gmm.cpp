/*
 * SPDX-FileCopyrightText: Copyright 2026 the emscope project
 * SPDX-License-Identifier: Apache-2.0
 */

#include "emscope/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "emscope/error.hpp"

namespace emscope::gmm {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

struct Params {
    std::vector<double> weights;
    std::vector<Vec2> means;
    std::vector<Mat2> covs;
};

double min_eigenvalue(const Mat2& c) {
    const double tr = c.xx + c.yy;
    const double d = std::sqrt((c.xx - c.yy) * (c.xx - c.yy) + 4.0 * c.xy * c.xy);
    return 0.5 * (tr - d);
}

// Adds cov_floor to the diagonal when the determinant or an eigenvalue falls
// below the floor. One addition restores the eigenvalue invariant for any
// positive-semidefinite input; the short loop only guards against roundoff.
bool apply_floor(Mat2& c, double cov_floor) {
    bool floored = false;
    const double det = c.xx * c.yy - c.xy * c.xy;
    if (det < cov_floor || min_eigenvalue(c) < cov_floor) {
        c.xx += cov_floor;
        c.yy += cov_floor;
        floored = true;
    }
    for (int guard = 0; guard < 4 && min_eigenvalue(c) < cov_floor; ++guard) {
        c.xx += cov_floor;
        c.yy += cov_floor;
        floored = true;
    }
    return floored;
}

struct EStepResult {
    double log_likelihood = 0.0;
    double max_row_error = 0.0;
};

EStepResult e_step(std::span<const Vec2> pts, const Params& p, std::vector<double>& resp) {
    const std::size_t n = pts.size();
    const std::size_t k = p.weights.size();
    // Per-component log-density constants.
    std::vector<double> log_norm(k), ixx(k), ixy(k), iyy(k);
    for (std::size_t j = 0; j < k; ++j) {
        const Mat2& c = p.covs[j];
        const double det = c.xx * c.yy - c.xy * c.xy;
        const double inv_det = 1.0 / det;
        ixx[j] = c.yy * inv_det;
        ixy[j] = -c.xy * inv_det;
        iyy[j] = c.xx * inv_det;
        log_norm[j] = std::log(p.weights[j]) - kLog2Pi - 0.5 * std::log(det);
    }
    EStepResult out;
    std::vector<double> lp(k);
    for (std::size_t i = 0; i < n; ++i) {
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j) {
            const double dx = pts[i].x - p.means[j].x;
            const double dy = pts[i].y - p.means[j].y;
            const double q = ixx[j] * dx * dx + 2.0 * ixy[j] * dx * dy + iyy[j] * dy * dy;
            lp[j] = log_norm[j] - 0.5 * q;
            m = std::max(m, lp[j]);
        }
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double r = std::exp(lp[j] - m);
            resp[i * k + j] = r;
            sum += r;
        }
        const double inv_sum = 1.0 / sum;
        double row = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            resp[i * k + j] *= inv_sum;
            row += resp[i * k + j];
        }
        out.max_row_error = std::max(out.max_row_error, std::abs(row - 1.0));
        out.log_likelihood += m + std::log(sum);
    }
    return out;
}

struct MStepResult {
    bool floored = false;
    bool collapsed = false;
};

MStepResult m_step(std::span<const Vec2> pts, const std::vector<double>& resp, const FitConfig& cfg,
                   Params& p) {
    const std::size_t n = pts.size();
    const std::size_t k = p.weights.size();
    MStepResult out;
    for (std::size_t j = 0; j < k; ++j) {
        double nj = 0.0, sx = 0.0, sy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = resp[i * k + j];
            nj += r;
            sx += r * pts[i].x;
            sy += r * pts[i].y;
        }
        if (nj < 1e-10 * static_cast<double>(n)) {
            out.collapsed = true;
            return out;
        }
        const double inv_nj = 1.0 / nj;
        const Vec2 mu{sx * inv_nj, sy * inv_nj};
        double cxx = 0.0, cxy = 0.0, cyy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = resp[i * k + j];
            const double dx = pts[i].x - mu.x;
            const double dy = pts[i].y - mu.y;
            cxx += r * dx * dx;
            cxy += r * dx * dy;
            cyy += r * dy * dy;
        }
        Mat2 cov{cxx * inv_nj, cxy * inv_nj, cyy * inv_nj};
        if (cfg.covariance == CovType::diagonal) cov.xy = 0.0;
        if (apply_floor(cov, cfg.cov_floor)) out.floored = true;
        p.weights[j] = nj / static_cast<double>(n);
        p.means[j] = mu;
        p.covs[j] = cov;
    }
    return out;
}

}  // namespace

std::pair<std::vector<Vec2>, Standardization> standardize(std::span<const Vec2> points) {
    if (points.size() < 2) throw Error("TooFewPoints", "standardize needs >= 2 points");
    Standardization tr;
    double mx = 0.0, my = 0.0;
    for (const auto& p : points) {
        mx += p.x;
        my += p.y;
    }
    const double inv_n = 1.0 / static_cast<double>(points.size());
    mx *= inv_n;
    my *= inv_n;
    double vx = 0.0, vy = 0.0;
    for (const auto& p : points) {
        vx += (p.x - mx) * (p.x - mx);
        vy += (p.y - my) * (p.y - my);
    }
    vx *= inv_n;
    vy *= inv_n;
    tr.mean = {mx, my};
    tr.scale = {vx > 0.0 ? std::sqrt(vx) : 1.0, vy > 0.0 ? std::sqrt(vy) : 1.0};
    std::vector<Vec2> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        out[i] = {(points[i].x - tr.mean.x) / tr.scale.x, (points[i].y - tr.mean.y) / tr.scale.y};
    return {std::move(out), tr};
}

GmmModel to_original_units(const GmmModel& model, const Standardization& t) {
    GmmModel out = model;
    for (auto& m : out.means) m = {m.x * t.scale.x + t.mean.x, m.y * t.scale.y + t.mean.y};
    for (auto& c : out.covariances)
        c = {c.xx * t.scale.x * t.scale.x, c.xy * t.scale.x * t.scale.y,
             c.yy * t.scale.y * t.scale.y};
    return out;
}

std::vector<Vec2> kmeanspp_init(std::span<const Vec2> points, int k, Prng& rng) {
    if (k < 1) throw Error("KTooLarge", "k must be >= 1");
    std::vector<Vec2> distinct(points.begin(), points.end());
    std::sort(distinct.begin(), distinct.end(), [](const Vec2& a, const Vec2& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    distinct.erase(std::unique(distinct.begin(), distinct.end(),
                               [](const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }),
                   distinct.end());
    if (static_cast<std::size_t>(k) > distinct.size())
        throw Error("KTooLarge", "k=" + std::to_string(k) + " exceeds " +
                                     std::to_string(distinct.size()) + " distinct points");

    std::vector<Vec2> centers;
    centers.reserve(static_cast<std::size_t>(k));
    auto first = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(points.size()));
    if (first >= points.size()) first = points.size() - 1;
    centers.push_back(points[first]);

    std::vector<double> d2(points.size());
    while (centers.size() < static_cast<std::size_t>(k)) {
        double total = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centers) {
                const double dx = points[i].x - c.x;
                const double dy = points[i].y - c.y;
                best = std::min(best, dx * dx + dy * dy);
            }
            d2[i] = best;
            total += best;
        }
        // total > 0 is guaranteed while centers < distinct points.
        double r = rng.uniform01() * total;
        std::size_t pick = points.size() - 1;
        for (std::size_t i = 0; i < points.size(); ++i) {
            r -= d2[i];
            if (r <= 0.0 && d2[i] > 0.0) {
                pick = i;
                break;
            }
        }
        if (d2[pick] == 0.0) {
            // Walk to a point that is not already a center.
            for (std::size_t i = 0; i < points.size(); ++i) {
                if (d2[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
        }
        centers.push_back(points[pick]);
    }
    return centers;
}

GmmModel em_fit(std::span<const Vec2> points, int k, const FitConfig& cfg, Prng& rng,
                FitTrace* trace) {
    const std::size_t n = points.size();
    if (k < 1) throw Error("KTooLarge", "k must be >= 1");
    if (n < static_cast<std::size_t>(k))
        throw Error("KTooLarge", "n_points < k");

    GmmModel best;
    bool have_best = false;
    std::vector<double> resp(n * static_cast<std::size_t>(k));

    for (int restart = 0; restart < cfg.n_restarts; ++restart) {
        Params p;
        p.means = kmeanspp_init(points, k, rng);
        p.weights.assign(static_cast<std::size_t>(k), 1.0 / static_cast<double>(k));
        p.covs.assign(static_cast<std::size_t>(k), Mat2{1.0, 0.0, 1.0});
        for (auto& c : p.covs) apply_floor(c, cfg.cov_floor);

        std::vector<IterationRecord>* rec = nullptr;
        if (trace) {
            trace->restarts.emplace_back();
            rec = &trace->restarts.back();
        }

        double prev_ll = -std::numeric_limits<double>::infinity();
        bool floored_last = false;
        bool collapsed = false;
        bool converged = false;
        int iters = 0;
        double ll = 0.0;
        for (;;) {
            const EStepResult e = e_step(points, p, resp);
            ll = e.log_likelihood;
            if (rec) {
                IterationRecord r;
                r.log_likelihood = ll;
                r.after_floor = floored_last;
                r.weight_sum_error = 0.0;
                double wsum = 0.0;
                double min_eig = std::numeric_limits<double>::infinity();
                for (std::size_t j = 0; j < p.weights.size(); ++j) {
                    wsum += p.weights[j];
                    min_eig = std::min(min_eig, min_eigenvalue(p.covs[j]));
                }
                r.weight_sum_error = std::abs(wsum - 1.0);
                r.min_cov_eigenvalue = min_eig;
                r.max_resp_row_error = e.max_row_error;
                rec->push_back(r);
            }
            if (std::abs(ll - prev_ll) <= cfg.rel_tol * std::max(std::abs(ll), 1e-300)) {
                converged = true;
                break;
            }
            if (iters >= cfg.max_iters) break;
            prev_ll = ll;
            const MStepResult m = m_step(points, resp, cfg, p);
            if (m.collapsed) {
                collapsed = true;
                break;
            }
            floored_last = m.floored;
            ++iters;
        }
        if (collapsed || !std::isfinite(ll)) continue;

        if (!have_best || ll > best.log_likelihood) {
            best.k = k;
            best.weights = p.weights;
            best.means = p.means;
            best.covariances = p.covs;
            best.log_likelihood = ll;
            best.n_points = static_cast<int>(n);
            best.converged = converged;
            best.iters_used = iters;
            best.covariance = cfg.covariance;
            have_best = true;
        }
    }
    if (!have_best)
        throw Error("DegenerateFit", "every restart collapsed for k=" + std::to_string(k));
    best.bic = bic(best);
    return best;
}

int param_count(int k, CovType type) {
    const int d = 2;
    const int per_cov = type == CovType::full ? d * (d + 1) / 2 : d;
    return (k - 1) + k * d + k * per_cov;
}

double bic(const GmmModel& model) {
    const double p = param_count(model.k, model.covariance);
    return p * std::log(static_cast<double>(model.n_points)) - 2.0 * model.log_likelihood;
}

SelectionResult select_order(std::span<const Vec2> points, const FitConfig& cfg) {
    if (cfg.k_min < 1 || cfg.k_min > cfg.k_max)
        throw Error("InvalidConfig", "need 1 <= k_min <= k_max");
    SelectionResult result;
    bool have_best = false;
    for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
        SelectionEntry entry;
        entry.k = k;
        if (points.size() < static_cast<std::size_t>(k)) {
            entry.bic = std::numeric_limits<double>::quiet_NaN();
            entry.status = "skipped";
            result.table.push_back(entry);
            continue;
        }
        Prng rng(combine_seed(cfg.seed, static_cast<std::uint64_t>(k)));
        try {
            const GmmModel model = em_fit(points, k, cfg, rng);
            entry.bic = model.bic;
            entry.converged = model.converged;
            entry.status = "ok";
            // Ascending k plus strict comparison implements the
            // ties-toward-smaller-k rule.
            if (!have_best || model.bic < result.best.bic) {
                result.best = model;
                have_best = true;
            }
        } catch (const Error& e) {
            entry.bic = std::numeric_limits<double>::quiet_NaN();
            entry.status = e.kind() == "DegenerateFit" ? "degenerate" : "skipped";
        }
        result.table.push_back(entry);
    }
    if (!have_best) throw Error("NoFeasibleK", "no k in range produced a usable fit");
    return result;
}

}  // namespace emscope::gmm
