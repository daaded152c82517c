/*
 * SPDX-FileCopyrightText: Copyright 2026 the emscope project
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef EMSCOPE_GMM_HPP
#define EMSCOPE_GMM_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "emscope/prng.hpp"

namespace emscope::gmm {

enum class CovType { full, diagonal };

struct FitConfig {
    int k_min = 1;
    int k_max = 12;
    int n_restarts = 5;
    int max_iters = 300;
    double rel_tol = 1e-6;    // stop on relative log-likelihood change
    double cov_floor = 1e-3;  // minimum covariance eigenvalue (standardized units)
    std::uint64_t seed = 1;
    CovType covariance = CovType::full;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// Symmetric 2x2 covariance.
struct Mat2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;
};

struct GmmModel {
    int k = 0;
    std::vector<double> weights;
    std::vector<Vec2> means;
    std::vector<Mat2> covariances;
    double log_likelihood = 0.0;  // on the data the model was fitted to
    double bic = 0.0;
    int n_points = 0;
    bool converged = false;
    int iters_used = 0;
    CovType covariance = CovType::full;
};

// Per-dimension affine transform x -> (x - mean) / scale. A zero-variance
// dimension keeps scale 1 and is only centered.
struct Standardization {
    Vec2 mean;
    Vec2 scale{1.0, 1.0};
};

std::pair<std::vector<Vec2>, Standardization> standardize(std::span<const Vec2> points);

// Maps a model fitted on standardized data back to original units. The
// log-likelihood and BIC stay in standardized units (that is what order
// selection compares).
GmmModel to_original_units(const GmmModel& model, const Standardization& transform);

// D^2-weighted seeding. Throws KTooLarge when the data has fewer distinct
// points than k.
std::vector<Vec2> kmeanspp_init(std::span<const Vec2> points, int k, Prng& rng);

// Diagnostics recorded once per EM iteration, for the property tests.
struct IterationRecord {
    double log_likelihood = 0.0;
    bool after_floor = false;  // a covariance was floored in the preceding M-step
    double min_cov_eigenvalue = 0.0;
    double weight_sum_error = 0.0;
    double max_resp_row_error = 0.0;
};

struct FitTrace {
    std::vector<std::vector<IterationRecord>> restarts;
};

// Expects points already standardized by the caller. Runs cfg.n_restarts
// k-means++ seeded EM runs drawing from rng in sequence and returns the best
// final log-likelihood. Throws DegenerateFit when every restart collapses.
GmmModel em_fit(std::span<const Vec2> points, int k, const FitConfig& cfg, Prng& rng,
                FitTrace* trace = nullptr);

int param_count(int k, CovType type);

// p * ln(n) - 2 * log_likelihood; lower is better.
double bic(const GmmModel& model);

struct SelectionEntry {
    int k = 0;
    double bic = 0.0;
    bool converged = false;
    std::string status;  // "ok", "skipped", "degenerate"
};

struct SelectionResult {
    GmmModel best;
    std::vector<SelectionEntry> table;
};

// Fits every k in [k_min, k_max] and keeps the minimal-BIC model, ties
// resolved toward smaller k. Each k derives its own generator from cfg.seed
// so fits can run in any order with identical results.
SelectionResult select_order(std::span<const Vec2> points, const FitConfig& cfg);

}  // namespace emscope::gmm

#endif
