#include "hoal/preference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace hoal {

namespace {

constexpr double kUnderflow = 1e-300;
constexpr double kMassTolerance = 1e-9;

void require_finite(double v, const char *what) {
    if (!std::isfinite(v)) {
        throw InvalidInput(std::string("non-finite ") + what);
    }
}

}  // namespace

Answer answer_from_int(int y) {
    if (y != 0 && y != 1) {
        throw InvalidInput("answer must be 0 or 1, got " + std::to_string(y));
    }
    return static_cast<Answer>(y);
}

std::string to_string(RewardForm form) {
    switch (form) {
        case RewardForm::absolute_distance:
            return "absolute_distance";
        case RewardForm::squared_distance:
            return "squared_distance";
    }
    return "?";
}

RewardForm reward_form_from_string(const std::string &s) {
    if (s == "absolute_distance") return RewardForm::absolute_distance;
    if (s == "squared_distance") return RewardForm::squared_distance;
    throw InvalidInput("unknown reward form '" + s + "'");
}

ThetaGrid::ThetaGrid(double lo, double hi, int n_points) : lo_(lo), hi_(hi), n_(n_points) {
    require_finite(lo, "grid lower bound");
    require_finite(hi, "grid upper bound");
    if (!(lo < hi)) throw InvalidInput("theta grid needs lo < hi");
    if (n_points < 3) throw InvalidInput("theta grid needs at least 3 points");
    points_.resize(n_);
    for (int k = 0; k < n_; ++k) points_[k] = point(k);
}

double ThetaGrid::point(int k) const {
    // Pin the last point to hi exactly.
    if (k == n_ - 1) return hi_;
    return lo_ + k * cell_width();
}

int ThetaGrid::nearest_index(double theta) const {
    const double pos = (theta - lo_) / cell_width();
    const long k = std::lround(std::floor(pos + 0.5));
    return static_cast<int>(std::clamp<long>(k, 0, n_ - 1));
}

ThetaGrid default_theta_grid() { return ThetaGrid(-6.0, 6.0, 241); }

void BeliefParams::validate() const {
    for (double v : {mu1, sigma1, mu2, sigma2, p_z}) require_finite(v, "belief parameter");
    if (sigma1 <= 0.0 || sigma2 <= 0.0) throw InvalidInput("belief sigma must be positive");
    if (p_z < 0.0 || p_z > 1.0) throw InvalidInput("belief p_z must lie in [0, 1]");
}

GridBelief::GridBelief(ThetaGrid grid, std::vector<double> mass) : grid_(std::move(grid)), mass_(std::move(mass)) {
    if (static_cast<int>(mass_.size()) != grid_.size()) {
        throw InvalidInput("belief mass length does not match grid");
    }
    double total = 0.0;
    for (double m : mass_) {
        if (!(m >= 0.0) || !std::isfinite(m)) throw InvalidInput("belief mass must be finite and nonnegative");
        total += m;
    }
    if (std::abs(total - 1.0) > kMassTolerance) throw InvalidInput("belief mass does not sum to 1");
}

GridBelief GridBelief::uniform(const ThetaGrid &grid) {
    return GridBelief(grid, std::vector<double>(grid.size(), 1.0 / grid.size()));
}

GridBelief GridBelief::point_mass(const ThetaGrid &grid, int index) {
    if (index < 0 || index >= grid.size()) throw InvalidInput("point mass index out of range");
    std::vector<double> mass(grid.size(), 0.0);
    mass[index] = 1.0;
    return GridBelief(grid, std::move(mass));
}

GridBelief GridBelief::from_weights(const ThetaGrid &grid, std::vector<double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0) || !std::isfinite(total)) throw DegenerateBelief("belief weights sum to zero");
    for (double &w : weights) w /= total;
    return GridBelief(grid, std::move(weights));
}

double logistic(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double reward(double theta, double x, RewardForm form) {
    require_finite(theta, "theta");
    require_finite(x, "item feature");
    const double d = x - theta;
    switch (form) {
        case RewardForm::absolute_distance:
            return -std::abs(d);
        case RewardForm::squared_distance:
            return -d * d;
    }
    throw InvalidInput("unknown reward form");
}

double response_prob(double theta, const Query &q, RewardForm form) {
    if (q.is_diagonal()) {
        require_finite(theta, "theta");
        require_finite(q.x1, "item feature");
        return 0.5;
    }
    return logistic(reward(theta, q.x2, form) - reward(theta, q.x1, form));
}

Answer sample_answer(double theta, const Query &q, RewardForm form, Rng &rng) {
    const double p = response_prob(theta, q, form);
    return rng.uniform() < p ? Answer::prefer_second : Answer::prefer_first;
}

double normal_pdf(double x, double mu, double sigma) {
    const double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

double mixture_density(const BeliefParams &bp, double theta) {
    bp.validate();
    require_finite(theta, "theta");
    return bp.p_z * normal_pdf(theta, bp.mu1, bp.sigma1) + (1.0 - bp.p_z) * normal_pdf(theta, bp.mu2, bp.sigma2);
}

GridBelief discretize_belief(const BeliefParams &bp, const ThetaGrid &grid) {
    bp.validate();
    std::vector<double> w(grid.size());
    double total = 0.0;
    for (int k = 0; k < grid.size(); ++k) {
        double d = mixture_density(bp, grid.point(k));
        if (d < kUnderflow) d = 0.0;
        w[k] = d;
        total += d;
    }
    if (!(total > 0.0)) throw DegenerateBelief("mixture density underflows on every grid point");
    for (double &v : w) v /= total;
    return GridBelief(grid, std::move(w));
}

BeliefParams canonicalize(const BeliefParams &bp) {
    if (bp.mu1 <= bp.mu2) return bp;
    return {bp.mu2, bp.sigma2, bp.mu1, bp.sigma1, 1.0 - bp.p_z};
}

}  // namespace hoal
