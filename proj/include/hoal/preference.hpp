#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hoal/rng.hpp"

namespace hoal {

class InvalidInput : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

class DegenerateBelief : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

// Normalized 1-d item feature. y = 1 in an answer means x2 is preferred over x1.
struct Query {
    double x1;
    double x2;

    bool is_diagonal() const { return x1 == x2; }
    Query swapped() const { return {x2, x1}; }
    bool operator==(const Query &) const = default;
};

enum class Answer : int { prefer_first = 0, prefer_second = 1 };

inline int as_int(Answer a) { return static_cast<int>(a); }
Answer answer_from_int(int y);

struct LabeledExample {
    Query query;
    Answer answer;
};

enum class RewardForm { absolute_distance, squared_distance };

std::string to_string(RewardForm form);
RewardForm reward_form_from_string(const std::string &s);

// Uniform grid over the preference parameter theta.
class ThetaGrid {
   public:
    ThetaGrid(double lo, double hi, int n_points);

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    int size() const { return n_; }
    double cell_width() const { return (hi_ - lo_) / (n_ - 1); }
    double point(int k) const;
    const std::vector<double> &points() const { return points_; }

    // Index of the grid cell whose point is closest to theta (ties to the lower index).
    int nearest_index(double theta) const;

    bool operator==(const ThetaGrid &o) const { return lo_ == o.lo_ && hi_ == o.hi_ && n_ == o.n_; }

   private:
    double lo_;
    double hi_;
    int n_;
    std::vector<double> points_;
};

ThetaGrid default_theta_grid();

// Bimodal Gaussian mixture: p_z * N(mu1, sigma1^2) + (1 - p_z) * N(mu2, sigma2^2).
struct BeliefParams {
    double mu1 = -3.0;
    double sigma1 = 1.0;
    double mu2 = 3.0;
    double sigma2 = 1.0;
    double p_z = 0.9;

    void validate() const;
    bool is_canonical() const { return mu1 <= mu2; }
    bool operator==(const BeliefParams &) const = default;
};

// Probability mass over the cells of a ThetaGrid.
class GridBelief {
   public:
    // Throws InvalidInput unless mass is nonnegative and sums to 1 within 1e-9.
    GridBelief(ThetaGrid grid, std::vector<double> mass);

    static GridBelief uniform(const ThetaGrid &grid);
    static GridBelief point_mass(const ThetaGrid &grid, int index);
    // Renormalizes arbitrary nonnegative weights; throws DegenerateBelief if they sum to 0.
    static GridBelief from_weights(const ThetaGrid &grid, std::vector<double> weights);

    const ThetaGrid &grid() const { return grid_; }
    const std::vector<double> &mass() const { return mass_; }
    double operator[](int k) const { return mass_[k]; }
    int size() const { return grid_.size(); }

   private:
    ThetaGrid grid_;
    std::vector<double> mass_;
};

double logistic(double z);

double reward(double theta, double x, RewardForm form);

// Probability of y = 1 (x2 preferred) for a level-1 answerer with preference theta.
double response_prob(double theta, const Query &q, RewardForm form);

Answer sample_answer(double theta, const Query &q, RewardForm form, Rng &rng);

double normal_pdf(double x, double mu, double sigma);
double mixture_density(const BeliefParams &bp, double theta);

GridBelief discretize_belief(const BeliefParams &bp, const ThetaGrid &grid);

// Removes label switching: returns the equivalent parameters with mu1 <= mu2.
BeliefParams canonicalize(const BeliefParams &bp);

}  // namespace hoal
