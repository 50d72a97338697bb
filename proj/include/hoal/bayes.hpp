#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "hoal/preference.hpp"
#include "hoal/rng.hpp"

namespace hoal {

class ImpossibleEvidence : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

// All ordered pairs (x1, x2) of a uniform axis grid, enumerated row-major by x1 then x2.
class QueryGrid {
   public:
    QueryGrid(double lo, double hi, int n_per_axis);

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    int n_per_axis() const { return n_; }
    std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }
    const std::vector<double> &axis() const { return axis_; }

    Query candidate(std::size_t i) const { return {axis_[i / n_], axis_[i % n_]}; }
    std::size_t index(int i1, int i2) const { return static_cast<std::size_t>(i1) * n_ + i2; }
    std::size_t swapped_index(std::size_t i) const { return index(static_cast<int>(i % n_), static_cast<int>(i / n_)); }
    bool is_diagonal(std::size_t i) const { return i / n_ == i % n_; }
    // Index of the candidate with exactly these coordinates; throws InvalidInput if absent.
    std::size_t index_of(const Query &q) const;

    bool operator==(const QueryGrid &o) const { return lo_ == o.lo_ && hi_ == o.hi_ && n_ == o.n_; }

   private:
    double lo_;
    double hi_;
    int n_;
    std::vector<double> axis_;
};

QueryGrid default_query_grid();

struct QueryPolicy {
    QueryPolicy(QueryGrid grid, std::vector<double> probs);

    QueryGrid grid;
    std::vector<double> probs;
};

struct Rationality {
    explicit Rationality(double beta);
    double beta;
};

double predictive_answer_prob(const GridBelief &b, const Query &q, RewardForm form);

GridBelief posterior_update(const GridBelief &b, const Query &q, Answer a, RewardForm form);

// Discrete entropy in nats.
double entropy(const GridBelief &b);
double entropy(std::span<const double> mass);
double bernoulli_entropy(double p);

double info_gain(const GridBelief &b, const Query &q, Answer a, RewardForm form);

// Mutual information between theta and the answer, computed as the predictive-weighted
// entropy reduction of the two possible posteriors.
double expected_info_gain(const GridBelief &b, const Query &q, RewardForm form);

// Precomputed answer probabilities and their Bernoulli entropies for every
// (candidate, theta) pair. EIG for any belief on the same theta grid is then
// H(sum_k m_k p_k) - sum_k m_k h(p_k).
class EigTable {
   public:
    EigTable(const ThetaGrid &theta_grid, const QueryGrid &query_grid, RewardForm form);

    const ThetaGrid &theta_grid() const { return theta_grid_; }
    const QueryGrid &query_grid() const { return query_grid_; }
    RewardForm form() const { return form_; }

    std::span<const double> probs(std::size_t candidate) const;
    double eig(std::span<const double> mass, std::size_t candidate) const;
    std::vector<double> eig_map(std::span<const double> mass) const;
    std::vector<double> eig_map(const GridBelief &b) const;

   private:
    ThetaGrid theta_grid_;
    QueryGrid query_grid_;
    RewardForm form_;
    std::vector<double> prob_;
    std::vector<double> cond_entropy_;
};

// EIG of every candidate, in candidate order. Parallel over candidates.
std::vector<double> eig_map(const GridBelief &b, const QueryGrid &qg, RewardForm form);

std::vector<double> softmax_policy(std::span<const double> utilities, Rationality beta);

// log sum_i exp(beta * u_i), stable.
double log_sum_exp(std::span<const double> utilities, double beta);

std::size_t sample_index(std::span<const double> probs, Rng &rng);

// First index holding the maximum value.
std::size_t argmax_index(std::span<const double> values);

}  // namespace hoal
