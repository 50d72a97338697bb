#pragma once

#include <cstddef>
#include <vector>

#include "hoal/bayes.hpp"
#include "hoal/preference.hpp"
#include "hoal/rng.hpp"

namespace hoal {

// Second-order belief: a weighted set of candidate learner beliefs.
struct BeliefEnsemble {
    BeliefEnsemble(std::vector<BeliefParams> particles, std::vector<double> weights);
    static BeliefEnsemble singleton(const BeliefParams &bp);

    std::size_t size() const { return particles.size(); }

    std::vector<BeliefParams> particles;
    std::vector<double> weights;
};

enum class SelectionMode { sample, argmax };

// How an observed query is scored against a candidate learner belief.
//   unnormalized_eig:  exp(beta * EIG(q))
//   normalized_policy: the level-2 softmax probability of q over the whole query grid
enum class Likelihood { unnormalized_eig, normalized_policy };

struct QueryDataset {
    std::vector<Query> queries;
};

// Coarse grid over (mu1, log sigma1, mu2, log sigma2, p_z) followed by shrinking
// 3-point-per-axis refinement around the incumbent.
struct MleSearchConfig {
    double mu1_lo = -6.0, mu1_hi = 0.0;
    int mu1_n = 13;
    double mu2_lo = 0.0, mu2_hi = 6.0;
    int mu2_n = 13;
    double sigma_lo = 0.25, sigma_hi = 2.0;
    int sigma_n = 4;
    double p_z_lo = 0.1, p_z_hi = 0.9;
    int p_z_n = 9;
    int n_refine_iters = 3;
    double refine_shrink = 0.5;

    void validate() const;
    bool operator==(const MleSearchConfig &) const = default;
};

struct MleResult {
    BeliefParams params;
    double objective;
    std::size_t n_evaluations;
};

QueryPolicy l2_query_policy(const GridBelief &b, const EigTable &table, Rationality beta_a);
QueryPolicy l2_query_policy(const GridBelief &b, const QueryGrid &qg, Rationality beta_a, RewardForm form);

Query l2_select_query(const QueryPolicy &policy, SelectionMode mode, Rng &rng);

// Log-likelihood (up to the dropped normalizer when exact is false) of the dataset
// under the level-2 policy of the belief bp.
double mle_objective(const QueryDataset &d, const BeliefParams &bp, const EigTable &table, bool exact,
                     Rationality beta_a);

MleResult mle_belief(const QueryDataset &d, const MleSearchConfig &cfg, const EigTable &table, bool exact,
                     Rationality beta_a);

BeliefEnsemble tom_posterior(const BeliefEnsemble &ensemble, const Query &observed, const EigTable &table,
                             Rationality beta_a, Likelihood likelihood = Likelihood::normalized_policy);

// Posterior mass at the theta-grid cell of theta_true after the learner updates on the example.
double l3_teaching_utility(const LabeledExample &example, double theta_true, const GridBelief &b, RewardForm form);
double l3_teaching_utility(const LabeledExample &example, double theta_true, const BeliefParams &bp,
                           const ThetaGrid &grid, RewardForm form);

// Teaching candidates are (query grid candidate, y) pairs, index = 2 * candidate + y.
struct TeachingPolicy {
    std::vector<double> utilities;
    std::vector<double> probs;
};

LabeledExample teaching_candidate(const QueryGrid &qg, std::size_t index);

TeachingPolicy l3_teaching_policy(double theta_true, const std::vector<GridBelief> &beliefs,
                                  const std::vector<double> &weights, Rationality beta_h, const EigTable &table);
TeachingPolicy l3_teaching_policy(double theta_true, const BeliefEnsemble &ensemble, Rationality beta_h,
                                  const EigTable &table);

// Probability that a strategic teacher answers y = 1 to q.
double l3_answer_policy(double theta_true, const Query &q, const std::vector<GridBelief> &beliefs,
                        const std::vector<double> &weights, Rationality beta_h, RewardForm form);
double l3_answer_policy(double theta_true, const Query &q, const BeliefEnsemble &ensemble, Rationality beta_h,
                        const ThetaGrid &grid, RewardForm form);

// Level-2 query policies of every particle, plus the quantities the level-4/5
// agents derive from them. Queries passed to the methods must lie on the table's grid.
class SecondOrderModel {
   public:
    SecondOrderModel(const BeliefEnsemble &ensemble, const EigTable &table, Rationality beta_a);

    std::size_t size() const { return beliefs_.size(); }
    const GridBelief &belief(std::size_t j) const { return beliefs_[j]; }
    const std::vector<double> &weights() const { return weights_; }
    const std::vector<double> &eig_map(std::size_t j) const { return eig_maps_[j]; }
    double l2_log_prob(std::size_t j, std::size_t candidate) const;

    // Ensemble weights after observing the candidate query.
    std::vector<double> posterior_weights(std::size_t candidate) const;
    double l4_utility(std::size_t candidate, std::size_t true_index) const;
    std::vector<double> l4_utility_map(std::size_t true_index) const;
    // u = (1 - lambda) * EIG + lambda * ln2 * U4, i.e. the ln 2-normalized mixture in nats.
    std::vector<double> l4_mixed_utility(std::size_t true_index, double lambda) const;
    std::vector<double> l4_policy(std::size_t true_index, double lambda) const;
    double bayes_factor(std::size_t candidate, double lambda) const;

   private:
    const EigTable &table_;
    double beta_;
    std::vector<GridBelief> beliefs_;
    std::vector<double> weights_;
    std::vector<std::vector<double>> eig_maps_;
    std::vector<double> log_normalizers_;
};

double l4_utility(const Query &q, std::size_t true_index, const BeliefEnsemble &ensemble, const EigTable &table,
                  Rationality beta_a);

QueryPolicy l4_query_policy(std::size_t true_index, const BeliefEnsemble &ensemble, double lambda,
                            Rationality beta_a, const EigTable &table);

// > 1 favors an information-seeking (level-2) asker, < 1 an information-conveying (level-4) one.
double bayes_factor(const Query &q, const BeliefEnsemble &ensemble, Rationality beta_a, double lambda,
                    const EigTable &table);

}  // namespace hoal
