#include "hoal/agents.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "hoal/parallel.hpp"

namespace hoal {

namespace {

constexpr double kWeightTolerance = 1e-9;

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = (n == 1) ? lo : (i == n - 1 ? hi : lo + i * (hi - lo) / (n - 1));
    return v;
}

std::vector<double> normalized(std::vector<double> w, const char *what) {
    double total = 0.0;
    for (double v : w) total += v;
    if (!(total > 0.0) || !std::isfinite(total)) throw ImpossibleEvidence(what);
    for (double &v : w) v /= total;
    return w;
}

// Per-query answer probabilities and conditional entropies on the theta grid, so a
// dataset can be scored against many beliefs without recomputing the likelihood.
struct DatasetTable {
    DatasetTable(const QueryDataset &d, const ThetaGrid &grid, RewardForm form) : n_theta(grid.size()) {
        for (const Query &q : d.queries) {
            diagonal.push_back(q.is_diagonal());
            for (int k = 0; k < n_theta; ++k) {
                const double p = response_prob(grid.point(k), q, form);
                prob.push_back(p);
                cond_entropy.push_back(bernoulli_entropy(p));
            }
        }
    }

    double eig(std::span<const double> mass, std::size_t i) const {
        if (diagonal[i]) return 0.0;
        const double *p = prob.data() + i * n_theta;
        const double *h = cond_entropy.data() + i * n_theta;
        double pred = 0.0;
        double cond = 0.0;
        for (int k = 0; k < n_theta; ++k) {
            pred += mass[k] * p[k];
            cond += mass[k] * h[k];
        }
        return bernoulli_entropy(std::clamp(pred, 0.0, 1.0)) - cond;
    }

    std::size_t size() const { return diagonal.size(); }

    int n_theta;
    std::vector<bool> diagonal;
    std::vector<double> prob;
    std::vector<double> cond_entropy;
};

double score_dataset(const DatasetTable &dt, const BeliefParams &bp, const EigTable &table, bool exact,
                     double beta) {
    const GridBelief b = discretize_belief(bp, table.theta_grid());
    const std::span<const double> mass(b.mass());
    double total_eig = 0.0;
    for (std::size_t i = 0; i < dt.size(); ++i) total_eig += dt.eig(mass, i);
    if (!exact) return total_eig;
    // EIG is symmetric under swapping x1 and x2 and zero on the diagonal, so the
    // normalizer only needs the strict upper triangle. Sequential: this already runs
    // inside the parallel coarse search.
    const QueryGrid &qg = table.query_grid();
    const int n = qg.n_per_axis();
    std::vector<double> upper;
    upper.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    double top = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            upper.push_back(table.eig(mass, qg.index(i, j)));
            top = std::max(top, beta * upper.back());
        }
    }
    double z = n * std::exp(-top);
    for (double e : upper) z += 2.0 * std::exp(beta * e - top);
    return beta * total_eig - static_cast<double>(dt.size()) * (top + std::log(z));
}

// Search coordinates: mu1, log sigma1, mu2, log sigma2, p_z.
using Coords = std::array<double, 5>;

BeliefParams from_coords(const Coords &c) { return {c[0], std::exp(c[1]), c[2], std::exp(c[3]), c[4]}; }

}  // namespace

BeliefEnsemble::BeliefEnsemble(std::vector<BeliefParams> p, std::vector<double> w)
    : particles(std::move(p)), weights(std::move(w)) {
    if (particles.empty()) throw InvalidInput("ensemble needs at least one particle");
    if (particles.size() != weights.size()) throw InvalidInput("ensemble weights do not match particles");
    double total = 0.0;
    for (double v : weights) {
        if (!(v >= 0.0)) throw InvalidInput("ensemble weights must be nonnegative");
        total += v;
    }
    if (std::abs(total - 1.0) > kWeightTolerance) throw InvalidInput("ensemble weights do not sum to 1");
    for (const auto &bp : particles) {
        bp.validate();
        if (!bp.is_canonical()) throw InvalidInput("ensemble particles must be canonical (mu1 <= mu2)");
    }
}

BeliefEnsemble BeliefEnsemble::singleton(const BeliefParams &bp) { return BeliefEnsemble({canonicalize(bp)}, {1.0}); }

void MleSearchConfig::validate() const {
    auto check = [](double lo, double hi, int n, const char *name) {
        if (n < 1) throw InvalidInput(std::string("mle grid count must be >= 1 for ") + name);
        if (!(lo <= hi)) throw InvalidInput(std::string("mle range is empty for ") + name);
    };
    check(mu1_lo, mu1_hi, mu1_n, "mu1");
    check(mu2_lo, mu2_hi, mu2_n, "mu2");
    check(sigma_lo, sigma_hi, sigma_n, "sigma");
    check(p_z_lo, p_z_hi, p_z_n, "p_z");
    if (!(sigma_lo > 0.0)) throw InvalidInput("mle sigma range must be positive");
    if (p_z_lo < 0.0 || p_z_hi > 1.0) throw InvalidInput("mle p_z range must lie in [0, 1]");
    if (n_refine_iters < 0) throw InvalidInput("mle refine iterations must be >= 0");
    if (!(refine_shrink > 0.0 && refine_shrink < 1.0)) throw InvalidInput("mle refine shrink must lie in (0, 1)");
}

QueryPolicy l2_query_policy(const GridBelief &b, const EigTable &table, Rationality beta_a) {
    const std::vector<double> eig = table.eig_map(b);
    return QueryPolicy(table.query_grid(), softmax_policy(eig, beta_a));
}

QueryPolicy l2_query_policy(const GridBelief &b, const QueryGrid &qg, Rationality beta_a, RewardForm form) {
    const std::vector<double> eig = eig_map(b, qg, form);
    return QueryPolicy(qg, softmax_policy(eig, beta_a));
}

Query l2_select_query(const QueryPolicy &policy, SelectionMode mode, Rng &rng) {
    const std::size_t i =
        mode == SelectionMode::argmax ? argmax_index(policy.probs) : sample_index(policy.probs, rng);
    return policy.grid.candidate(i);
}

double mle_objective(const QueryDataset &d, const BeliefParams &bp, const EigTable &table, bool exact,
                     Rationality beta_a) {
    if (d.queries.empty()) throw InvalidInput("query dataset is empty");
    const DatasetTable dt(d, table.theta_grid(), table.form());
    return score_dataset(dt, bp, table, exact, beta_a.beta);
}

MleResult mle_belief(const QueryDataset &d, const MleSearchConfig &cfg, const EigTable &table, bool exact,
                     Rationality beta_a) {
    if (d.queries.empty()) throw InvalidInput("query dataset is empty");
    cfg.validate();
    const DatasetTable dt(d, table.theta_grid(), table.form());

    const auto mu1s = linspace(cfg.mu1_lo, cfg.mu1_hi, cfg.mu1_n);
    const auto mu2s = linspace(cfg.mu2_lo, cfg.mu2_hi, cfg.mu2_n);
    const auto log_sigmas = linspace(std::log(cfg.sigma_lo), std::log(cfg.sigma_hi), cfg.sigma_n);
    const auto pzs = linspace(cfg.p_z_lo, cfg.p_z_hi, cfg.p_z_n);

    std::vector<Coords> coarse;
    for (double m1 : mu1s)
        for (double ls1 : log_sigmas)
            for (double m2 : mu2s)
                for (double ls2 : log_sigmas)
                    for (double pz : pzs)
                        if (m1 <= m2) coarse.push_back({m1, ls1, m2, ls2, pz});
    if (coarse.empty()) throw InvalidInput("mle coarse grid has no canonical points");

    auto evaluate = [&](const std::vector<Coords> &pts) {
        std::vector<double> out(pts.size());
        parallel_for(pts.size(), [&](std::size_t i) {
            out[i] = score_dataset(dt, from_coords(pts[i]), table, exact, beta_a.beta);
        });
        return out;
    };

    const std::vector<double> coarse_scores = evaluate(coarse);
    std::size_t evaluations = coarse.size();
    std::size_t best_i = argmax_index(coarse_scores);
    Coords best = coarse[best_i];
    double best_score = coarse_scores[best_i];

    auto step_of = [](double lo, double hi, int n) { return n > 1 ? (hi - lo) / (n - 1) : 0.0; };
    const Coords coarse_step = {step_of(cfg.mu1_lo, cfg.mu1_hi, cfg.mu1_n),
                                step_of(std::log(cfg.sigma_lo), std::log(cfg.sigma_hi), cfg.sigma_n),
                                step_of(cfg.mu2_lo, cfg.mu2_hi, cfg.mu2_n),
                                step_of(std::log(cfg.sigma_lo), std::log(cfg.sigma_hi), cfg.sigma_n),
                                step_of(cfg.p_z_lo, cfg.p_z_hi, cfg.p_z_n)};
    const Coords lo = {cfg.mu1_lo, std::log(cfg.sigma_lo), cfg.mu2_lo, std::log(cfg.sigma_lo), cfg.p_z_lo};
    const Coords hi = {cfg.mu1_hi, std::log(cfg.sigma_hi), cfg.mu2_hi, std::log(cfg.sigma_hi), cfg.p_z_hi};

    double scale = 1.0;
    for (int it = 0; it < cfg.n_refine_iters; ++it) {
        scale *= cfg.refine_shrink;
        std::vector<Coords> local;
        for (int code = 0; code < 243; ++code) {
            Coords c = best;
            int rest = code;
            bool moved = false;
            for (int dim = 0; dim < 5; ++dim) {
                const int offset = rest % 3 - 1;
                rest /= 3;
                if (offset == 0) continue;
                c[dim] = std::clamp(best[dim] + offset * coarse_step[dim] * scale, lo[dim], hi[dim]);
                moved = moved || c[dim] != best[dim];
            }
            if (moved && c[0] <= c[2]) local.push_back(c);
        }
        const std::vector<double> scores = evaluate(local);
        evaluations += local.size();
        for (std::size_t i = 0; i < local.size(); ++i) {
            if (scores[i] > best_score) {
                best_score = scores[i];
                best = local[i];
            }
        }
    }
    return {canonicalize(from_coords(best)), best_score, evaluations};
}

BeliefEnsemble tom_posterior(const BeliefEnsemble &ensemble, const Query &observed, const EigTable &table,
                             Rationality beta_a, Likelihood likelihood) {
    const std::size_t n = ensemble.size();
    if (n == 1) return ensemble;
    std::vector<double> log_lik(n);
    for (std::size_t j = 0; j < n; ++j) {
        const GridBelief b = discretize_belief(ensemble.particles[j], table.theta_grid());
        log_lik[j] = beta_a.beta * expected_info_gain(b, observed, table.form());
        if (likelihood == Likelihood::normalized_policy) {
            log_lik[j] -= log_sum_exp(table.eig_map(b), beta_a.beta);
        }
    }
    const double top = *std::max_element(log_lik.begin(), log_lik.end());
    std::vector<double> w(n);
    for (std::size_t j = 0; j < n; ++j) w[j] = ensemble.weights[j] * std::exp(log_lik[j] - top);
    return BeliefEnsemble(ensemble.particles, normalized(std::move(w), "observed query is impossible under every particle"));
}

double l3_teaching_utility(const LabeledExample &example, double theta_true, const GridBelief &b, RewardForm form) {
    const int k = b.grid().nearest_index(theta_true);
    return posterior_update(b, example.query, example.answer, form)[k];
}

double l3_teaching_utility(const LabeledExample &example, double theta_true, const BeliefParams &bp,
                           const ThetaGrid &grid, RewardForm form) {
    return l3_teaching_utility(example, theta_true, discretize_belief(bp, grid), form);
}

LabeledExample teaching_candidate(const QueryGrid &qg, std::size_t index) {
    if (index >= 2 * qg.size()) throw InvalidInput("teaching candidate index out of range");
    return {qg.candidate(index / 2), answer_from_int(static_cast<int>(index % 2))};
}

TeachingPolicy l3_teaching_policy(double theta_true, const std::vector<GridBelief> &beliefs,
                                  const std::vector<double> &weights, Rationality beta_h, const EigTable &table) {
    if (beliefs.empty() || beliefs.size() != weights.size()) throw InvalidInput("teaching beliefs and weights mismatch");
    const ThetaGrid &grid = table.theta_grid();
    const int target = grid.nearest_index(theta_true);
    const std::size_t nq = table.query_grid().size();
    std::vector<double> u(2 * nq, 0.0);
    parallel_for(nq, [&](std::size_t c) {
        const auto p = table.probs(c);
        const bool diag = table.query_grid().is_diagonal(c);
        double u0 = 0.0;
        double u1 = 0.0;
        for (std::size_t j = 0; j < beliefs.size(); ++j) {
            if (!(beliefs[j].grid() == grid)) throw InvalidInput("teaching belief is on a different theta grid");
            const auto &m = beliefs[j].mass();
            if (diag) {
                u0 += weights[j] * m[target];
                u1 += weights[j] * m[target];
                continue;
            }
            double z1 = 0.0;
            for (int k = 0; k < grid.size(); ++k) z1 += m[k] * p[k];
            double z0 = 0.0;
            for (int k = 0; k < grid.size(); ++k) z0 += m[k] * (1.0 - p[k]);
            u1 += weights[j] * (m[target] * p[target] / z1);
            u0 += weights[j] * (m[target] * (1.0 - p[target]) / z0);
        }
        u[2 * c] = u0;
        u[2 * c + 1] = u1;
    });
    TeachingPolicy out;
    out.probs = softmax_policy(u, beta_h);
    out.utilities = std::move(u);
    return out;
}

TeachingPolicy l3_teaching_policy(double theta_true, const BeliefEnsemble &ensemble, Rationality beta_h,
                                  const EigTable &table) {
    std::vector<GridBelief> beliefs;
    for (const auto &bp : ensemble.particles) beliefs.push_back(discretize_belief(bp, table.theta_grid()));
    return l3_teaching_policy(theta_true, beliefs, ensemble.weights, beta_h, table);
}

double l3_answer_policy(double theta_true, const Query &q, const std::vector<GridBelief> &beliefs,
                        const std::vector<double> &weights, Rationality beta_h, RewardForm form) {
    if (beliefs.empty() || beliefs.size() != weights.size()) throw InvalidInput("teaching beliefs and weights mismatch");
    if (q.is_diagonal()) return 0.5;
    std::array<double, 2> u = {0.0, 0.0};
    for (int y = 0; y < 2; ++y) {
        const LabeledExample ex{q, answer_from_int(y)};
        for (std::size_t j = 0; j < beliefs.size(); ++j) {
            u[y] += weights[j] * l3_teaching_utility(ex, theta_true, beliefs[j], form);
        }
    }
    return softmax_policy(u, beta_h)[1];
}

double l3_answer_policy(double theta_true, const Query &q, const BeliefEnsemble &ensemble, Rationality beta_h,
                        const ThetaGrid &grid, RewardForm form) {
    std::vector<GridBelief> beliefs;
    for (const auto &bp : ensemble.particles) beliefs.push_back(discretize_belief(bp, grid));
    return l3_answer_policy(theta_true, q, beliefs, ensemble.weights, beta_h, form);
}

SecondOrderModel::SecondOrderModel(const BeliefEnsemble &ensemble, const EigTable &table, Rationality beta_a)
    : table_(table), beta_(beta_a.beta), weights_(ensemble.weights) {
    for (const auto &bp : ensemble.particles) {
        beliefs_.push_back(discretize_belief(bp, table.theta_grid()));
        eig_maps_.push_back(table.eig_map(beliefs_.back()));
        log_normalizers_.push_back(log_sum_exp(eig_maps_.back(), beta_));
    }
}

double SecondOrderModel::l2_log_prob(std::size_t j, std::size_t candidate) const {
    return beta_ * eig_maps_.at(j).at(candidate) - log_normalizers_[j];
}

std::vector<double> SecondOrderModel::posterior_weights(std::size_t candidate) const {
    std::vector<double> log_lik(size());
    for (std::size_t j = 0; j < size(); ++j) log_lik[j] = l2_log_prob(j, candidate);
    const double top = *std::max_element(log_lik.begin(), log_lik.end());
    std::vector<double> w(size());
    for (std::size_t j = 0; j < size(); ++j) w[j] = weights_[j] * std::exp(log_lik[j] - top);
    return normalized(std::move(w), "observed query is impossible under every particle");
}

double SecondOrderModel::l4_utility(std::size_t candidate, std::size_t true_index) const {
    if (true_index >= size()) throw InvalidInput("true particle index out of range");
    return posterior_weights(candidate)[true_index];
}

std::vector<double> SecondOrderModel::l4_utility_map(std::size_t true_index) const {
    if (true_index >= size()) throw InvalidInput("true particle index out of range");
    std::vector<double> out(table_.query_grid().size());
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = size() == 1 ? 1.0 : posterior_weights(c)[true_index];
    return out;
}

std::vector<double> SecondOrderModel::l4_mixed_utility(std::size_t true_index, double lambda) const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidInput("lambda must lie in [0, 1]");
    const std::vector<double> u4 = l4_utility_map(true_index);
    const std::vector<double> &eig = eig_maps_[true_index];
    std::vector<double> u(u4.size());
    for (std::size_t c = 0; c < u.size(); ++c) {
        u[c] = (1.0 - lambda) * eig[c] + lambda * std::numbers::ln2 * u4[c];
    }
    return u;
}

std::vector<double> SecondOrderModel::l4_policy(std::size_t true_index, double lambda) const {
    return softmax_policy(l4_mixed_utility(true_index, lambda), Rationality(beta_));
}

double SecondOrderModel::bayes_factor(std::size_t candidate, double lambda) const {
    double literal = 0.0;
    double pragmatic = 0.0;
    for (std::size_t j = 0; j < size(); ++j) {
        literal += weights_[j] * std::exp(l2_log_prob(j, candidate));
        pragmatic += weights_[j] * l4_policy(j, lambda)[candidate];
    }
    if (!(pragmatic > 0.0)) throw ImpossibleEvidence("query has zero probability under the level-4 hypothesis");
    return literal / pragmatic;
}

double l4_utility(const Query &q, std::size_t true_index, const BeliefEnsemble &ensemble, const EigTable &table,
                  Rationality beta_a) {
    if (true_index >= ensemble.size()) throw InvalidInput("true particle index out of range");
    const BeliefEnsemble post = tom_posterior(ensemble, q, table, beta_a, Likelihood::normalized_policy);
    return post.weights[true_index];
}

QueryPolicy l4_query_policy(std::size_t true_index, const BeliefEnsemble &ensemble, double lambda,
                            Rationality beta_a, const EigTable &table) {
    const SecondOrderModel model(ensemble, table, beta_a);
    return QueryPolicy(table.query_grid(), model.l4_policy(true_index, lambda));
}

double bayes_factor(const Query &q, const BeliefEnsemble &ensemble, Rationality beta_a, double lambda,
                    const EigTable &table) {
    const SecondOrderModel model(ensemble, table, beta_a);
    return model.bayes_factor(table.query_grid().index_of(q), lambda);
}

}  // namespace hoal
