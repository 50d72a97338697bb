#include "hoal/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hoal/parallel.hpp"

namespace hoal {

namespace {

double binary_entropy_from_pair(double p1, double p0) {
    double h = 0.0;
    if (p1 > 0.0) h -= p1 * std::log(p1);
    if (p0 > 0.0) h -= p0 * std::log(p0);
    return h;
}

}  // namespace

QueryGrid::QueryGrid(double lo, double hi, int n_per_axis) : lo_(lo), hi_(hi), n_(n_per_axis) {
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw InvalidInput("non-finite query grid bound");
    if (n_per_axis < 1) throw InvalidInput("query grid needs at least one point per axis");
    if (n_per_axis > 1 && !(lo < hi)) throw InvalidInput("query grid needs lo < hi");
    axis_.resize(n_);
    for (int i = 0; i < n_; ++i) {
        axis_[i] = (n_ == 1) ? lo : (i == n_ - 1 ? hi : lo + i * (hi - lo) / (n_ - 1));
    }
}

std::size_t QueryGrid::index_of(const Query &q) const {
    auto find = [&](double x) -> int {
        for (int i = 0; i < n_; ++i) {
            if (std::abs(axis_[i] - x) <= 1e-9 * std::max(1.0, std::abs(x))) return i;
        }
        throw InvalidInput("query coordinate " + std::to_string(x) + " is not on the query grid");
    };
    return index(find(q.x1), find(q.x2));
}

QueryGrid default_query_grid() { return QueryGrid(-6.0, 6.0, 49); }

QueryPolicy::QueryPolicy(QueryGrid g, std::vector<double> p) : grid(std::move(g)), probs(std::move(p)) {
    if (probs.size() != grid.size()) throw InvalidInput("policy length does not match query grid");
    double total = 0.0;
    for (double v : probs) {
        if (!(v >= 0.0)) throw InvalidInput("policy probabilities must be nonnegative");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidInput("policy probabilities do not sum to 1");
}

Rationality::Rationality(double b) : beta(b) {
    if (!std::isfinite(b) || b < 0.0) throw InvalidInput("rationality must be finite and nonnegative");
}

double predictive_answer_prob(const GridBelief &b, const Query &q, RewardForm form) {
    if (q.is_diagonal()) return 0.5;
    const auto &pts = b.grid().points();
    double p = 0.0;
    for (int k = 0; k < b.size(); ++k) p += b[k] * response_prob(pts[k], q, form);
    return std::clamp(p, 0.0, 1.0);
}

GridBelief posterior_update(const GridBelief &b, const Query &q, Answer a, RewardForm form) {
    if (q.is_diagonal()) return b;
    const auto &pts = b.grid().points();
    std::vector<double> w(b.size());
    double total = 0.0;
    for (int k = 0; k < b.size(); ++k) {
        const double p1 = response_prob(pts[k], q, form);
        w[k] = b[k] * (a == Answer::prefer_second ? p1 : 1.0 - p1);
        total += w[k];
    }
    if (!(total > 0.0)) throw ImpossibleEvidence("answer has zero probability under the belief");
    for (double &v : w) v /= total;
    return GridBelief(b.grid(), std::move(w));
}

double entropy(std::span<const double> mass) {
    double h = 0.0;
    for (double m : mass) {
        if (m > 0.0) h -= m * std::log(m);
    }
    return std::max(h, 0.0);
}

double entropy(const GridBelief &b) { return entropy(std::span<const double>(b.mass())); }

double bernoulli_entropy(double p) { return binary_entropy_from_pair(p, 1.0 - p); }

double info_gain(const GridBelief &b, const Query &q, Answer a, RewardForm form) {
    if (q.is_diagonal()) return 0.0;
    return entropy(b) - entropy(posterior_update(b, q, a, form));
}

double expected_info_gain(const GridBelief &b, const Query &q, RewardForm form) {
    if (q.is_diagonal()) return 0.0;
    const double p1 = predictive_answer_prob(b, q, form);
    const double prior_h = entropy(b);
    double expected_posterior_h = 0.0;
    if (p1 > 0.0) expected_posterior_h += p1 * entropy(posterior_update(b, q, Answer::prefer_second, form));
    if (p1 < 1.0) expected_posterior_h += (1.0 - p1) * entropy(posterior_update(b, q, Answer::prefer_first, form));
    return prior_h - expected_posterior_h;
}

EigTable::EigTable(const ThetaGrid &theta_grid, const QueryGrid &query_grid, RewardForm form)
    : theta_grid_(theta_grid), query_grid_(query_grid), form_(form) {
    const std::size_t nq = query_grid_.size();
    const std::size_t nt = theta_grid_.size();
    prob_.resize(nq * nt);
    cond_entropy_.resize(nq * nt);
    const auto &pts = theta_grid_.points();
    for (std::size_t c = 0; c < nq; ++c) {
        const Query q = query_grid_.candidate(c);
        for (std::size_t k = 0; k < nt; ++k) {
            const double p = response_prob(pts[k], q, form_);
            prob_[c * nt + k] = p;
            cond_entropy_[c * nt + k] = bernoulli_entropy(p);
        }
    }
}

std::span<const double> EigTable::probs(std::size_t candidate) const {
    const std::size_t nt = theta_grid_.size();
    return {prob_.data() + candidate * nt, nt};
}

double EigTable::eig(std::span<const double> mass, std::size_t candidate) const {
    if (query_grid_.is_diagonal(candidate)) return 0.0;
    const std::size_t nt = theta_grid_.size();
    const double *p = prob_.data() + candidate * nt;
    const double *h = cond_entropy_.data() + candidate * nt;
    double pred = 0.0;
    double cond = 0.0;
    for (std::size_t k = 0; k < nt; ++k) {
        pred += mass[k] * p[k];
        cond += mass[k] * h[k];
    }
    pred = std::clamp(pred, 0.0, 1.0);
    return bernoulli_entropy(pred) - cond;
}

std::vector<double> EigTable::eig_map(std::span<const double> mass) const {
    if (mass.size() != static_cast<std::size_t>(theta_grid_.size())) {
        throw InvalidInput("belief does not match the EIG table's theta grid");
    }
    std::vector<double> out(query_grid_.size());
    parallel_for(out.size(), [&](std::size_t c) { out[c] = eig(mass, c); });
    return out;
}

std::vector<double> EigTable::eig_map(const GridBelief &b) const {
    if (!(b.grid() == theta_grid_)) throw InvalidInput("belief does not match the EIG table's theta grid");
    return eig_map(std::span<const double>(b.mass()));
}

std::vector<double> eig_map(const GridBelief &b, const QueryGrid &qg, RewardForm form) {
    std::vector<double> out(qg.size());
    parallel_for(out.size(), [&](std::size_t c) { out[c] = expected_info_gain(b, qg.candidate(c), form); });
    return out;
}

std::vector<double> softmax_policy(std::span<const double> utilities, Rationality beta) {
    if (utilities.empty()) throw InvalidInput("softmax over an empty utility sequence");
    double top = -std::numeric_limits<double>::infinity();
    for (double u : utilities) {
        if (!std::isfinite(u)) throw InvalidInput("non-finite utility");
        top = std::max(top, u);
    }
    std::vector<double> p(utilities.size());
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::exp(beta.beta * (utilities[i] - top));
        total += p[i];
    }
    for (double &v : p) v /= total;
    return p;
}

double log_sum_exp(std::span<const double> utilities, double beta) {
    if (utilities.empty()) throw InvalidInput("log-sum-exp over an empty sequence");
    double top = -std::numeric_limits<double>::infinity();
    for (double u : utilities) top = std::max(top, beta * u);
    double total = 0.0;
    for (double u : utilities) total += std::exp(beta * u - top);
    return top + std::log(total);
}

std::size_t sample_index(std::span<const double> probs, Rng &rng) {
    if (probs.empty()) throw InvalidInput("cannot sample from an empty distribution");
    const double u = rng.uniform();
    double cum = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] > 0.0) last_positive = i;
        cum += probs[i];
        if (u < cum && probs[i] > 0.0) return i;
    }
    // Rounding left the cumulative sum just below u.
    return last_positive;
}

std::size_t argmax_index(std::span<const double> values) {
    if (values.empty()) throw InvalidInput("argmax of an empty sequence");
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

}  // namespace hoal
