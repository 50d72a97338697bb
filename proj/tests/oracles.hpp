#pragma once

// Brute-force reference computations for tests. Written directly from the model
// definitions in long double; they share no code with the library's inference paths.

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

using Real = long double;

inline Real logistic(Real z) { return 1.0L / (1.0L + std::exp(-z)); }

inline Real normal_pdf(Real x, Real mu, Real sigma) {
    const Real pi = 3.141592653589793238462643383279502884L;
    return std::exp(-(x - mu) * (x - mu) / (2.0L * sigma * sigma)) / (sigma * std::sqrt(2.0L * pi));
}

// Likelihood of y = 1 under absolute (-|x - theta|) or squared (-(x - theta)^2) reward.
inline Real p_y1(Real theta, Real x1, Real x2, bool squared) {
    const Real r1 = squared ? -(x1 - theta) * (x1 - theta) : -std::fabs(x1 - theta);
    const Real r2 = squared ? -(x2 - theta) * (x2 - theta) : -std::fabs(x2 - theta);
    return logistic(r2 - r1);
}

inline Real entropy(const std::vector<Real> &m) {
    Real h = 0;
    for (Real v : m)
        if (v > 0) h -= v * std::log(v);
    return h;
}

inline std::vector<Real> bayes(const std::vector<Real> &prior, const std::vector<Real> &lik) {
    std::vector<Real> post(prior.size());
    Real z = 0;
    for (std::size_t k = 0; k < prior.size(); ++k) z += prior[k] * lik[k];
    for (std::size_t k = 0; k < prior.size(); ++k) post[k] = prior[k] * lik[k] / z;
    return post;
}

// Mutual information by enumerating the joint table p(theta, y).
inline Real mutual_information(const std::vector<Real> &prior, const std::vector<Real> &p1) {
    Real py1 = 0;
    for (std::size_t k = 0; k < prior.size(); ++k) py1 += prior[k] * p1[k];
    const Real py0 = 1 - py1;
    Real mi = 0;
    for (std::size_t k = 0; k < prior.size(); ++k) {
        if (prior[k] == 0) continue;
        const Real j1 = prior[k] * p1[k];
        const Real j0 = prior[k] * (1 - p1[k]);
        if (j1 > 0) mi += j1 * std::log(j1 / (prior[k] * py1));
        if (j0 > 0) mi += j0 * std::log(j0 / (prior[k] * py0));
    }
    return mi;
}

// H(y) - sum_k m_k H_b(p_k).
inline Real dual_form_eig(const std::vector<Real> &prior, const std::vector<Real> &p1) {
    auto hb = [](Real p) {
        Real h = 0;
        if (p > 0) h -= p * std::log(p);
        if (p < 1) h -= (1 - p) * std::log(1 - p);
        return h;
    };
    Real py1 = 0, cond = 0;
    for (std::size_t k = 0; k < prior.size(); ++k) {
        py1 += prior[k] * p1[k];
        cond += prior[k] * hb(p1[k]);
    }
    return hb(py1) - cond;
}

inline std::vector<Real> linspace(Real lo, Real hi, int n) {
    std::vector<Real> v(n);
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
    return v;
}

inline std::vector<Real> discretized_mixture(const std::vector<Real> &theta, Real mu1, Real s1, Real mu2, Real s2,
                                             Real pz) {
    std::vector<Real> m(theta.size());
    Real z = 0;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        m[k] = pz * normal_pdf(theta[k], mu1, s1) + (1 - pz) * normal_pdf(theta[k], mu2, s2);
        z += m[k];
    }
    for (auto &v : m) v /= z;
    return m;
}

// Level-2 query probabilities over an enumerated query set.
inline std::vector<Real> l2_policy(const std::vector<Real> &theta, const std::vector<Real> &belief,
                                   const std::vector<std::pair<Real, Real>> &queries, Real beta, bool squared) {
    std::vector<Real> w(queries.size());
    Real z = 0;
    for (std::size_t c = 0; c < queries.size(); ++c) {
        std::vector<Real> p1(theta.size());
        for (std::size_t k = 0; k < theta.size(); ++k) p1[k] = p_y1(theta[k], queries[c].first, queries[c].second, squared);
        w[c] = std::exp(beta * mutual_information(belief, p1));
        z += w[c];
    }
    for (auto &v : w) v /= z;
    return w;
}

inline std::vector<Real> eig_over(const std::vector<Real> &theta, const std::vector<Real> &belief,
                                  const std::vector<std::pair<Real, Real>> &queries, bool squared) {
    std::vector<Real> e;
    for (const auto &q : queries) {
        std::vector<Real> p1(theta.size());
        for (std::size_t k = 0; k < theta.size(); ++k) p1[k] = p_y1(theta[k], q.first, q.second, squared);
        e.push_back(mutual_information(belief, p1));
    }
    return e;
}

// Particle weights after observing query c from a level-2 asker.
inline std::vector<Real> tom_posterior(const std::vector<Real> &theta, const std::vector<std::vector<Real>> &beliefs,
                                       const std::vector<Real> &weights,
                                       const std::vector<std::pair<Real, Real>> &queries, std::size_t c, Real beta,
                                       bool squared) {
    std::vector<Real> post(beliefs.size());
    Real z = 0;
    for (std::size_t j = 0; j < beliefs.size(); ++j) {
        post[j] = weights[j] * l2_policy(theta, beliefs[j], queries, beta, squared)[c];
        z += post[j];
    }
    for (auto &v : post) v /= z;
    return post;
}

// Literal over rhetorical marginal likelihood for every query. The level-4 utility mixes
// EIG with ln 2 times the posterior weight of the asker's own belief.
inline std::vector<Real> bayes_factors(const std::vector<Real> &theta, const std::vector<std::vector<Real>> &beliefs,
                                       const std::vector<Real> &weights,
                                       const std::vector<std::pair<Real, Real>> &queries, Real beta, Real lambda,
                                       bool squared) {
    const std::size_t n = beliefs.size();
    const std::size_t nq = queries.size();
    std::vector<std::vector<Real>> pol2, pol4(n, std::vector<Real>(nq));
    std::vector<std::vector<Real>> eig;
    for (const auto &b : beliefs) {
        pol2.push_back(l2_policy(theta, b, queries, beta, squared));
        eig.push_back(eig_over(theta, b, queries, squared));
    }
    for (std::size_t j = 0; j < n; ++j) {
        Real z = 0;
        for (std::size_t c = 0; c < nq; ++c) {
            Real marg = 0;
            for (std::size_t i = 0; i < n; ++i) marg += weights[i] * pol2[i][c];
            const Real post = weights[j] * pol2[j][c] / marg;
            pol4[j][c] = std::exp(beta * ((1 - lambda) * eig[j][c] + lambda * std::log(2.0L) * post));
            z += pol4[j][c];
        }
        for (auto &v : pol4[j]) v /= z;
    }
    std::vector<Real> bf(nq);
    for (std::size_t c = 0; c < nq; ++c) {
        Real num = 0, den = 0;
        for (std::size_t j = 0; j < n; ++j) {
            num += weights[j] * pol2[j][c];
            den += weights[j] * pol4[j][c];
        }
        bf[c] = num / den;
    }
    return bf;
}

}  // namespace oracle
