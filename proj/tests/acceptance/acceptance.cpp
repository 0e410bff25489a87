// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cli/io.hpp"
#include "cli/run.hpp"
#include "lvkit/autoencoders.hpp"
#include "lvkit/clustering.hpp"
#include "lvkit/divergences.hpp"
#include "lvkit/elbo.hpp"
#include "lvkit/expfam.hpp"
#include "lvkit/gradient_estimators.hpp"
#include "lvkit/ising.hpp"
#include "lvkit/mixture.hpp"
#include "lvkit/pagerank.hpp"
#include "lvkit/ppca.hpp"
#include "lvkit/projections.hpp"
#include "lvkit/rbm.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace lvkit;

namespace {

// Collects failed checks for one criterion.
class Report {
   public:
    void check(bool ok, const std::string& what) {
        ++checks_;
        if (!ok && failures_.size() < 5) {
            failures_.push_back(what);
        }
        failed_ = failed_ || !ok;
    }
    void note(const std::string& text) { notes_.push_back(text); }
    bool failed() const { return failed_; }
    int checks() const { return checks_; }
    std::string summary() const {
        std::string s;
        for (const auto& n : notes_) {
            s += (s.empty() ? "" : "; ") + n;
        }
        for (const auto& f : failures_) {
            s += (s.empty() ? "" : "; ") + std::string("failed: ") + f;
        }
        return s;
    }

   private:
    int checks_ = 0;
    bool failed_ = false;
    std::vector<std::string> failures_;
    std::vector<std::string> notes_;
};

std::string num(double v, int precision = 6) {
    std::ostringstream s;
    s.precision(precision);
    s << v;
    return s.str();
}

double bern_gauss_loglik(double x, double theta) {
    return std::log(0.5 * oracle::normal_pdf(x, 2, 1) + 0.5 * oracle::normal_pdf(x, theta, 1));
}

double bern_gauss_posterior(double x, double theta) {
    const double a = oracle::normal_pdf(x, 2, 1);
    const double b = oracle::normal_pdf(x, theta, 1);
    return b / (a + b);
}

// Largest principal angle between column spaces, computed from its sine.
double subspace_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const Eigen::MatrixXd qa = Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
    const Eigen::MatrixXd qb = Eigen::HouseholderQR<Eigen::MatrixXd>(b).householderQ() * Eigen::MatrixXd::Identity(b.rows(), b.cols());
    const Eigen::MatrixXd residual = qb - qa * (qa.transpose() * qb);
    const double s = Eigen::JacobiSVD<Eigen::MatrixXd>(residual).singularValues()[0];
    return std::asin(std::min(1.0, s));
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void put(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

int cli(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    if (code != 0) {
        std::cerr << err.str();
    }
    return code;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::current_path() / "acceptance-out" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// ----- criteria -----

void elbo_suite(Report& r) {
    oracle::Gen g(1001);
    double worst_slack = 0.0;
    double worst_gap = 0.0;
    for (int t = 0; t < 50; ++t) {
        const double theta = g.uniform(-5, 5);
        const double phi = g.uniform(0, 1);
        const double x = g.uniform(-3, 4);
        const auto model = latent::bernoulli_gaussian_model(theta);
        const auto obs = expfam::scalar_observation(x);
        const double ll = bern_gauss_loglik(x, theta);
        for (auto form : {latent::ElboForm::LearningSignal, latent::ElboForm::EnergyEntropy,
                          latent::ElboForm::CrossEntropyKL, latent::ElboForm::CompactKL, latent::ElboForm::LLminusKL}) {
            const double bound = latent::elbo(model, divergences::FinitePmf(Eigen::Vector2d(1 - phi, phi)), obs, form).value;
            worst_slack = std::max(worst_slack, bound - ll);
            r.check(bound - ll <= 1e-12, "elbo above loglik at theta=" + num(theta) + " phi=" + num(phi));
        }
        const double post = bern_gauss_posterior(x, theta);
        const double tight =
            latent::elbo(model, divergences::FinitePmf(Eigen::Vector2d(1 - post, post)), obs).value;
        worst_gap = std::max(worst_gap, std::abs(tight - ll));
        r.check(std::abs(tight - ll) <= 1e-12, "bound not tight at the posterior, theta=" + num(theta));
    }
    r.note("max elbo-loglik " + num(worst_slack, 3) + ", max gap at posterior " + num(worst_gap, 3));
}

void posterior_symmetry(Report& r) {
    const auto post = latent::exact_posterior(latent::bernoulli_gaussian_model(2.0), expfam::scalar_observation(0.0));
    r.check(post[1] == 0.5, "p(z=1|x=0,theta=2) = " + num(post[1], 17));
    r.note("p(z=1|x=0,theta=2) = " + num(post[1], 17));
}

bool non_decreasing(const std::vector<double>& v, double slack, double& worst) {
    bool ok = true;
    for (std::size_t i = 1; i < v.size(); ++i) {
        worst = std::min(worst, v[i] - v[i - 1]);
        ok = ok && v[i] >= v[i - 1] - slack;
    }
    return ok;
}

void em_monotonicity(Report& r) {
    oracle::Gen g(1003);
    double worst = 0.0;
    int runs = 0;
    for (int t = 0; t < 7; ++t) {
        const int d = g.integer(1, 3);
        const int k = g.integer(2, 4);
        Eigen::MatrixXd data(200, d);
        for (int n = 0; n < 200; ++n) {
            const double shift = 3.0 * (n % k);
            for (int j = 0; j < d; ++j) {
                data(n, j) = shift + g.normal();
            }
        }
        const auto fit = latent::gmm_fit(data, k, latent::KMeansStart{static_cast<std::uint64_t>(t)}, {.max_iters = 300});
        r.check(non_decreasing(fit.trace.column("loglik"), 1e-9, worst), "GMM run " + std::to_string(t));
        ++runs;
    }
    for (int t = 0; t < 7; ++t) {
        const int w = g.integer(3, 8);
        const int k = g.integer(2, 3);
        Eigen::MatrixXd data(150, w);
        for (int n = 0; n < 150; ++n) {
            for (int j = 0; j < w; ++j) {
                const double p = ((n % k) + j) % 2 == 0 ? 0.85 : 0.15;
                data(n, j) = g.uniform(0, 1) < p ? 1.0 : 0.0;
            }
        }
        const auto fit = latent::bernoulli_mixture_fit(data, k, latent::KMeansStart{static_cast<std::uint64_t>(t)},
                                                       {.max_iters = 300});
        r.check(non_decreasing(fit.trace.column("loglik"), 1e-9, worst), "Bernoulli mixture run " + std::to_string(t));
        ++runs;
    }
    for (int t = 0; t < 6; ++t) {
        const int d = g.integer(2, 6);
        const int m = g.integer(1, d - 1);
        const Eigen::MatrixXd data = g.matrix(150, d) * g.matrix(d, d);
        const auto fit = latent::ppca_fit(data, m, latent::PpcaRandomStart{static_cast<std::uint64_t>(t), 1.0},
                                          {.max_iters = 1000, .tol = 1e-12});
        r.check(non_decreasing(fit.trace.column("loglik"), 1e-9, worst), "PPCA run " + std::to_string(t));
        ++runs;
    }
    r.note(std::to_string(runs) + " runs, most negative step " + num(worst, 3));
}

void kmeans_bridge(Report& r) {
    oracle::Gen g(1004);
    Eigen::MatrixXd data(100, 2);
    for (int n = 0; n < 100; ++n) {
        const double c = n < 50 ? -5.0 : 5.0;
        data.row(n) << c + g.normal(), c + g.normal();
    }
    const auto init = clustering::initial_prototypes(data, 2, clustering::RandomPoints{17});
    const auto km = clustering::fit(data, 2, clustering::GivenPrototypes{init});
    latent::GaussianMixture start;
    start.weights = Eigen::Vector2d(0.5, 0.5);
    for (int k = 0; k < 2; ++k) {
        start.means.push_back(init.row(k).transpose());
        start.covariances.push_back(1e-6 * Eigen::MatrixXd::Identity(2, 2));
    }
    const auto em = latent::gmm_fit(data, 2, latent::GivenStart<latent::GaussianMixture>{start},
                                    {.fixed_isotropic_variance = 1e-6});
    const auto hard = latent::hard_assignments(em.responsibilities);
    int disagreements = 0;
    for (std::size_t n = 0; n < hard.size(); ++n) {
        disagreements += hard[n] != km.state.assignments[n] ? 1 : 0;
    }
    r.check(disagreements == 0, std::to_string(disagreements) + " assignments differ");
    int size0 = 0;
    for (int a : km.state.assignments) {
        size0 += a == 0 ? 1 : 0;
    }
    r.note("100 points, 0 disagreements required, got " + std::to_string(disagreements) + ", cluster sizes " +
           std::to_string(size0) + "/" + std::to_string(100 - size0));
}

void rbm_oracle(Report& r) {
    oracle::Gen g(1005);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const int d = g.integer(1, 6);
        const int m = g.integer(1, 10 - d);
        rbm::RbmParams p{g.matrix(m, 1).col(0), g.matrix(d, 1).col(0), g.matrix(d, m)};
        const Eigen::VectorXd x = oracle::bits(static_cast<unsigned>(g.integer(0, (1 << d) - 1)), d);
        const auto grad = rbm::exact_gradient(p, x);
        auto fd = [&](double& slot) {
            const double keep = slot;
            const double v = oracle::central_difference(
                [&](double u) {
                    slot = u;
                    return oracle::rbm_log_marginal(p.a, p.b, p.W, x);
                },
                keep, 1e-5);
            slot = keep;
            return v;
        };
        for (int j = 0; j < m; ++j) {
            worst = std::max(worst, std::abs(grad.a[j] - fd(p.a[j])));
        }
        for (int i = 0; i < d; ++i) {
            worst = std::max(worst, std::abs(grad.b[i] - fd(p.b[i])));
            for (int j = 0; j < m; ++j) {
                worst = std::max(worst, std::abs(grad.W(i, j) - fd(p.W(i, j))));
            }
        }
    }
    r.check(worst < 1e-6, "max |exact - finite difference| = " + num(worst, 3));

    const auto zero = rbm::RbmParams::zeros(3, 2);
    const Eigen::VectorXd x = Eigen::Vector3d(1, 0, 1);
    Rng rng(1005);
    const int draws = 100000;
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(3, 2);
    Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(3, 2);
    for (int t = 0; t < draws; ++t) {
        const auto cd = rbm::cd_k_gradient(zero, x, 1, rng);
        sum += cd.W;
        sum_sq += cd.W.cwiseProduct(cd.W);
    }
    double worst_z = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double mean = sum(i, j) / draws;
            const double se = std::sqrt((sum_sq(i, j) / draws - mean * mean) / draws);
            const double z = std::abs(mean - (0.5 * x[i] - 0.25)) / se;
            worst_z = std::max(worst_z, z);
            r.check(z <= 3.0, "CD-1 W(" + std::to_string(i) + "," + std::to_string(j) + ") off by " + num(z, 3) + " s.e.");
        }
    }
    r.note("FD max error " + num(worst, 3) + " over 50 models, CD-1 max deviation " + num(worst_z, 3) + " s.e.");
}

void ising_suite(Report& r) {
    Rng data_rng(1006);
    const auto [x, truth] = inference::sample_ising(3, 3, 0.15, 0.5, data_rng);
    const inference::IsingInstance inst{3, 3, x, 0.15, 0.5};
    Rng rng(1007);
    const auto gibbs = inference::gibbs_ising(inst, 1000000, 1000, rng);
    const auto brute = oracle::ising_marginals(3, 3, x, 0.15, 0.5);
    double worst = 0.0;
    for (int i = 0; i < 9; ++i) {
        worst = std::max(worst, std::abs(gibbs.marginals[i] - brute[static_cast<std::size_t>(i)]));
    }
    r.check(worst < 0.02, "Gibbs max marginal error " + num(worst, 3));

    oracle::Gen g(1008);
    std::size_t updates = 0;
    for (int t = 0; t < 20; ++t) {
        const int h = g.integer(2, 4);
        const int w = g.integer(2, 4);
        Rng ir(static_cast<std::uint64_t>(2000 + t));
        const double eta1 = g.uniform(-1, 1);
        const double eta2 = g.uniform(-2, 2);
        const auto xs = inference::sample_ising(h, w, eta1, eta2, ir).first;
        const auto fit = inference::mfvi_ising({h, w, xs, eta1, eta2}, {.record_site_updates = true});
        const auto& f = fit.site_free_energies;
        for (std::size_t i = 1; i < f.size(); ++i) {
            r.check(f[i] <= f[i - 1] + 1e-10, "free energy rose at update " + std::to_string(i));
        }
        updates += f.size() - 1;
    }

    Rng kr(1009);
    auto final_kl = [&](double eta2) {
        const auto xs = inference::sample_ising(4, 4, 0.15, eta2, kr).first;
        return inference::mfvi_ising({4, 4, xs, 0.15, eta2}).trace.column("kl_exact").back();
    };
    const double strong = final_kl(2.0);
    const double weak = final_kl(0.2);
    r.check(strong < weak, "KL at eta2=2 (" + num(strong) + ") not below eta2=0.2 (" + num(weak) + ")");
    r.note("Gibbs max error " + num(worst, 3) + ", " + std::to_string(updates) + " monotone site updates, KL " +
           num(strong, 4) + " (eta2=2) vs " + num(weak, 4) + " (eta2=0.2)");
}

void projections(Report& r) {
    const inference::MixtureOfGaussians1D target{Eigen::Vector2d(0.3, 0.7), Eigen::Vector2d(-1, 1),
                                                 Eigen::Vector2d(0.3, 0.3)};
    const auto mproj = inference::m_projection_gaussian(target);
    r.check(std::abs(mproj.m - 0.4) <= 1e-15, "M-projection m = " + num(mproj.m, 17));
    r.check(std::abs(mproj.gamma2 - 1.14) <= 1e-12, "M-projection gamma2 = " + num(mproj.gamma2, 17));
    const auto iproj = inference::i_projection_gaussian(target);
    r.check(std::abs(iproj.q.m - 1.0) <= 0.05 && std::abs(iproj.q.gamma2 - 0.3) <= 0.05,
            "I-projection (m, gamma2) = (" + num(iproj.q.m, 5) + ", " + num(iproj.q.gamma2, 5) +
                "), expected (1, 0.3) +- 0.05");
    const double kl_found = inference::kl_gaussian_to_mixture(iproj.q, target);
    const double kl_expected = inference::kl_gaussian_to_mixture({1.0, 0.3}, target);
    r.note("M-projection (" + num(mproj.m, 17) + ", " + num(mproj.gamma2, 17) + "), I-projection (" +
           num(iproj.q.m, 5) + ", " + num(iproj.q.gamma2, 5) + ") with KL " + num(kl_found, 5) + " vs KL " +
           num(kl_expected, 5) + " at (1, 0.3)");
}

void divergence_identities(Report& r) {
    oracle::Gen g(1010);
    double worst_bregman = 0.0;
    const auto bern = expfam::ExpFamModel::bernoulli();
    const auto gauss = expfam::ExpFamModel::gaussian(1);
    for (int t = 0; t < 200; ++t) {
        const double p = g.uniform(0.02, 0.98);
        const double q = g.uniform(0.02, 0.98);
        const double kb = expfam::kl_exponential(bern, {Eigen::VectorXd::Constant(1, std::log(p / (1 - p)))},
                                                 {Eigen::VectorXd::Constant(1, std::log(q / (1 - q)))});
        worst_bregman = std::max(worst_bregman, std::abs(kb - oracle::kl_bernoulli(p, q)));

        const double m1 = g.uniform(-3, 3);
        const double v1 = g.uniform(0.1, 4);
        const double m2 = g.uniform(-3, 3);
        const double v2 = g.uniform(0.1, 4);
        const double kg = expfam::kl_exponential(gauss, expfam::gaussian_natural(m1, v1), expfam::gaussian_natural(m2, v2));
        worst_bregman = std::max(worst_bregman, std::abs(kg - oracle::kl_gaussian(m1, v1, m2, v2)));
    }
    r.check(worst_bregman < 1e-9, "Bregman KL error " + num(worst_bregman, 3));

    double worst_variational = 0.0;
    for (int t = 0; t < 50; ++t) {
        const int n = g.integer(2, 6);
        const auto pv = g.pmf(n);
        const auto qv = g.pmf(n);
        const divergences::FinitePmf p(pv);
        const divergences::FinitePmf q(qv);
        for (const auto& f : {divergences::FGenerator::kl_forward(), divergences::FGenerator::jensen_shannon(),
                              divergences::FGenerator::alpha(g.uniform(0.1, 0.9)), divergences::FGenerator::alpha(2.0)}) {
            const double closed = divergences::f_divergence_closed(p, q, f).value;
            const double variational = divergences::f_divergence_variational(p, q, f).value.value;
            worst_variational = std::max(worst_variational, std::abs(closed - variational));
        }
    }
    r.check(worst_variational < 1e-9, "variational f-divergence error " + num(worst_variational, 3));

    double worst_alpha = 0.0;
    for (int t = 0; t < 50; ++t) {
        const int n = g.integer(2, 6);
        const auto pv = g.pmf(n);
        const auto qv = g.pmf(n);
        const divergences::FinitePmf p(pv);
        const divergences::FinitePmf q(qv);
        const double forward = oracle::kl_discrete(std::vector<double>(pv.begin(), pv.end()), std::vector<double>(qv.begin(), qv.end()));
        const double reverse = oracle::kl_discrete(std::vector<double>(qv.begin(), qv.end()), std::vector<double>(pv.begin(), pv.end()));
        for (double a : {1 - 1e-6, 1 + 1e-6}) {
            worst_alpha = std::max(worst_alpha, std::abs(divergences::alpha_divergence(p, q, a).value - forward));
        }
        for (double a : {1e-6, -1e-6}) {
            worst_alpha = std::max(worst_alpha, std::abs(divergences::alpha_divergence(p, q, a).value - reverse));
        }
    }
    r.check(worst_alpha < 1e-4, "alpha-divergence limit error " + num(worst_alpha, 3));
    r.note("Bregman " + num(worst_bregman, 3) + ", variational " + num(worst_variational, 3) + ", alpha limits " +
           num(worst_alpha, 3));
}

// -F(phi) for q(z=1) = sigmoid(phi) on the Bernoulli-Gaussian joint, from densities.
double bern_gauss_free_energy(double x, double theta, double phi) {
    const double q1 = 1.0 / (1.0 + std::exp(-phi));
    const double q0 = 1.0 - q1;
    const double lj0 = std::log(0.5 * oracle::normal_pdf(x, 2, 1));
    const double lj1 = std::log(0.5 * oracle::normal_pdf(x, theta, 1));
    return q0 * (std::log(q0) - lj0) + q1 * (std::log(q1) - lj1);
}

// KL(N(b, e^{2s}) || p(z|x)) up to ln p(x), prior N(0,1), likelihood N(x|z,1).
double gauss_free_energy(double x, double b, double s) {
    const double g2 = std::exp(2 * s);
    return -0.5 * std::log(2 * oracle::kPi * g2) - 0.5 + 0.5 * std::log(2 * oracle::kPi) + 0.5 * (b * b + g2) +
           0.5 * std::log(2 * oracle::kPi) + 0.5 * ((x - b) * (x - b) + g2);
}

void gradient_estimators(Report& r) {
    oracle::Gen g(1011);
    Rng rng(1011);
    double worst_z = 0.0;
    auto within = [&](double mean, double se, double exact, const std::string& what) {
        const double z = std::abs(mean - exact) / se;
        worst_z = std::max(worst_z, z);
        r.check(z <= 3.0, what + " off by " + num(z, 3) + " s.e.");
    };
    for (int t = 0; t < 3; ++t) {
        const double theta = g.uniform(-2, 3);
        const double x = g.uniform(-1, 3);
        const double phi = g.uniform(-2, 2);
        const auto est = inference::reinforce_gradient(latent::bernoulli_gaussian_model(theta),
                                                       expfam::scalar_observation(x), phi, 100000, rng);
        const double exact = oracle::central_difference([&](double v) { return bern_gauss_free_energy(x, theta, v); }, phi);
        within(est.mean[0], est.std_error[0], exact, "REINFORCE (discrete)");
    }
    for (int t = 0; t < 3; ++t) {
        const double x = g.uniform(-2, 2);
        const double b = g.uniform(-2, 2);
        const double s = g.uniform(-1, 0.5);
        const double db = oracle::central_difference([&](double v) { return gauss_free_energy(x, v, s); }, b);
        const double ds = oracle::central_difference([&](double v) { return gauss_free_energy(x, b, v); }, s);
        const auto rep = inference::reparam_gradient(x, b, s, 100000, rng);
        within(rep.mean[0], rep.std_error[0], db, "reparam d/db");
        within(rep.mean[1], rep.std_error[1], ds, "reparam d/ds");
        const auto rf = inference::reinforce_gaussian_gradient(x, b, s, 100000, rng);
        within(rf.mean[0], rf.std_error[0], db, "REINFORCE d/db");
        within(rf.mean[1], rf.std_error[1], ds, "REINFORCE d/ds");
    }

    const fs::path dir = scratch("gradest");
    const int code = cli({"--seed", "2024", "gradest", "--samples", "20000", "--x", "1", "--b", "0", "--s", "0",
                          "--out", dir.string()});
    r.check(code == 0, "gradest exit code " + std::to_string(code));
    bool flag = false;
    if (code == 0) {
        const auto doc = cli::json::parse(slurp(dir / "result.json"));
        flag = doc.at("result").at("reparam_variance_below_reinforce").get<bool>();
        const auto& gauss = doc.at("result").at("gaussian");
        r.note("paired run variances d/db reparam " + num(gauss.at("reparam_variance").at(0).get<double>(), 4) +
               " vs REINFORCE " + num(gauss.at("reinforce_variance").at(0).get<double>(), 4));
    }
    r.check(flag, "result.json does not record reparam_variance_below_reinforce = true");
    r.note("max deviation " + num(worst_z, 3) + " s.e.");
}

void pagerank_suite(Report& r) {
    const pagerank::LinkGraph chain(3, {{0, 1}, {1, 2}});
    const auto sol = pagerank::solve(chain, 0.85);
    const auto dense = oracle::pagerank_dense(3, {{0, 1}, {1, 2}}, 0.85);
    const Eigen::Vector3d expected(0.15, 0.2775, 0.385875);
    const double err_oracle = (sol.ranks - dense).cwiseAbs().maxCoeff();
    const double err_expected = (sol.ranks - expected).cwiseAbs().maxCoeff();
    r.check(err_oracle < 1e-10, "chain vs linear solve " + num(err_oracle, 3));
    r.check(err_expected < 1e-10, "chain vs (0.15, 0.2775, 0.385875) " + num(err_expected, 3));
    const auto cycle = pagerank::solve(pagerank::LinkGraph(2, {{0, 1}, {1, 0}}), 0.85);
    const double err_cycle = (cycle.ranks - Eigen::Vector2d(1, 1)).cwiseAbs().maxCoeff();
    r.check(err_cycle < 1e-10, "two-cycle error " + num(err_cycle, 3));
    r.note("chain ranks (" + num(sol.ranks[0], 12) + ", " + num(sol.ranks[1], 12) + ", " + num(sol.ranks[2], 12) +
           "), two-cycle error " + num(err_cycle, 3));
}

void pca_ppca(Report& r) {
    oracle::Gen g(1012);
    double worst_pca = 0.0;
    for (int t = 0; t < 30; ++t) {
        const int d = g.integer(2, 7);
        const int m = g.integer(1, d - 1);
        const Eigen::MatrixXd data = g.matrix(80, d) * g.matrix(d, d);
        const Eigen::MatrixXd c = data.rowwise() - data.colwise().mean();
        const Eigen::MatrixXd s = c.transpose() * c / 80.0;
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
        const Eigen::MatrixXd top = es.eigenvectors().rightCols(m);
        worst_pca = std::max(worst_pca, subspace_angle(autoencoders::pca_fit(data, m).W, top));
    }
    r.check(worst_pca < 1e-8, "PCA principal angle " + num(worst_pca, 3));

    double worst_post = 0.0;
    for (int t = 0; t < 100; ++t) {
        const int d = g.integer(1, 6);
        const int m = g.integer(1, d);
        latent::PpcaParams p{g.matrix(d, m, 2.0), g.matrix(d, 1).col(0), g.uniform(0.05, 3)};
        const Eigen::VectorXd x = g.matrix(d, 1, 3.0).col(0);
        const auto post = latent::ppca_posterior(p, x);
        const auto [mean, cov] = oracle::gaussian_condition(p.W, p.mu, p.sigma2, x);
        worst_post = std::max({worst_post, (post.mean - mean).cwiseAbs().maxCoeff(), (post.cov - cov).cwiseAbs().maxCoeff()});
    }
    r.check(worst_post < 1e-9, "PPCA posterior error " + num(worst_post, 3));

    const Eigen::MatrixXd data =
        g.matrix(400, 5) * Eigen::Vector<double, 5>(3, 2, 1, 0.5, 0.2).asDiagonal() * g.matrix(5, 5);
    const auto fit = latent::ppca_fit(data, 2, latent::PpcaRandomStart{3, 1.0},
                                      {.max_iters = 5000, .tol = 1e-14, .fixed_sigma2 = 1e-6});
    const double angle = subspace_angle(fit.params.W, autoencoders::pca_fit(data, 2).W);
    r.check(angle < 0.05, "PPCA vs PCA angle at sigma2=1e-6 " + num(angle, 3));
    r.note("PCA angle " + num(worst_pca, 3) + ", posterior error " + num(worst_post, 3) + ", small-noise angle " +
           num(angle, 3));
}

std::string bits_csv(int rows, int cols, std::uint64_t seed) {
    oracle::Gen g(seed);
    std::ostringstream s;
    for (int n = 0; n < rows; ++n) {
        for (int j = 0; j < cols; ++j) {
            s << (g.uniform(0, 1) < ((n + j) % 2 == 0 ? 0.8 : 0.2) ? 1 : 0) << (j + 1 < cols ? "," : "\n");
        }
    }
    return s.str();
}

std::string real_csv(int rows, int cols, std::uint64_t seed) {
    oracle::Gen g(seed);
    std::ostringstream s;
    s.precision(17);
    for (int n = 0; n < rows; ++n) {
        const double shift = n % 2 == 0 ? -3.0 : 3.0;
        for (int j = 0; j < cols; ++j) {
            s << shift + g.normal() << (j + 1 < cols ? "," : "\n");
        }
    }
    return s.str();
}

void determinism(Report& r) {
    const fs::path dir = scratch("determinism");
    put(dir / "real.csv", real_csv(80, 3, 1));
    put(dir / "bits.csv", bits_csv(60, 6, 2));
    put(dir / "edges.csv", "a,b\nb,c\nc,a\na,c\nd,a\n");
    const std::string real = (dir / "real.csv").string();
    const std::string bits = (dir / "bits.csv").string();
    const std::vector<std::vector<std::string>> experiments = {
        {"kmeans", "--data", real, "--k", "2"},
        {"gmm-em", "--data", real, "--k", "2"},
        {"bern-em", "--data", bits, "--k", "2"},
        {"ppca", "--data", real, "--m", "1"},
        {"pca", "--data", real, "--m", "2"},
        {"dict", "--data", real, "--m", "2", "--lambda", "0.2"},
        {"rbm-cd", "--data", bits, "--hidden", "3", "--epochs", "20"},
        {"ising-exact", "--grid", "3x3"},
        {"ising-gibbs", "--grid", "3x3", "--sweeps", "20000"},
        {"ising-mfvi", "--grid", "4x4", "--eta2", "2"},
        {"project"},
        {"divergence", "--p", "0.1,0.2,0.7", "--q", "0.3,0.3,0.4"},
        {"gradest", "--samples", "5000"},
        {"pagerank", "--edges", (dir / "edges.csv").string()},
        {"elbo-demo", "--theta-grid", "-5:5:0.1", "--phi", "0.3"},
    };
    int index = 0;
    for (const auto& base : experiments) {
        std::vector<std::string> outputs;
        for (int rep = 0; rep < 2; ++rep) {
            const fs::path out = dir / (base[0] + "-" + std::to_string(index) + "-" + std::to_string(rep));
            auto args = base;
            args.insert(args.end(), {"--seed", "31337", "--out", out.string()});
            const int code = cli(args);
            r.check(code == 0, base[0] + " exit code " + std::to_string(code));
            std::string all;
            for (const auto& entry : fs::directory_iterator(out)) {
                all += entry.path().filename().string() + "\n" + slurp(entry.path());
            }
            outputs.push_back(all);
        }
        r.check(!outputs[0].empty() && outputs[0] == outputs[1], base[0] + " outputs differ between reruns");
        ++index;
    }
    r.note(std::to_string(experiments.size()) + " subcommands rerun with seed 31337");
}

struct Criterion {
    int id;
    std::string name;
    double limit_seconds;
    std::function<void(Report&)> body;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "ELBO theorem suite", 1.0, elbo_suite},
        {2, "posterior symmetry", 0.0, posterior_symmetry},
        {3, "EM monotonicity", 30.0, em_monotonicity},
        {4, "K-means and EM bridge", 0.0, kmeans_bridge},
        {5, "RBM oracle", 60.0, rbm_oracle},
        {6, "Ising suite", 120.0, ising_suite},
        {7, "projections", 10.0, projections},
        {8, "divergence identities", 0.0, divergence_identities},
        {9, "gradient estimators", 0.0, gradient_estimators},
        {10, "PageRank", 0.0, pagerank_suite},
        {11, "PCA and PPCA", 0.0, pca_ppca},
        {12, "determinism", 0.0, determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Report report;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.body(report);
        } catch (const std::exception& e) {
            report.check(false, std::string("exception: ") + e.what());
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_seconds > 0) {
            report.check(seconds < c.limit_seconds, "runtime " + num(seconds, 3) + " s exceeds " + num(c.limit_seconds) + " s");
        }
        const bool ok = !report.failed();
        failed += ok ? 0 : 1;
        char timing[64];
        std::snprintf(timing, sizeof timing, "%.3f s", seconds);
        std::cout << (ok ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << " (" << timing
                  << (c.limit_seconds > 0 ? ", limit " + num(c.limit_seconds) + " s" : std::string()) << ", "
                  << report.checks() << " checks): " << report.summary() << "\n";
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
