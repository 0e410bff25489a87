#include "cli/commands.hpp"

#include <cmath>
#include <sstream>

#include "lvkit/autoencoders.hpp"
#include "lvkit/clustering.hpp"
#include "lvkit/divergences.hpp"
#include "lvkit/elbo.hpp"
#include "lvkit/gradient_estimators.hpp"
#include "lvkit/ising.hpp"
#include "lvkit/mixture.hpp"
#include "lvkit/pagerank.hpp"
#include "lvkit/ppca.hpp"
#include "lvkit/projections.hpp"
#include "lvkit/rbm.hpp"
#include "lvkit/sgd.hpp"

namespace lvkit::cli {

namespace {

json extended(const ExtendedValue& v) {
    json out;
    out["value"] = v.infinite ? json(nullptr) : json(v.value);
    out["infinite"] = v.infinite;
    if (v.infinite) {
        out["sign"] = v.value > 0 ? 1 : -1;
    }
    return out;
}

json to_json(const std::vector<int>& v) { return json(v); }
using cli::to_json;

std::pair<int, int> parse_grid(const std::string& text) {
    const auto x = text.find('x');
    try {
        if (x == std::string::npos) {
            throw std::invalid_argument(text);
        }
        const int h = std::stoi(text.substr(0, x));
        const int w = std::stoi(text.substr(x + 1));
        if (h < 1 || w < 1) {
            throw std::invalid_argument(text);
        }
        return {h, w};
    } catch (const std::exception&) {
        throw ConfigError("grid must look like HxW with positive sizes, got '" + text + "'");
    }
}

std::vector<double> parse_range(const std::string& text) {
    std::vector<double> parts;
    std::string cell;
    std::istringstream in(text);
    while (std::getline(in, cell, ':')) {
        parts.push_back(parse_list(cell).at(0));
    }
    if (parts.size() != 3 || !(parts[2] > 0) || parts[1] < parts[0]) {
        throw ConfigError("range must be start:stop:step with step > 0 and stop >= start, got '" + text + "'");
    }
    const auto n = static_cast<long long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9)) + 1;
    if (n > 10000000) {
        throw ConfigError("range '" + text + "' has too many points");
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) {
        out.push_back(parts[0] + static_cast<double>(i) * parts[2]);
    }
    return out;
}

divergences::FinitePmf pmf_from(const std::string& text) {
    const auto v = parse_list(text);
    return divergences::FinitePmf(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
}

Eigen::VectorXd vector_from(const std::string& text) {
    const auto v = parse_list(text);
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inference::Schedule parse_schedule(const std::string& s) {
    if (s == "constant") {
        return inference::Schedule::Constant;
    }
    if (s == "inverse-iter") {
        return inference::Schedule::InverseIter;
    }
    if (s == "inverse-sqrt") {
        return inference::Schedule::InverseSqrt;
    }
    throw ConfigError("unknown schedule '" + s + "'");
}

Trace single_column(const std::string& column, const Eigen::VectorXd& values) {
    Trace t({column});
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        t.append(static_cast<std::size_t>(i), {values[i]});
    }
    return t;
}

// ----- clustering -----

class KMeansCommand : public Command {
   public:
    std::string name() const override { return "kmeans"; }
    std::string module() const override { return "clustering"; }
    std::string description() const override { return "K-means from K random data points"; }
    void add_options(CLI::App& app) override {
        app.add_option("--data", data_, "CSV dataset")->required();
        app.add_option("--k", k_, "number of clusters")->required();
        app.add_option("--max-iters", max_iters_);
    }
    CommandOutput execute(const RunContext& ctx) override {
        const auto fit = clustering::fit(read_matrix_csv(data_), k_, clustering::RandomPoints{ctx.require_seed(name())},
                                         max_iters_);
        json r;
        r["prototypes"] = to_json(fit.state.prototypes);
        r["assignments"] = to_json(fit.state.assignments);
        r["objective"] = fit.state.objective;
        r["iterations"] = fit.iterations;
        r["converged"] = fit.converged;
        r["empty_clusters"] = to_json(fit.empty_clusters);
        return {fit.trace, r, {}};
    }

   private:
    std::string data_;
    int k_ = 2;
    int max_iters_ = 300;
};

// ----- latent_em -----

json mixture_json(const latent::GaussianMixture& p) {
    json r;
    r["weights"] = to_json(p.weights);
    r["means"] = json::array();
    r["covariances"] = json::array();
    for (std::size_t k = 0; k < p.means.size(); ++k) {
        r["means"].push_back(to_json(p.means[k]));
        r["covariances"].push_back(to_json(p.covariances[k]));
    }
    return r;
}

json mixture_json(const latent::BernoulliMixture& p) {
    json r;
    r["weights"] = to_json(p.weights);
    r["probs"] = json::array();
    for (const auto& v : p.probs) {
        r["probs"].push_back(to_json(v));
    }
    return r;
}

class GmmCommand : public Command {
   public:
    std::string name() const override { return "gmm-em"; }
    std::string module() const override { return "latent_em"; }
    std::string description() const override { return "EM for a Gaussian mixture"; }
    void add_options(CLI::App& app) override {
        app.add_option("--data", data_, "CSV dataset")->required();
        app.add_option("--k", k_, "number of components")->required();
        app.add_option("--max-iters", config_.max_iters);
        app.add_option("--tol", config_.tol, "relative log-likelihood gain threshold");
        app.add_option("--fixed-variance", fixed_, "freeze every covariance at this multiple of I");
    }
    CommandOutput execute(const RunContext& ctx) override {
        if (fixed_) {
            config_.fixed_isotropic_variance = *fixed_;
        }
        const auto fit = latent::gmm_fit(read_matrix_csv(data_), k_, latent::KMeansStart{ctx.require_seed(name())}, config_);
        json r = mixture_json(fit.params);
        r["iterations"] = fit.iterations;
        r["converged"] = fit.converged;
        r["assignments"] = to_json(latent::hard_assignments(fit.responsibilities));
        return {fit.trace, r, {}};
    }

   private:
    std::string data_;
    int k_ = 2;
    latent::EmConfig config_;
    std::optional<double> fixed_;
};

class BernoulliEmCommand : public Command {
   public:
    std::string name() const override { return "bern-em"; }
    std::string module() const override { return "latent_em"; }
    std::string description() const override { return "EM for a mixture of Bernoulli vectors"; }
    void add_options(CLI::App& app) override {
        app.add_option("--data", data_, "binary CSV dataset")->required();
        app.add_option("--k", k_, "number of components")->required();
        app.add_option("--max-iters", config_.max_iters);
        app.add_option("--tol", config_.tol);
    }
    CommandOutput execute(const RunContext& ctx) override {
        const auto fit = latent::bernoulli_mixture_fit(read_matrix_csv(data_), k_,
                                                       latent::KMeansStart{ctx.require_seed(name())}, config_);
        json r = mixture_json(fit.params);
        r["iterations"] = fit.iterations;
        r["converged"] = fit.converged;
        r["assignments"] = to_json(latent::hard_assignments(fit.responsibilities));
        return {fit.trace, r, {}};
    }

   private:
    std::string data_;
    int k_ = 2;
    latent::EmConfig config_;
};

class PpcaCommand : public Command {
   public:
    std::string name() const override { return "ppca"; }
    std::string module() const override { return "latent_em"; }
    std::string description() const override { return "EM for probabilistic PCA"; }
    void add_options(CLI::App& app) override {
        app.add_option("--data", data_, "CSV dataset")->required();
        app.add_option("--m", m_, "latent dimension")->required();
        app.add_option("--max-iters", config_.max_iters);
        app.add_option("--tol", config_.tol);
        app.add_option("--sigma2-init", sigma2_init_, "initial noise variance");
        app.add_option("--fixed-sigma2", fixed_, "hold the noise variance fixed");
    }
    CommandOutput execute(const RunContext& ctx) override {
        if (fixed_) {
            config_.fixed_sigma2 = *fixed_;
        }
        const auto fit = latent::ppca_fit(read_matrix_csv(data_), m_,
                                          latent::PpcaRandomStart{ctx.require_seed(name()), sigma2_init_}, config_);
        json r;
        r["W"] = to_json(fit.params.W);
        r["mu"] = to_json(fit.params.mu);
        r["sigma2"] = fit.params.sigma2;
        r["iterations"] = fit.iterations;
        r["converged"] = fit.converged;
        return {fit.trace, r, {}};
    }

   private:
    std::string data_;
    int m_ = 1;
    double sigma2_init_ = 1.0;
    latent::PpcaConfig config_;
    std::optional<double> fixed_;
};

class ElboDemoCommand : public Command {
   public:
    std::string name() const override { return "elbo-demo"; }
    std::string module() const override { return "latent_em"; }
    std::string description() const override {
        return "log-likelihood and ELBO of the Bernoulli-Gaussian model over a theta grid";
    }
    void add_options(CLI::App& app) override {
        app.add_option("--theta-grid", grid_, "start:stop:step")->allow_extra_args(false);
        app.add_option("--phi", phi_, "variational q(z = 1)")->required();
        app.add_option("--x", x_, "observation");
    }
    CommandOutput execute(const RunContext&) override {
        if (!(phi_ >= 0 && phi_ <= 1)) {
            throw ConfigError("--phi must lie in [0, 1]");
        }
        const divergences::FinitePmf q(Eigen::Vector2d(1.0 - phi_, phi_));
        const auto obs = expfam::scalar_observation(x_);
        Trace t({"theta", "loglik", "elbo", "bound_holds"});
        bool all_hold = true;
        double max_elbo_minus_ll = -std::numeric_limits<double>::infinity();
        const auto thetas = parse_range(grid_);
        for (std::size_t i = 0; i < thetas.size(); ++i) {
            const auto model = latent::bernoulli_gaussian_model(thetas[i]);
            const double ll = model.log_marginal(obs);
            const double bound = latent::elbo(model, q, obs, latent::ElboForm::LearningSignal).value;
            const bool holds = bound <= ll + 1e-12;
            all_hold = all_hold && holds;
            max_elbo_minus_ll = std::max(max_elbo_minus_ll, bound - ll);
            t.append(i, {thetas[i], ll, bound, holds ? 1.0 : 0.0});
        }
        json r;
        r["phi"] = phi_;
        r["x"] = x_;
        r["points"] = thetas.size();
        r["bound_holds_everywhere"] = all_hold;
        r["max_elbo_minus_loglik"] = max_elbo_minus_ll;
        return {t, r, {}};
    }

   private:
    std::string grid_ = "-5:5:0.1";
    double phi_ = 0.5;
    double x_ = 0.0;
};

// ----- autoencoders -----

class PcaCommand : public Command {
   public:
    std::string name() const override { return "pca"; }
    std::string module() const override { return "autoencoders"; }
    std::string description() const override { return "principal component analysis"; }
    void add_options(CLI::App& app) override {
        app.add_option("--data", data_, "CSV dataset")->required();
        app.add_option("--m", m_, "number of components")->required();
    }
    CommandOutput execute(const RunContext&) override {
        const Eigen::MatrixXd data = read_matrix_csv(data_);
        const auto fit = autoencoders::pca_fit(data, m_);
        json r;
        r["W"] = to_json(fit.W);
        r["mean"] = to_json(fit.mean);
        r["eigenvalues"] = to_json(fit.eigenvalues);
        r["objective"] = autoencoders::pca_objective(data, fit.W, fit.mean);
        return {single_column("eigenvalue", fit.eigenvalues), r, {}};
    }

   private:
    std::string data_;
    int m_ = 1;
};

class DictCommand : public Command {
   public:
    std::string name() const override { return "dict"; }
    std::string module() const override { return "autoencoders"; }
    std::string description() const override { return "l1 dictionary learning"; }
    void add_options(CLI::App& app) override {
        app.add_option("--data", data_, "CSV dataset")->required();
        app.add_option("--m", m_, "number of atoms")->required();
        app.add_option("--lambda", lambda_, "l1 weight");
        app.add_option("--max-outer", config_.max_outer);
        app.add_option("--tol", config_.tol);
    }
    CommandOutput execute(const RunContext& ctx) override {
        config_.seed = ctx.require_seed(name());
        const auto fit = autoencoders::dict_learn(read_matrix_csv(data_), m_, lambda_, config_);
        json r;
        r["W"] = to_json(fit.dict.W);
        r["codes"] = to_json(fit.dict.codes);
        r["sparsity"] = to_json(fit.dict.sparsity());
        r["iterations"] = fit.iterations;
        r["converged"] = fit.converged;
        r["lambda"] = lambda_;
        return {fit.trace, r, {}};
    }

   private:
    std::string data_;
    int m_ = 1;
    double lambda_ = 0.1;
    autoencoders::DictConfig config_;
};

// ----- rbm -----

class RbmCommand : public Command {
   public:
    std::string name() const override { return "rbm-cd"; }
    std::string module() const override { return "rbm"; }
    std::string description() const override { return "train a binary RBM with CD-k"; }
    void add_options(CLI::App& app) override {
        app.add_option("--data", data_, "binary CSV dataset")->required();
        app.add_option("--hidden", hidden_, "number of hidden units")->required();
        app.add_option("--k", k_, "Gibbs steps per CD estimate");
        app.add_option("--epochs", sgd_.max_iters);
        app.add_option("--lr", sgd_.gamma, "base step size");
        app.add_option("--schedule", schedule_, "constant | inverse-iter | inverse-sqrt");
        app.add_option("--minibatch", sgd_.minibatch);
    }
    CommandOutput execute(const RunContext& ctx) override {
        const std::uint64_t seed = ctx.require_seed(name());
        sgd_.schedule = parse_schedule(schedule_);
        sgd_.seed = seed;
        const Eigen::MatrixXd data = read_matrix_csv(data_);
        const auto init = rbm::initialize(data.cols(), hidden_, seed);
        Rng rng = Rng(seed).split(2);
        const auto fit = rbm::train(init, data, k_, sgd_, rng);
        json r;
        r["a"] = to_json(fit.params.a);
        r["b"] = to_json(fit.params.b);
        r["W"] = to_json(fit.params.W);
        return {fit.trace, r, {}};
    }

   private:
    std::string data_;
    int hidden_ = 1;
    int k_ = 1;
    std::string schedule_ = "constant";
    inference::SgdConfig sgd_{inference::Schedule::Constant, 0.1, 10, 100, 0, 0.0};
};

// ----- approx_inference: Ising -----

class IsingBase : public Command {
   public:
    std::string module() const override { return "approx_inference"; }
    void add_options(CLI::App& app) override {
        app.add_option("--instance", instance_path_, "Ising instance JSON {height, width, eta1, eta2, x}");
        app.add_option("--grid", grid_, "HxW grid when no instance file is given");
        eta1_opt_ = app.add_option("--eta1", eta1_, "coupling strength");
        eta2_opt_ = app.add_option("--eta2", eta2_, "observation strength");
        app.add_option("--x", x_, "row-major +-1 observations; drawn from the model when absent");
    }

   protected:
    // Instance from file or flags; x is sampled from the model (seed required) if not given.
    inference::IsingInstance instance(const RunContext& ctx) const {
        inference::IsingInstance inst;
        if (!instance_path_.empty()) {
            const json j = read_json(instance_path_);
            try {
                inst.height = j.at("height").get<int>();
                inst.width = j.at("width").get<int>();
                inst.eta1 = j.at("eta1").get<double>();
                inst.eta2 = j.at("eta2").get<double>();
                inst.x = j.at("x").get<std::vector<int>>();
            } catch (const json::exception& e) {
                throw ConfigError("Ising instance JSON: " + std::string(e.what()));
            }
            if (eta1_opt_->count() > 0) {
                inst.eta1 = eta1_;
            }
            if (eta2_opt_->count() > 0) {
                inst.eta2 = eta2_;
            }
        } else {
            const auto [h, w] = parse_grid(grid_);
            inst.height = h;
            inst.width = w;
            inst.eta1 = eta1_;
            inst.eta2 = eta2_;
            if (!x_.empty()) {
                for (double v : parse_list(x_)) {
                    inst.x.push_back(static_cast<int>(v));
                    if (static_cast<double>(inst.x.back()) != v) {
                        throw ConfigError("--x entries must be -1 or +1");
                    }
                }
            } else {
                Rng rng = Rng(ctx.require_seed(name())).split(1);
                inst.x = inference::sample_ising(h, w, inst.eta1, inst.eta2, rng).first;
            }
        }
        inference::validate(inst);
        return inst;
    }

    static json instance_json(const inference::IsingInstance& inst) {
        json j;
        j["height"] = inst.height;
        j["width"] = inst.width;
        j["eta1"] = inst.eta1;
        j["eta2"] = inst.eta2;
        j["x"] = inst.x;
        return j;
    }

   private:
    std::string instance_path_;
    std::string grid_ = "3x3";
    double eta1_ = 0.15;
    double eta2_ = 0.5;
    std::string x_;
    CLI::Option* eta1_opt_ = nullptr;
    CLI::Option* eta2_opt_ = nullptr;
};

class IsingExactCommand : public IsingBase {
   public:
    std::string name() const override { return "ising-exact"; }
    std::string description() const override { return "exact Ising posterior by enumeration"; }
    CommandOutput execute(const RunContext& ctx) override {
        const auto inst = instance(ctx);
        const auto ex = inference::ising_exact(inst);
        json r;
        r["instance"] = instance_json(inst);
        r["marginals"] = to_json(ex.marginals);
        r["log_px"] = ex.log_px;
        return {single_column("marginal", ex.marginals), r, {}};
    }
};

class IsingGibbsCommand : public IsingBase {
   public:
    std::string name() const override { return "ising-gibbs"; }
    std::string description() const override { return "Gibbs sampling marginals for the Ising model"; }
    void add_options(CLI::App& app) override {
        IsingBase::add_options(app);
        app.add_option("--sweeps", sweeps_);
        app.add_option("--burn-in", burn_in_);
    }
    CommandOutput execute(const RunContext& ctx) override {
        const auto inst = instance(ctx);
        Rng rng = Rng(ctx.require_seed(name())).split(2);
        const auto gibbs = inference::gibbs_ising(inst, sweeps_, burn_in_, rng);
        json r;
        r["instance"] = instance_json(inst);
        r["marginals"] = to_json(gibbs.marginals);
        r["sweeps"] = sweeps_;
        r["burn_in"] = burn_in_;
        if (inst.sites() <= inference::kMaxExactIsingSites) {
            const auto ex = inference::ising_exact(inst);
            Trace t({"marginal", "exact"});
            for (Eigen::Index i = 0; i < ex.marginals.size(); ++i) {
                t.append(static_cast<std::size_t>(i), {gibbs.marginals[i], ex.marginals[i]});
            }
            r["max_abs_error"] = (gibbs.marginals - ex.marginals).cwiseAbs().maxCoeff();
            return {t, r, {}};
        }
        return {single_column("marginal", gibbs.marginals), r, {}};
    }

   private:
    long long sweeps_ = 100000;
    long long burn_in_ = 1000;
};

class IsingMfviCommand : public IsingBase {
   public:
    std::string name() const override { return "ising-mfvi"; }
    std::string description() const override { return "mean-field variational inference for the Ising model"; }
    void add_options(CLI::App& app) override {
        IsingBase::add_options(app);
        app.add_option("--max-sweeps", config_.max_sweeps);
        app.add_option("--tol", config_.tol);
    }
    CommandOutput execute(const RunContext& ctx) override {
        const auto inst = instance(ctx);
        const auto fit = inference::mfvi_ising(inst, config_);
        json r;
        r["instance"] = instance_json(inst);
        r["q1"] = to_json(fit.state.q1);
        r["free_energy"] = fit.state.free_energy;
        r["sweeps"] = fit.sweeps;
        r["converged"] = fit.converged;
        return {fit.trace, r, {}};
    }

   private:
    inference::MfviConfig config_;
};

// ----- approx_inference: projections and gradients -----

class ProjectCommand : public Command {
   public:
    std::string name() const override { return "project"; }
    std::string module() const override { return "approx_inference"; }
    std::string description() const override { return "M- and I-projections of a 1-D Gaussian mixture"; }
    void add_options(CLI::App& app) override {
        app.add_option("--weights", weights_);
        app.add_option("--means", means_);
        app.add_option("--variances", variances_);
        app.add_option("--strategy", strategy_, "global | local");
        app.add_option("--init-m", init_.m, "starting mean for the local strategy");
        app.add_option("--init-gamma2", init_.gamma2, "starting variance for the local strategy");
    }
    CommandOutput execute(const RunContext&) override {
        inference::MixtureOfGaussians1D target{vector_from(weights_), vector_from(means_), vector_from(variances_)};
        inference::validate(target);
        inference::IProjectionConfig config;
        if (strategy_ == "global") {
            config.strategy = inference::IProjectionConfig::Strategy::GlobalScan;
        } else if (strategy_ == "local") {
            config.strategy = inference::IProjectionConfig::Strategy::LocalFromInit;
        } else {
            throw ConfigError("unknown strategy '" + strategy_ + "'");
        }
        config.init = init_;
        const auto mproj = inference::m_projection_gaussian(target);
        const auto iproj = inference::i_projection_gaussian(target, config);
        Trace t({"m", "gamma2", "kl_q_to_p", "kl_p_to_q"});
        json r;
        int row = 0;
        for (const auto& [label, q] : {std::pair{"m_projection", mproj}, std::pair{"i_projection", iproj.q}}) {
            const double rev = inference::kl_gaussian_to_mixture(q, target);
            const double fwd = inference::kl_mixture_to_gaussian(target, q);
            t.append(static_cast<std::size_t>(row++), {q.m, q.gamma2, rev, fwd});
            r[label] = {{"m", q.m}, {"gamma2", q.gamma2}, {"kl_q_to_p", rev}, {"kl_p_to_q", fwd}};
        }
        return {t, r, {}};
    }

   private:
    std::string weights_ = "0.3,0.7";
    std::string means_ = "-1,1";
    std::string variances_ = "0.3,0.3";
    std::string strategy_ = "global";
    inference::GaussianQ init_{0.0, 1.0};
};

class GradestCommand : public Command {
   public:
    std::string name() const override { return "gradest"; }
    std::string module() const override { return "approx_inference"; }
    std::string description() const override { return "REINFORCE and reparametrization gradient estimates"; }
    void add_options(CLI::App& app) override {
        app.add_option("--samples", samples_);
        app.add_option("--x", x_, "observation");
        app.add_option("--theta", theta_, "Bernoulli-Gaussian parameter for the discrete case");
        app.add_option("--phi", phi_, "Bernoulli logit of q(z = 1)");
        app.add_option("--b", b_, "Gaussian q mean");
        app.add_option("--s", s_, "Gaussian q log standard deviation");
    }
    CommandOutput execute(const RunContext& ctx) override {
        const Rng root(ctx.require_seed(name()));
        Rng discrete_rng = root.split(1);
        Rng gaussian_rng = root.split(2);
        const auto model = latent::bernoulli_gaussian_model(theta_);
        const auto obs = expfam::scalar_observation(x_);
        const auto rf = inference::reinforce_gradient(model, obs, phi_, samples_, discrete_rng);
        const double exact_discrete = inference::bernoulli_free_energy_gradient(model, obs, phi_);
        const auto paired = inference::paired_gaussian_gradients(x_, b_, s_, samples_, gaussian_rng);
        const Eigen::Vector2d exact = inference::gaussian_free_energy_gradient(x_, b_, s_);

        json r;
        r["samples"] = samples_;
        r["bernoulli_reinforce"] = {{"theta", theta_},
                                    {"phi", phi_},
                                    {"mean", rf.mean[0]},
                                    {"std_error", rf.std_error[0]},
                                    {"exact", exact_discrete}};
        r["gaussian"] = {{"b", b_},
                         {"s", s_},
                         {"exact", to_json(Eigen::VectorXd(exact))},
                         {"reparam_mean", to_json(paired.reparam.mean)},
                         {"reparam_variance", to_json(paired.reparam.variance)},
                         {"reinforce_mean", to_json(paired.reinforce.mean)},
                         {"reinforce_variance", to_json(paired.reinforce.variance)}};
        r["reparam_variance_below_reinforce"] = paired.reparam.variance[0] < paired.reinforce.variance[0];
        Trace t({"exact", "reparam_mean", "reparam_variance", "reinforce_mean", "reinforce_variance"});
        for (Eigen::Index i = 0; i < 2; ++i) {
            t.append(static_cast<std::size_t>(i), {exact[i], paired.reparam.mean[i], paired.reparam.variance[i],
                                                   paired.reinforce.mean[i], paired.reinforce.variance[i]});
        }
        return {t, r, {}};
    }

   private:
    int samples_ = 10000;
    double x_ = 0.0;
    double theta_ = 0.0;
    double phi_ = 0.3;
    double b_ = 0.5;
    double s_ = 0.0;
};

// ----- divergences -----

class DivergenceCommand : public Command {
   public:
    std::string name() const override { return "divergence"; }
    std::string module() const override { return "divergences"; }
    std::string description() const override { return "divergences between two pmfs, closed and variational"; }
    void add_options(CLI::App& app) override {
        app.add_option("--p", p_, "comma-separated pmf")->required();
        app.add_option("--q", q_, "comma-separated pmf")->required();
        app.add_option("--alpha", alpha_);
    }
    CommandOutput execute(const RunContext&) override {
        const auto p = pmf_from(p_);
        const auto q = pmf_from(q_);
        if (p.size() != q.size()) {
            throw ConfigError("--p and --q must have the same length");
        }
        json r;
        r["kl_pq"] = extended(divergences::kl(p, q));
        r["kl_qp"] = extended(divergences::kl(q, p));
        r["jensen_shannon"] = divergences::jensen_shannon(p, q);
        r["alpha"] = alpha_;
        r["alpha_divergence"] = extended(divergences::alpha_divergence(p, q, alpha_));
        Trace t({"p", "q", "critic_kl", "critic_js", "critic_alpha"});
        std::vector<Eigen::VectorXd> critics;
        for (const auto& gen : {divergences::FGenerator::kl_forward(), divergences::FGenerator::jensen_shannon(),
                                divergences::FGenerator::alpha(alpha_)}) {
            const auto var = divergences::f_divergence_variational(p, q, gen);
            r["f_divergences"][gen.name()] = {{"closed", extended(divergences::f_divergence_closed(p, q, gen))},
                                              {"variational", extended(var.value)}};
            critics.push_back(var.critic);
        }
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            t.append(static_cast<std::size_t>(i), {p[i], q[i], critics[0][i], critics[1][i], critics[2][i]});
        }
        return {t, r, {}};
    }

   private:
    std::string p_;
    std::string q_;
    double alpha_ = 0.5;
};

// ----- pagerank -----

class PageRankCommand : public Command {
   public:
    std::string name() const override { return "pagerank"; }
    std::string module() const override { return "pagerank"; }
    std::string description() const override { return "unnormalized PageRank of an edge list"; }
    void add_options(CLI::App& app) override {
        app.add_option("--edges", edges_, "CSV of from,to links")->required();
        app.add_option("--d", d_, "damping factor");
        app.add_option("--tol", tol_);
        app.add_option("--max-iters", max_iters_);
    }
    CommandOutput execute(const RunContext&) override {
        const auto [graph, labels] = pagerank::graph_from_labels(read_edges_csv(edges_));
        const auto sol = pagerank::solve(graph, d_, tol_, max_iters_);
        std::string ranks = "page,rank\n";
        for (std::size_t i = 0; i < labels.size(); ++i) {
            ranks += labels[i] + "," + format_double(sol.ranks[static_cast<Eigen::Index>(i)]) + "\n";
        }
        json r;
        r["pages"] = labels;
        r["ranks"] = to_json(sol.ranks);
        r["iterations"] = sol.iterations;
        r["residual"] = sol.residual;
        return {single_column("rank", sol.ranks), r, {{"ranks.csv", ranks}}};
    }

   private:
    std::string edges_;
    double d_ = 0.85;
    double tol_ = 1e-12;
    int max_iters_ = 10000;
};

}  // namespace

std::vector<std::unique_ptr<Command>> make_commands() {
    std::vector<std::unique_ptr<Command>> out;
    out.push_back(std::make_unique<KMeansCommand>());
    out.push_back(std::make_unique<GmmCommand>());
    out.push_back(std::make_unique<BernoulliEmCommand>());
    out.push_back(std::make_unique<PpcaCommand>());
    out.push_back(std::make_unique<PcaCommand>());
    out.push_back(std::make_unique<DictCommand>());
    out.push_back(std::make_unique<RbmCommand>());
    out.push_back(std::make_unique<IsingExactCommand>());
    out.push_back(std::make_unique<IsingGibbsCommand>());
    out.push_back(std::make_unique<IsingMfviCommand>());
    out.push_back(std::make_unique<ProjectCommand>());
    out.push_back(std::make_unique<DivergenceCommand>());
    out.push_back(std::make_unique<GradestCommand>());
    out.push_back(std::make_unique<PageRankCommand>());
    out.push_back(std::make_unique<ElboDemoCommand>());
    return out;
}

}  // namespace lvkit::cli
