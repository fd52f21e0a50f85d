#include "pacchi2/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "pacchi2/bounds.hpp"
#include "pacchi2/csv.hpp"
#include "pacchi2/errors.hpp"
#include "pacchi2/moments.hpp"
#include "pacchi2/parallel.hpp"
#include "pacchi2/posterior_opt.hpp"

namespace pacchi2 {

using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

double gibbs_test_error(const std::vector<double>& q, const std::vector<double>& test_risks) {
    if (q.size() != test_risks.size()) throw std::invalid_argument("posterior/test risk length mismatch");
    return expected_risk(q, test_risks);
}

double gibbs_test_error(const Posterior& q, const std::vector<double>& t) { return gibbs_test_error(q.weights(), t); }

double hhi(const std::vector<double>& q) {
    double s = 0.0;
    for (double x : q) s += x * x;
    return std::sqrt(s);
}

double hhi(const Posterior& q) { return hhi(q.weights()); }

std::vector<double> cdf(const std::vector<double>& q) {
    std::vector<double> out(q.size());
    std::partial_sum(q.begin(), q.end(), out.begin());
    return out;
}

std::size_t n_alpha(const std::vector<double>& q, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    double acc = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        acc += q[i];
        // Absorb summation error so that e.g. 800 uniform weights of 1/1000 reach 0.8.
        if (acc >= alpha - 1e-12) return i + 1;
    }
    return q.size();
}

std::size_t n_alpha(const Posterior& q, double alpha) { return n_alpha(q.weights(), alpha); }

const MethodReport* Comparison::find(const std::string& method) const {
    for (const auto& m : methods)
        if (m.method == method) return &m;
    return nullptr;
}

const std::vector<double>* Comparison::posterior(const std::string& method) const {
    for (const auto& [name, w] : posteriors)
        if (name == method) return &w;
    return nullptr;
}

namespace {

MethodReport describe(const std::string& name, const std::vector<double>& q, const RiskProfile& profile,
                      const std::vector<double>& test) {
    MethodReport r;
    r.method = name;
    r.empirical_risk = expected_risk(q, profile.risks());
    r.gibbs_test_error = gibbs_test_error(q, test);
    r.support_size = 0;
    for (std::size_t i = 0; i < q.size(); ++i)
        if (q[i] > 0.0) r.support_size = i + 1;
    r.hhi = hhi(q);
    for (std::size_t k = 0; k < kAlphaLevels.size(); ++k) r.n_alpha[k] = n_alpha(q, kAlphaLevels[k]);
    return r;
}

}  // namespace

Comparison run_comparison(const RiskProfile& profile, const std::vector<double>& test,
                          const BoundConfig& cfg_base, const ComparisonOptions& opts) {
    if (test.size() != profile.size()) throw std::invalid_argument("test risks do not match the profile");
    if (!cfg_base.prior.is_uniform()) throw std::invalid_argument("comparison requires a uniform prior");
    Comparison out;
    for (Distance d : opts.distances) {
        const std::string name = to_string(d);
        const auto t0 = Clock::now();
        try {
            SubsetSolution sol = ordered_subset_search(profile, cfg_base.with_distance(d));
            const double dt = seconds_since(t0);
            MethodReport r = describe(name, sol.posterior->weights(), profile, test);
            r.bound = sol.bound.value;
            r.wall_time_s = dt;
            out.optimize_wall_time_s += dt;
            out.posteriors.emplace_back(name, sol.posterior->weights());
            out.methods.push_back(std::move(r));
        } catch (const std::exception& e) {
            MethodReport r;
            r.method = name;
            r.failure = e.what();
            r.wall_time_s = seconds_since(t0);
            out.methods.push_back(std::move(r));
        }
    }
    {
        const auto t0 = Clock::now();
        Posterior g = gibbs_kl_posterior(profile, profile.m());
        const double dt = seconds_since(t0);
        MethodReport r = describe("gibbs_kl", g.weights(), profile, test);
        r.wall_time_s = dt;
        out.optimize_wall_time_s += dt;
        out.posteriors.emplace_back("gibbs_kl", g.weights());
        out.methods.push_back(std::move(r));
    }
    if (opts.enable_ccp) {
        const auto t0 = Clock::now();
        CCPMultistart ms = ccp_multistart(profile, cfg_base.with_distance(Distance::Kl), opts.ccp_starts,
                                          derive_seed(opts.seed, 0xcc9), test, opts.ccp);
        const double dt = seconds_since(t0);
        MethodReport r;
        if (ms.best) {
            const CCPResult& best = ms.runs[*ms.best];
            r = describe("kl_ccp", best.posterior.weights(), profile, test);
            r.bound = best.r_value;
            out.posteriors.emplace_back("kl_ccp", best.posterior.weights());
        } else {
            r.method = "kl_ccp";
            const auto& f = ms.runs.front().failure;
            r.failure = f ? to_string(*f) : "no successful start";
        }
        r.wall_time_s = dt;
        out.methods.push_back(std::move(r));
        out.ccp = std::move(ms);
    }
    return out;
}

CVReport cross_validate(const Dataset& d, const SplitPlan& plan, const std::vector<double>& lambdas, int folds,
                        std::uint64_t seed, const SvmOptions& opts) {
    if (folds < 2) throw std::invalid_argument("cross-validation needs at least 2 folds");
    if (lambdas.empty()) throw std::invalid_argument("empty lambda grid");
    const auto t0 = Clock::now();
    std::vector<double> grid(lambdas);
    std::sort(grid.begin(), grid.end());

    std::vector<std::size_t> pool = plan.composite();
    std::mt19937_64 rng(derive_seed(seed, 0xcf));
    std::shuffle(pool.begin(), pool.end(), rng);
    if (pool.size() < static_cast<std::size_t>(folds)) throw std::invalid_argument("fewer rows than folds");
    std::vector<std::vector<std::size_t>> fold_rows(folds);
    for (std::size_t j = 0; j < pool.size(); ++j) fold_rows[j % folds].push_back(pool[j]);

    const double gamma = pipeline_gamma(d, plan, seed);
    // Seeds follow the lambda value, so permuting the grid changes nothing.
    auto lambda_key = [](double l) {
        std::uint64_t bits;
        std::memcpy(&bits, &l, sizeof bits);
        return bits;
    };
    std::vector<double> errors(grid.size() * folds);
    parallel_for(errors.size(), [&](std::size_t job) {
        const std::size_t li = job / folds;
        const int f = static_cast<int>(job % folds);
        std::vector<std::size_t> train;
        for (int g = 0; g < folds; ++g)
            if (g != f) train.insert(train.end(), fold_rows[g].begin(), fold_rows[g].end());
        std::sort(train.begin(), train.end());
        KernelSvm svm = train_svm(d, train, grid[li], gamma, derive_seed(seed ^ lambda_key(grid[li]), f), opts);
        errors[job] = error_rate(svm, d, fold_rows[f]);
    });

    CVReport cv;
    cv.lambdas = grid;
    std::size_t best = 0;
    for (std::size_t li = 0; li < grid.size(); ++li) {
        double s = 0.0;
        for (int f = 0; f < folds; ++f) s += errors[li * folds + f];
        cv.fold_mean_errors.push_back(s / folds);
        if (cv.fold_mean_errors[li] < cv.fold_mean_errors[best]) best = li;
    }
    cv.best_lambda = grid[best];
    cv.cv_error = cv.fold_mean_errors[best];
    std::vector<std::size_t> all = plan.composite();
    std::sort(all.begin(), all.end());
    KernelSvm final_svm = train_svm(d, all, cv.best_lambda, gamma, derive_seed(seed ^ lambda_key(cv.best_lambda), 99), opts);
    cv.test_error = error_rate(final_svm, d, plan.test_idx);
    cv.wall_time_s = seconds_since(t0);
    return cv;
}

void attach_comparison(CVReport& cv, double sq_test_error) {
    cv.delta_test_error = cv.test_error - sq_test_error;
    if (cv.test_error > 0.0)
        cv.relative_test_error = *cv.delta_test_error / cv.test_error;
    else
        cv.relative_test_error.reset();
}

PreparedData prepare(const Dataset& raw, std::uint64_t seed) {
    PreparedData p{raw, split_dataset(raw, seed)};
    standardize(p.data, p.plan.composite());
    return p;
}

namespace {

using ojson = nlohmann::ordered_json;

ojson opt_number(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

ojson summary_json(const Summary& s) {
    if (s.count == 0) return nullptr;
    return ojson{{"count", s.count}, {"min", s.min}, {"mean", s.mean}, {"sd", s.sd}};
}

std::string cell(const std::optional<double>& v) { return v ? format_real(*v) : "NA"; }

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p);
    if (!out) throw InputError("cannot write " + p.string());
    out << text;
    if (!out) throw InputError("failed writing " + p.string());
}

}  // namespace

std::string report_json(const RunResult& r, const RunConfig& cfg) {
    const auto& profile = r.ensemble.profile;
    ojson j;
    j["dataset"] = r.dataset;
    j["seed"] = cfg.seed;
    j["m"] = r.m;
    j["v"] = r.v;
    j["t"] = r.t;
    j["H"] = profile.size();
    j["delta"] = cfg.delta;
    j["gamma"] = r.ensemble.gamma;
    const MomentConstant ikl = i_r_kl(profile.m());
    j["kl_moment_constant"] = {{"value", ikl.value},
                               {"maximizer", ikl.maximizer_l},
                               {"m_effective", ikl.m_effective},
                               {"capped", ikl.capped}};
    ojson methods = ojson::array();
    for (const auto& m : r.comparison.methods) {
        ojson e;
        e["method"] = m.method;
        e["bound"] = opt_number(m.bound);
        if (m.failure) {
            e["failure"] = *m.failure;
        } else {
            e["empirical_risk"] = m.empirical_risk;
            e["gibbs_test_error"] = m.gibbs_test_error;
            e["support_size"] = m.support_size;
            e["hhi"] = m.hhi;
            ojson na;
            for (std::size_t k = 0; k < kAlphaLevels.size(); ++k) na[format_short(kAlphaLevels[k])] = m.n_alpha[k];
            e["n_alpha"] = na;
        }
        e["wall_time_s"] = m.wall_time_s;
        methods.push_back(e);
    }
    j["methods"] = methods;
    if (r.comparison.ccp) {
        const auto& c = *r.comparison.ccp;
        j["ccp"] = {{"starts", c.runs.size()},
                    {"failures", c.failures},
                    {"r", summary_json(c.r)},
                    {"gibbs_test_error", summary_json(c.gibbs_test_error)}};
    }
    if (r.cv) {
        const auto& cv = *r.cv;
        j["cv"] = {{"best_lambda", cv.best_lambda},
                   {"cv_error", cv.cv_error},
                   {"test_error", cv.test_error},
                   {"wall_time_s", cv.wall_time_s},
                   {"delta_test_error", opt_number(cv.delta_test_error)},
                   {"relative_test_error", opt_number(cv.relative_test_error)}};
    } else {
        j["cv"] = nullptr;
    }
    ojson labels = ojson::array();
    for (std::size_t i = 0; i < profile.size(); ++i) labels.push_back(profile.labels()[profile.perm()[i]]);
    j["lambdas_sorted"] = labels;
    ojson post, cdfs;
    for (const auto& [name, w] : r.comparison.posteriors) {
        post[name] = w;
        cdfs[name] = cdf(w);
    }
    j["posteriors"] = post;
    j["cdfs"] = cdfs;
    return j.dump(2) + "\n";
}

RunResult run_experiment(const RunConfig& cfg) {
    Dataset raw = load_dataset(cfg.dataset_path, cfg.label_column, cfg.positive_label);
    return run_experiment(raw, cfg);
}

RunResult run_experiment(const Dataset& raw, const RunConfig& cfg) {
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
    if (cfg.distances.empty()) throw std::invalid_argument("no distance selected");
    PreparedData prep = prepare(raw, cfg.seed);
    const std::vector<double> lambdas = lambda_grid(cfg.h);

    RunResult r;
    r.dataset = raw.name;
    r.m = prep.plan.train_idx.size();
    r.v = prep.plan.valid_idx.size();
    r.t = prep.plan.test_idx.size();
    r.ensemble = build_risk_profile(prep.data, prep.plan, lambdas, cfg.seed);

    BoundConfig base(Distance::Lin, static_cast<int>(r.v), cfg.delta, Prior::uniform(lambdas.size()));
    ComparisonOptions copts;
    copts.distances = cfg.distances;
    copts.enable_ccp = cfg.enable_ccp;
    copts.ccp_starts = cfg.ccp_starts;
    copts.seed = cfg.seed;
    r.comparison = run_comparison(r.ensemble.profile, r.ensemble.sorted_test_risks, base, copts);

    if (cfg.run_cv) {
        r.cv = cross_validate(prep.data, prep.plan, lambdas, cfg.folds, cfg.seed);
        if (const MethodReport* sq = r.comparison.find("sq"); sq && !sq->failure)
            attach_comparison(*r.cv, sq->gibbs_test_error);
    }

    r.report_json = report_json(r, cfg);
    namespace fs = std::filesystem;
    const fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create " + dir.string() + ": " + ec.message());
    write_text(dir / "report.json", r.report_json);
    write_profile_csv((dir / "profile.csv").string(), r.ensemble);

    auto bound_of = [&](const char* m) -> std::optional<double> {
        const MethodReport* x = r.comparison.find(m);
        return x && !x->failure ? x->bound : std::nullopt;
    };
    auto test_of = [&](const char* m) -> std::optional<double> {
        const MethodReport* x = r.comparison.find(m);
        return x && !x->failure ? std::optional<double>(x->gibbs_test_error) : std::nullopt;
    };
    std::string t2 = "dataset,B_lin,B_sq,B_kl,T_lin,T_sq,T_kl\n" + r.dataset;
    for (const char* m : {"lin", "sq", "kl"}) t2 += "," + cell(bound_of(m));
    for (const char* m : {"lin", "sq", "kl"}) t2 += "," + cell(test_of(m));
    write_text(dir / "table2.csv", t2 + "\n");

    std::string t5 = "dataset,lambda_star,cv_test_error,sq_chi2_test_error,delta,relative,sq_chi2_bound\n" + r.dataset;
    std::optional<double> ls, ct, dl, rel;
    if (r.cv) {
        ls = r.cv->best_lambda;
        ct = r.cv->test_error;
        dl = r.cv->delta_test_error;
        rel = r.cv->relative_test_error;
    }
    for (const auto& v : {ls, ct, test_of("sq"), dl, rel, bound_of("sq")}) t5 += "," + cell(v);
    write_text(dir / "table5.csv", t5 + "\n");
    return r;
}

}  // namespace pacchi2
