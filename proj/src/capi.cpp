#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "pacchi2/bounds.hpp"
#include "pacchi2/csv.hpp"
#include "pacchi2/ensemble.hpp"
#include "pacchi2/errors.hpp"
#include "pacchi2/experiment.hpp"
#include "pacchi2/moments.hpp"
#include "pacchi2/pacchi2.h"
#include "pacchi2/posterior_opt.hpp"
#include "pacchi2/verify.hpp"

struct pc2_profile {
    pacchi2::RiskProfile profile;
};

struct pc2_posterior {
    std::vector<double> weights;
    std::size_t support = 0;
    double bound = std::numeric_limits<double>::quiet_NaN();
    double empirical = 0.0;
};

namespace {

thread_local std::string g_last_error;

pc2_status fail(pc2_status s, const std::string& msg) {
    g_last_error = msg;
    return s;
}

// Maps exceptions thrown by the core onto status codes.
template <class F>
pc2_status guarded(F&& f) {
    try {
        g_last_error.clear();
        return f();
    } catch (const pacchi2::InputError& e) {
        return fail(PC2_ERR_INPUT, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(PC2_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::domain_error& e) {
        return fail(PC2_ERR_NUMERIC, e.what());
    } catch (const std::overflow_error& e) {
        return fail(PC2_ERR_NUMERIC, e.what());
    } catch (const std::exception& e) {
        return fail(PC2_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(PC2_ERR_INTERNAL, "unknown error");
    }
}

pacchi2::Distance to_distance(pc2_distance d) {
    switch (d) {
        case PC2_LIN: return pacchi2::Distance::Lin;
        case PC2_SQ: return pacchi2::Distance::Sq;
        case PC2_KL: return pacchi2::Distance::Kl;
    }
    throw std::invalid_argument("unknown distance code");
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

pacchi2::RunConfig to_run_config(const pc2_run_config* c) {
    if (!c) throw std::invalid_argument("null run config");
    if (!c->dataset_path) throw std::invalid_argument("dataset path is required");
    pacchi2::RunConfig rc;
    rc.dataset_path = c->dataset_path;
    if (c->label_column) rc.label_column = c->label_column;
    if (c->positive_label) rc.positive_label = c->positive_label;
    rc.seed = c->seed;
    rc.delta = c->delta;
    if (c->h > 0) rc.h = c->h;
    rc.distances.clear();
    if (c->distance_mask & 1u) rc.distances.push_back(pacchi2::Distance::Lin);
    if (c->distance_mask & 2u) rc.distances.push_back(pacchi2::Distance::Sq);
    if (c->distance_mask & 4u) rc.distances.push_back(pacchi2::Distance::Kl);
    rc.enable_ccp = c->enable_ccp != 0;
    rc.ccp_starts = c->ccp_starts;
    if (c->output_dir) rc.output_dir = c->output_dir;
    rc.run_cv = c->run_cv != 0;
    rc.folds = c->folds;
    return rc;
}

}  // namespace

extern "C" {

const char* pc2_last_error(void) { return g_last_error.c_str(); }

const char* pc2_version(void) { return "1.0.0"; }

void pc2_string_free(char* s) { std::free(s); }

pc2_status pc2_parse_distance(const char* name, pc2_distance* out) {
    return guarded([&] {
        if (!name || !out) throw std::invalid_argument("null argument");
        switch (pacchi2::parse_distance(name)) {
            case pacchi2::Distance::Lin: *out = PC2_LIN; break;
            case pacchi2::Distance::Sq: *out = PC2_SQ; break;
            case pacchi2::Distance::Kl: *out = PC2_KL; break;
        }
        return PC2_OK;
    });
}

pc2_status pc2_profile_create(const double* risks, size_t n, int m, const char* const* labels, pc2_profile** out) {
    return guarded([&] {
        if (!risks || !out) throw std::invalid_argument("null argument");
        std::vector<std::string> ls;
        if (labels)
            for (size_t i = 0; i < n; ++i) ls.emplace_back(labels[i] ? labels[i] : "");
        auto p = std::make_unique<pc2_profile>();
        p->profile = pacchi2::make_risk_profile(std::vector<double>(risks, risks + n), m, ls);
        *out = p.release();
        return PC2_OK;
    });
}

pc2_status pc2_profile_load_csv(const char* path, int m, pc2_profile** out) {
    return guarded([&] {
        if (!path || !out) throw std::invalid_argument("null argument");
        if (m < 2) throw std::invalid_argument("validation size m must be >= 2");
        pacchi2::ProfileRows rows = pacchi2::read_profile_csv(path);
        std::vector<std::string> labels;
        for (double l : rows.lambdas) labels.push_back(pacchi2::format_short(l));
        auto p = std::make_unique<pc2_profile>();
        p->profile = pacchi2::make_risk_profile(rows.valid, m, labels);
        *out = p.release();
        return PC2_OK;
    });
}

void pc2_profile_free(pc2_profile* p) { delete p; }

size_t pc2_profile_size(const pc2_profile* p) { return p ? p->profile.size() : 0; }

int pc2_profile_m(const pc2_profile* p) { return p ? p->profile.m() : 0; }

pc2_status pc2_profile_sorted_risks(const pc2_profile* p, double* risks, size_t* perm, size_t n) {
    return guarded([&] {
        if (!p) throw std::invalid_argument("null profile");
        if (n < p->profile.size()) throw std::invalid_argument("output buffer too small");
        for (size_t i = 0; i < p->profile.size(); ++i) {
            if (risks) risks[i] = p->profile.risk(i);
            if (perm) perm[i] = p->profile.perm()[i];
        }
        return PC2_OK;
    });
}

const char* pc2_profile_label(const pc2_profile* p, size_t i) {
    if (!p || i >= p->profile.size()) return nullptr;
    return p->profile.labels()[p->profile.perm()[i]].c_str();
}

pc2_status pc2_optimize(const pc2_profile* p, pc2_distance d, double delta, pc2_posterior** out) {
    return guarded([&] {
        if (!p || !out) throw std::invalid_argument("null argument");
        const auto& prof = p->profile;
        pacchi2::BoundConfig cfg(to_distance(d), prof.m(), delta, pacchi2::Prior::uniform(prof.size()));
        pacchi2::SubsetSolution s = pacchi2::ordered_subset_search(prof, cfg);
        auto q = std::make_unique<pc2_posterior>();
        q->weights = s.posterior->weights();
        q->support = s.posterior->support_size();
        q->bound = s.bound.value;
        q->empirical = s.bound.empirical_term;
        *out = q.release();
        return PC2_OK;
    });
}

pc2_status pc2_gibbs_posterior(const pc2_profile* p, pc2_posterior** out) {
    return guarded([&] {
        if (!p || !out) throw std::invalid_argument("null argument");
        pacchi2::Posterior g = pacchi2::gibbs_kl_posterior(p->profile, p->profile.m());
        auto q = std::make_unique<pc2_posterior>();
        q->weights = g.weights();
        q->support = g.support_size();
        q->empirical = pacchi2::expected_risk(g.weights(), p->profile.risks());
        *out = q.release();
        return PC2_OK;
    });
}

void pc2_posterior_free(pc2_posterior* q) { delete q; }

size_t pc2_posterior_size(const pc2_posterior* q) { return q ? q->weights.size() : 0; }

size_t pc2_posterior_support(const pc2_posterior* q) { return q ? q->support : 0; }

double pc2_posterior_bound(const pc2_posterior* q) { return q ? q->bound : std::nan(""); }

double pc2_posterior_empirical_risk(const pc2_posterior* q) { return q ? q->empirical : std::nan(""); }

pc2_status pc2_posterior_weights(const pc2_posterior* q, double* out, size_t n) {
    return guarded([&] {
        if (!q || !out) throw std::invalid_argument("null argument");
        if (n < q->weights.size()) throw std::invalid_argument("output buffer too small");
        std::copy(q->weights.begin(), q->weights.end(), out);
        return PC2_OK;
    });
}

pc2_status pc2_posterior_write_csv(const pc2_posterior* q, const pc2_profile* p, const char* path) {
    return guarded([&] {
        if (!q || !p || !path) throw std::invalid_argument("null argument");
        if (q->weights.size() != p->profile.size()) throw std::invalid_argument("posterior does not match profile");
        const std::filesystem::path target(path);
        if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
        std::ofstream out(target);
        if (!out) throw pacchi2::InputError(std::string("cannot write ") + path);
        out << "rank,label,risk,weight\n";
        for (size_t i = 0; i < q->weights.size(); ++i)
            out << i + 1 << ',' << pc2_profile_label(p, i) << ',' << pacchi2::format_real(p->profile.risk(i)) << ','
                << pacchi2::format_real(q->weights[i]) << '\n';
        if (!out) throw pacchi2::InputError(std::string("failed writing ") + path);
        return PC2_OK;
    });
}

pc2_status pc2_moment_constant(pc2_distance d, int m, double* value, double* maximizer, int* capped) {
    return guarded([&] {
        pacchi2::MomentConstant c;
        switch (to_distance(d)) {
            case pacchi2::Distance::Lin: c = pacchi2::i_r_lin(m); break;
            case pacchi2::Distance::Sq: c = pacchi2::i_r_sq(m); break;
            case pacchi2::Distance::Kl: c = pacchi2::i_r_kl(m); break;
        }
        if (value) *value = c.value;
        if (maximizer) *maximizer = c.maximizer_l;
        if (capped) *capped = c.capped ? 1 : 0;
        return PC2_OK;
    });
}

pc2_status pc2_kl_upper_inverse(double p_hat, double eps, double* out) {
    return guarded([&] {
        if (!out) throw std::invalid_argument("null argument");
        *out = pacchi2::kl_upper_inverse(p_hat, eps);
        return PC2_OK;
    });
}

pc2_status pc2_bound(pc2_distance d, const double* q, const double* risks, size_t n, int m, double delta,
                     double* out) {
    return guarded([&] {
        if (!q || !risks || !out || n == 0) throw std::invalid_argument("null or empty argument");
        pacchi2::BoundConfig cfg(to_distance(d), m, delta, pacchi2::Prior::uniform(n));
        *out = pacchi2::evaluate_bound(std::vector<double>(q, q + n), std::vector<double>(risks, risks + n), cfg).value;
        return PC2_OK;
    });
}

pc2_status pc2_lambda_grid(size_t h_target, double* out, size_t cap, size_t* count) {
    return guarded([&] {
        std::vector<double> g = pacchi2::lambda_grid(h_target > 0 ? std::optional<std::size_t>(h_target) : std::nullopt);
        if (count) *count = g.size();
        if (out)
            for (size_t i = 0; i < g.size() && i < cap; ++i) out[i] = g[i];
        return PC2_OK;
    });
}

void pc2_run_config_init(pc2_run_config* cfg) {
    if (!cfg) return;
    *cfg = pc2_run_config{};
    cfg->label_column = "label";
    cfg->positive_label = "1";
    cfg->delta = 0.05;
    cfg->distance_mask = 7u;
    cfg->ccp_starts = 1000;
    cfg->output_dir = ".";
    cfg->run_cv = 1;
    cfg->folds = 5;
}

pc2_status pc2_run(const pc2_run_config* c, char** summary_json) {
    return guarded([&] {
        pacchi2::RunConfig rc = to_run_config(c);
        pacchi2::RunResult r = pacchi2::run_experiment(rc);
        if (summary_json) *summary_json = dup_string(r.report_json);
        return PC2_OK;
    });
}

pc2_status pc2_cross_validate(const pc2_run_config* c, char** report_json) {
    return guarded([&] {
        pacchi2::RunConfig rc = to_run_config(c);
        pacchi2::Dataset raw = pacchi2::load_dataset(rc.dataset_path, rc.label_column, rc.positive_label);
        pacchi2::PreparedData prep = pacchi2::prepare(raw, rc.seed);
        auto lambdas = pacchi2::lambda_grid(rc.h);
        pacchi2::CVReport cv = pacchi2::cross_validate(prep.data, prep.plan, lambdas, rc.folds, rc.seed);
        nlohmann::ordered_json j{{"dataset", raw.name},
                                 {"seed", rc.seed},
                                 {"folds", rc.folds},
                                 {"H", lambdas.size()},
                                 {"best_lambda", cv.best_lambda},
                                 {"cv_error", cv.cv_error},
                                 {"test_error", cv.test_error},
                                 {"wall_time_s", cv.wall_time_s}};
        if (report_json) *report_json = dup_string(j.dump(2) + "\n");
        return PC2_OK;
    });
}

pc2_status pc2_verify(int strict_published, char** report_text, int* all_passed) {
    return guarded([&] {
        auto checks = pacchi2::run_golden_checks(strict_published != 0);
        std::ostringstream os;
        bool ok = true;
        for (const auto& c : checks) {
            const char* tag = c.passed ? "PASS" : (c.fatal ? "FAIL" : "DIFF");
            if (!c.passed && c.fatal) ok = false;
            char line[512];
            std::snprintf(line, sizeof line, "[%s] %s: computed %.10g expected %.10g (tol %.1e)", tag, c.name.c_str(),
                          c.computed, c.expected, c.tolerance);
            os << line;
            if (!c.note.empty()) os << "  " << c.note;
            os << '\n';
        }
        if (report_text) *report_text = dup_string(os.str());
        if (all_passed) *all_passed = ok ? 1 : 0;
        return PC2_OK;
    });
}

}  // extern "C"
