// Command-line front end; talks to the library only through the C API.
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pacchi2/pacchi2.h"

namespace {

int report(pc2_status s) {
    std::fprintf(stderr, "error: %s\n", pc2_last_error());
    return s == PC2_ERR_INPUT || s == PC2_ERR_INVALID_ARGUMENT ? 2 : 1;
}

unsigned distance_mask(const std::string& list) {
    unsigned mask = 0;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "lin")
            mask |= 1u;
        else if (item == "sq")
            mask |= 2u;
        else if (item == "kl")
            mask |= 4u;
        else
            throw CLI::ValidationError("--distances", "unknown distance '" + item + "'");
    }
    if (mask == 0) throw CLI::ValidationError("--distances", "empty list");
    return mask;
}

struct DataFlags {
    std::string dataset, label = "label", positive = "1", output_dir = ".", distances = "lin,sq,kl";
    std::uint64_t seed = 0;
    double delta = 0.05;
    std::size_t h = 0;
    bool ccp = false, no_cv = false;
    int ccp_starts = 1000, folds = 5;

    void add(CLI::App* app, bool full) {
        app->add_option("--dataset", dataset, "CSV file with a header row")->required()->check(CLI::ExistingFile);
        app->add_option("--label-column", label, "Name of the label column");
        app->add_option("--positive-label", positive, "Label value mapped to +1");
        app->add_option("--seed", seed, "Master seed");
        app->add_option("--classifiers", h, "Number of lambda values (smallest first); 0 = full grid");
        app->add_option("--folds", folds, "Cross-validation folds")->check(CLI::Range(2, 100));
        if (!full) return;
        app->add_option("--delta", delta, "Confidence parameter")->check(CLI::Range(0.0, 1.0));
        app->add_option("--distances", distances, "Comma list of lin,sq,kl");
        app->add_flag("--ccp", ccp, "Also run the convex-concave procedure");
        app->add_option("--ccp-starts", ccp_starts, "Random starts for the convex-concave procedure")
            ->check(CLI::PositiveNumber);
        app->add_option("--output-dir", output_dir, "Directory for report files");
        app->add_flag("--no-cv", no_cv, "Skip the cross-validation baseline");
    }

    pc2_run_config config() const {
        pc2_run_config c;
        pc2_run_config_init(&c);
        c.dataset_path = dataset.c_str();
        c.label_column = label.c_str();
        c.positive_label = positive.c_str();
        c.seed = seed;
        c.delta = delta;
        c.h = h;
        c.distance_mask = distance_mask(distances);
        c.enable_ccp = ccp ? 1 : 0;
        c.ccp_starts = ccp_starts;
        c.output_dir = output_dir.c_str();
        c.run_cv = no_cv ? 0 : 1;
        c.folds = folds;
        return c;
    }
};

int cmd_run(const DataFlags& f) {
    pc2_run_config c = f.config();
    char* json = nullptr;
    if (pc2_status s = pc2_run(&c, &json); s != PC2_OK) return report(s);
    pc2_string_free(json);
    std::printf("wrote report.json, table2.csv, table5.csv and profile.csv to %s\n", f.output_dir.c_str());
    return 0;
}

int cmd_cv(const DataFlags& f) {
    pc2_run_config c = f.config();
    char* json = nullptr;
    if (pc2_status s = pc2_cross_validate(&c, &json); s != PC2_OK) return report(s);
    std::fputs(json, stdout);
    pc2_string_free(json);
    return 0;
}

int cmd_optimize(const std::string& profile_csv, int m, double delta, const std::string& distance,
                 const std::string& output) {
    pc2_distance d;
    if (pc2_status s = pc2_parse_distance(distance.c_str(), &d); s != PC2_OK) return report(s);
    pc2_profile* p = nullptr;
    if (pc2_status s = pc2_profile_load_csv(profile_csv.c_str(), m, &p); s != PC2_OK) return report(s);
    pc2_posterior* q = nullptr;
    if (pc2_status s = pc2_optimize(p, d, delta, &q); s != PC2_OK) {
        pc2_profile_free(p);
        return report(s);
    }
    const std::size_t h = pc2_posterior_size(q);
    std::vector<double> w(h), risks(h);
    pc2_posterior_weights(q, w.data(), h);
    pc2_profile_sorted_risks(p, risks.data(), nullptr, h);
    std::printf("distance %s  H %zu  H* %zu\n", distance.c_str(), h, pc2_posterior_support(q));
    std::printf("bound %.10f  empirical risk %.10f\n", pc2_posterior_bound(q), pc2_posterior_empirical_risk(q));
    std::printf("%5s %24s %14s %14s\n", "rank", "lambda", "risk", "weight");
    for (std::size_t i = 0; i < h && i < 10; ++i)
        std::printf("%5zu %24s %14.8f %14.10f\n", i + 1, pc2_profile_label(p, i), risks[i], w[i]);
    pc2_status s = pc2_posterior_write_csv(q, p, output.c_str());
    pc2_posterior_free(q);
    pc2_profile_free(p);
    if (s != PC2_OK) return report(s);
    std::printf("posterior written to %s\n", output.c_str());
    return 0;
}

int cmd_verify(bool strict) {
    char* text = nullptr;
    int ok = 0;
    if (pc2_status s = pc2_verify(strict ? 1 : 0, &text, &ok); s != PC2_OK) return report(s);
    std::fputs(text, stdout);
    pc2_string_free(text);
    std::printf("%s\n", ok ? "all golden checks passed" : "golden checks FAILED");
    return ok ? 0 : 1;
}

int cmd_grid(std::size_t h) {
    std::size_t n = 0;
    if (pc2_status s = pc2_lambda_grid(h, nullptr, 0, &n); s != PC2_OK) return report(s);
    std::vector<double> g(n);
    pc2_lambda_grid(h, g.data(), n, &n);
    for (double v : g) std::printf("%.17g\n", v);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chi-squared PAC-Bayes posteriors over SVM ensembles"};
    app.require_subcommand(1);
    app.set_version_flag("--version", pc2_version());

    DataFlags run_flags, cv_flags;
    auto* run = app.add_subcommand("run", "Train the ensemble, optimize posteriors and write reports");
    run_flags.add(run, true);
    auto* cv = app.add_subcommand("cv", "Cross-validation baseline only");
    cv_flags.add(cv, false);

    std::string profile, distance = "sq", output = "posterior.csv";
    int m = 0;
    double delta = 0.05;
    auto* opt = app.add_subcommand("optimize", "Optimize a posterior over a saved risk profile");
    opt->add_option("--profile", profile, "CSV with lambda,train_risk,valid_risk,test_risk")->required();
    opt->add_option("--m", m, "Validation sample size behind the risks")->required()->check(CLI::Range(2, 1 << 30));
    opt->add_option("--delta", delta, "Confidence parameter")->check(CLI::Range(0.0, 1.0));
    opt->add_option("--distance", distance, "lin, sq or kl")->check(CLI::IsMember({"lin", "sq", "kl"}));
    opt->add_option("--output", output, "Posterior CSV to write");

    bool strict = false;
    auto* ver = app.add_subcommand("verify", "Run the golden-value checks");
    ver->add_flag("--strict-published", strict, "Also fail when published constants disagree with the computed ones");

    std::size_t grid_h = 0;
    auto* grid = app.add_subcommand("grid", "Print the lambda grid");
    grid->add_option("--classifiers", grid_h, "Number of values (smallest first); 0 = full grid");

    try {
        app.parse(argc, argv);
        if (*run) return cmd_run(run_flags);
        if (*cv) return cmd_cv(cv_flags);
        if (*opt) return cmd_optimize(profile, m, delta, distance, output);
        if (*ver) return cmd_verify(strict);
        if (*grid) return cmd_grid(grid_h);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return 2;
}
