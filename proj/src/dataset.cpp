#include "pacchi2/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "pacchi2/csv.hpp"
#include "pacchi2/errors.hpp"
#include "pacchi2/parallel.hpp"

namespace pacchi2 {

Dataset make_dataset(std::string name, std::size_t cols, std::vector<double> features, std::vector<int> labels) {
    if (cols == 0 || features.size() != cols * labels.size())
        throw std::invalid_argument("feature matrix does not match label count");
    Dataset d;
    d.name = std::move(name);
    d.cols = cols;
    d.features = std::move(features);
    d.labels = std::move(labels);
    d.numeric_column.assign(cols, true);
    bool pos = false, neg = false;
    for (int y : d.labels) {
        if (y == 1)
            pos = true;
        else if (y == -1)
            neg = true;
        else
            throw std::invalid_argument("labels must be +1 or -1");
    }
    if (!pos || !neg) throw InputError("dataset '" + d.name + "' needs both classes");
    return d;
}

Dataset load_dataset(const std::string& path, const std::string& label_column,
                     const std::string& positive_label) {
    CsvTable t = read_csv(path);
    auto it = std::find(t.header.begin(), t.header.end(), label_column);
    if (it == t.header.end()) throw InputError(path + ": label column '" + label_column + "' not found");
    const std::size_t label_at = static_cast<std::size_t>(it - t.header.begin());

    std::vector<std::vector<std::string>> kept;
    std::size_t dropped = 0;
    for (auto& row : t.rows) {
        bool missing = std::any_of(row.begin(), row.end(), [](const std::string& f) { return f.empty(); });
        if (missing)
            ++dropped;
        else
            kept.push_back(std::move(row));
    }
    if (kept.empty()) throw InputError(path + ": no complete rows");

    struct Column {
        std::size_t source;
        bool numeric;
        std::vector<std::string> levels;
    };
    std::vector<Column> columns;
    std::size_t width = 0;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
        if (c == label_at) continue;
        Column col{c, true, {}};
        double v;
        for (const auto& row : kept)
            if (!parse_double(row[c], v)) col.numeric = false;
        if (!col.numeric) {
            std::set<std::string> levels;
            for (const auto& row : kept) levels.insert(row[c]);
            col.levels.assign(levels.begin(), levels.end());
        }
        width += col.numeric ? 1 : col.levels.size();
        columns.push_back(std::move(col));
    }
    if (width == 0) throw InputError(path + ": no feature columns");

    std::vector<double> x;
    x.reserve(kept.size() * width);
    std::vector<int> y;
    std::vector<bool> numeric;
    for (const auto& col : columns) {
        if (col.numeric)
            numeric.push_back(true);
        else
            numeric.insert(numeric.end(), col.levels.size(), false);
    }
    for (const auto& row : kept) {
        for (const auto& col : columns) {
            if (col.numeric) {
                double v = 0.0;
                parse_double(row[col.source], v);
                x.push_back(v);
            } else {
                for (const auto& level : col.levels) x.push_back(row[col.source] == level ? 1.0 : 0.0);
            }
        }
        y.push_back(row[label_at] == positive_label ? 1 : -1);
    }
    std::string name = path;
    if (auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
    if (auto dot = name.find_last_of('.'); dot != std::string::npos && dot > 0) name = name.substr(0, dot);
    Dataset d = make_dataset(name, width, std::move(x), std::move(y));
    d.numeric_column = std::move(numeric);
    d.dropped_rows = dropped;
    return d;
}

void standardize(Dataset& d, const std::vector<std::size_t>& rows) {
    if (rows.empty()) throw std::invalid_argument("standardize needs at least one row");
    for (std::size_t c = 0; c < d.cols; ++c) {
        if (!d.numeric_column[c]) continue;
        double mean = 0.0;
        for (std::size_t r : rows) mean += d.features[r * d.cols + c];
        mean /= static_cast<double>(rows.size());
        double var = 0.0;
        for (std::size_t r : rows) {
            double z = d.features[r * d.cols + c] - mean;
            var += z * z;
        }
        var /= static_cast<double>(rows.size());
        const double sd = var > 0.0 ? std::sqrt(var) : 1.0;
        for (std::size_t r = 0; r < d.rows(); ++r) {
            double& v = d.features[r * d.cols + c];
            v = (v - mean) / sd;
        }
    }
}

std::vector<std::size_t> SplitPlan::composite() const {
    std::vector<std::size_t> out(train_idx);
    out.insert(out.end(), valid_idx.begin(), valid_idx.end());
    return out;
}

SplitPlan split_dataset(const Dataset& d, std::uint64_t seed) {
    const std::size_t n = d.rows();
    if (n < 10) throw InputError("dataset needs at least 10 rows to split");
    const std::size_t m = n * 2 / 5;
    for (int attempt = 0; attempt < 2; ++attempt) {
        const std::uint64_t s = attempt == 0 ? seed : derive_seed(seed, 0x5eed);
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::mt19937_64 rng(s);
        std::shuffle(idx.begin(), idx.end(), rng);
        SplitPlan p;
        p.seed = s;
        p.train_idx.assign(idx.begin(), idx.begin() + m);
        p.valid_idx.assign(idx.begin() + m, idx.begin() + 2 * m);
        p.test_idx.assign(idx.begin() + 2 * m, idx.end());
        bool pos = false, neg = false;
        for (std::size_t i = 0; i < 2 * m; ++i) (d.labels[idx[i]] > 0 ? pos : neg) = true;
        if (pos && neg) return p;
    }
    throw InputError("train+valid split misses a class for seed " + std::to_string(seed));
}

double squared_distance(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double z = a[i] - b[i];
        s += z * z;
    }
    return s;
}

namespace {

// Linear interpolation between order statistics (type 7).
double quantile(std::vector<double> xs, double p) {
    std::sort(xs.begin(), xs.end());
    const double h = (static_cast<double>(xs.size()) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(xs.size() - 1, lo + 1);
    return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

template <class Dist>
double gamma_from_pairs(std::size_t n, std::uint64_t seed, Dist dist) {
    if (n < 2) throw std::invalid_argument("estimate_gamma needs at least two points");
    std::vector<double> d2;
    const std::size_t all_pairs = n * (n - 1) / 2;
    if (all_pairs <= 1000) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) d2.push_back(dist(i, j));
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        while (d2.size() < 1000) {
            std::size_t i = pick(rng), j = pick(rng);
            if (i != j) d2.push_back(dist(i, j));
        }
    }
    double width = 0.5 * (quantile(d2, 0.1) + quantile(d2, 0.9));
    if (!(width > 0.0)) {
        // Heavily duplicated data: fall back to the mean positive distance.
        double s = 0.0;
        std::size_t k = 0;
        for (double v : d2)
            if (v > 0.0) {
                s += v;
                ++k;
            }
        if (k == 0) throw InputError("degenerate geometry: all sampled points coincide");
        width = s / static_cast<double>(k);
    }
    return 1.0 / width;
}

}  // namespace

double estimate_gamma(const Dataset& d, const std::vector<std::size_t>& rows, std::uint64_t seed) {
    return gamma_from_pairs(rows.size(), seed, [&](std::size_t i, std::size_t j) {
        return squared_distance(d.row(rows[i]), d.row(rows[j]), d.cols);
    });
}

double estimate_gamma(const std::vector<std::vector<double>>& pts, std::uint64_t seed) {
    return gamma_from_pairs(pts.size(), seed, [&](std::size_t i, std::size_t j) {
        if (pts[i].size() != pts[j].size()) throw std::invalid_argument("ragged point set");
        return squared_distance(pts[i].data(), pts[j].data(), pts[i].size());
    });
}

}  // namespace pacchi2
