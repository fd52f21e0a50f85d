#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace pacchi2 {

// Dense row-major design matrix with +-1 labels.
struct Dataset {
    std::string name;
    std::size_t cols = 0;
    std::vector<double> features;
    std::vector<int> labels;
    std::vector<bool> numeric_column;  // false for one-hot indicator columns
    std::size_t dropped_rows = 0;

    std::size_t rows() const { return labels.size(); }
    const double* row(std::size_t i) const { return features.data() + i * cols; }
};

// Rows with an empty field are dropped; non-numeric feature columns are
// one-hot encoded (one indicator per distinct value, sorted). Labels equal to
// positive_label map to +1, everything else to -1.
Dataset load_dataset(const std::string& path, const std::string& label_column,
                     const std::string& positive_label);

Dataset make_dataset(std::string name, std::size_t cols, std::vector<double> features, std::vector<int> labels);

// Centers and scales numeric columns with statistics from the given rows.
void standardize(Dataset& d, const std::vector<std::size_t>& rows);

struct SplitPlan {
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> valid_idx;
    std::vector<std::size_t> test_idx;
    std::uint64_t seed = 0;

    std::vector<std::size_t> composite() const;
};

// Seeded shuffle sliced 40/40/20. If the train+valid part misses a class the
// split is redrawn once with a derived seed, then rejected.
SplitPlan split_dataset(const Dataset& d, std::uint64_t seed);

double squared_distance(const double* a, const double* b, std::size_t n);

// Reciprocal of the mean of the 0.1 and 0.9 quantiles of squared pairwise
// distance over up to 1000 random pairs of the given rows.
double estimate_gamma(const Dataset& d, const std::vector<std::size_t>& rows, std::uint64_t seed);
double estimate_gamma(const std::vector<std::vector<double>>& points, std::uint64_t seed);

}  // namespace pacchi2
