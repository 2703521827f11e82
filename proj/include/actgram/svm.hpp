#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "actgram/grammar.hpp"

namespace actgram {

enum class KernelType { Linear, Polynomial, Rbf };

struct Kernel {
    KernelType type = KernelType::Rbf;
    double gamma = 0.0;  // <= 0 means 1 / (D * var(X)) at training time
    int degree = 3;
    double coef0 = 0.0;

    double operator()(std::span<const double> a, std::span<const double> b) const;
    bool operator==(const Kernel&) const = default;
};

struct SvmParams {
    Kernel kernel;
    double C = 1.0;
    double tol = 1e-3;
    bool standardize = true;
    long max_iterations = 10'000'000;
};

/// Dual solution of one binary soft-margin problem over the rows it was given.
struct BinaryFit {
    std::vector<double> alpha;
    double bias = 0.0;      // f(x) = sum_i alpha_i y_i k(x_i, x) + bias
    double kkt_gap = 0.0;   // max violating-pair gap at exit
    long iterations = 0;
};

/// Sequential pairwise optimisation of the dual with second-order working set
/// selection. `gram` is the n×n kernel matrix, labels are ±1.
BinaryFit solve_binary(const std::vector<std::vector<double>>& gram, const std::vector<int>& labels, double C,
                       double tol, long max_iterations = 10'000'000);

/// One pairwise machine: +1 means `positive`, -1 means `negative`.
struct BinaryMachine {
    int positive = 0;
    int negative = 1;
    Kernel kernel;
    std::vector<std::vector<double>> supports;
    std::vector<double> coef;  // alpha_i * y_i
    double bias = 0.0;
    double kkt_gap = 0.0;

    double decision(std::span<const double> x) const;
    double weight_norm() const;  // ||w|| in feature space
    bool operator==(const BinaryMachine&) const = default;
};

/// y * f(x) for y in {+1, -1}.
double functional_margin(const BinaryMachine& m, std::span<const double> x, int y);
/// functional margin divided by ||w||.
double geometric_margin(const BinaryMachine& m, std::span<const double> x, int y);

struct SvmModel {
    std::vector<int> classes;                      // sorted
    std::vector<BinaryMachine> machines;           // pairs (classes[a], classes[b]), a < b
    std::size_t input_dim = 0;
    std::vector<std::size_t> kept_dims;            // columns surviving the zero-variance filter
    std::vector<double> mean;                      // per kept column
    std::vector<double> scale;                     // per kept column, 1 when not standardizing
    double C = 1.0;
    Kernel kernel;
    std::size_t dropped_dims = 0;

    std::vector<double> transform(std::span<const double> x) const;
    bool operator==(const SvmModel&) const = default;
};

SvmModel train_svm(const std::vector<std::vector<double>>& X, const std::vector<int>& y, const SvmParams& params = {});
inline SvmModel train_svm(const PhaseDataset& ds, const SvmParams& params = {}) {
    return train_svm(ds.X, ds.y, params);
}

struct SvmPrediction {
    int label = 0;
    std::vector<int> votes;      // aligned with model.classes
    std::vector<double> scores;  // summed decision values towards each class
};

/// One-vs-one voting; ties go to the larger summed decision value, then to the
/// lowest class id.
SvmPrediction predict_svm(const SvmModel& model, std::span<const double> x);

std::string svm_to_json(const SvmModel& model);
SvmModel svm_from_json(const std::string& text);

}  // namespace actgram
