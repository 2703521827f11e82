#include "actgram/svm.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "actgram/error.hpp"

namespace actgram {

namespace {

constexpr double kTau = 1e-12;

std::string kernel_name(KernelType t) {
    switch (t) {
        case KernelType::Linear: return "linear";
        case KernelType::Polynomial: return "polynomial";
        case KernelType::Rbf: return "rbf";
    }
    return "rbf";
}

KernelType parse_kernel(const std::string& s) {
    if (s == "linear") return KernelType::Linear;
    if (s == "polynomial" || s == "poly") return KernelType::Polynomial;
    if (s == "rbf") return KernelType::Rbf;
    throw Error(ErrorKind::BadFile, "unknown kernel '" + s + "'");
}

}  // namespace

double Kernel::operator()(std::span<const double> a, std::span<const double> b) const {
    switch (type) {
        case KernelType::Linear: return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
        case KernelType::Polynomial:
            return std::pow(gamma * std::inner_product(a.begin(), a.end(), b.begin(), 0.0) + coef0, degree);
        case KernelType::Rbf: {
            double d2 = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                const double d = a[i] - b[i];
                d2 += d * d;
            }
            return std::exp(-gamma * d2);
        }
    }
    return 0.0;
}

BinaryFit solve_binary(const std::vector<std::vector<double>>& gram, const std::vector<int>& labels, double C,
                       double tol, long max_iterations) {
    const std::size_t n = labels.size();
    auto Q = [&](std::size_t i, std::size_t j) { return labels[i] * labels[j] * gram[i][j]; };
    BinaryFit fit;
    fit.alpha.assign(n, 0.0);
    auto& alpha = fit.alpha;
    std::vector<double> G(n, -1.0);
    const double inf = std::numeric_limits<double>::infinity();

    while (true) {
        // working set selection, second-order variant
        double gmax = -inf;
        std::size_t i = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (labels[t] == 1) {
                if (alpha[t] < C && -G[t] >= gmax) gmax = -G[t], i = t;
            } else {
                if (alpha[t] > 0.0 && G[t] >= gmax) gmax = G[t], i = t;
            }
        }
        double gmax2 = -inf;
        double obj_min = inf;
        std::size_t j = n;
        if (i < n) {
            for (std::size_t t = 0; t < n; ++t) {
                if (labels[t] == 1) {
                    if (alpha[t] > 0.0) {
                        const double grad_diff = gmax + G[t];
                        gmax2 = std::max(gmax2, G[t]);
                        if (grad_diff > 0.0) {
                            double quad = gram[i][i] + gram[t][t] - 2.0 * labels[i] * Q(i, t);
                            const double obj = -(grad_diff * grad_diff) / (quad > 0.0 ? quad : kTau);
                            if (obj <= obj_min) obj_min = obj, j = t;
                        }
                    }
                } else {
                    if (alpha[t] < C) {
                        const double grad_diff = gmax - G[t];
                        gmax2 = std::max(gmax2, -G[t]);
                        if (grad_diff > 0.0) {
                            double quad = gram[i][i] + gram[t][t] + 2.0 * labels[i] * Q(i, t);
                            const double obj = -(grad_diff * grad_diff) / (quad > 0.0 ? quad : kTau);
                            if (obj <= obj_min) obj_min = obj, j = t;
                        }
                    }
                }
            }
        }
        fit.kkt_gap = (i < n) ? gmax + gmax2 : 0.0;
        if (i == n || j == n || gmax + gmax2 < tol || fit.iterations >= max_iterations) break;
        ++fit.iterations;

        const double old_i = alpha[i];
        const double old_j = alpha[j];
        if (labels[i] != labels[j]) {
            double quad = gram[i][i] + gram[j][j] + 2.0 * Q(i, j);
            if (quad <= 0.0) quad = kTau;
            const double delta = (-G[i] - G[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) alpha[j] = 0.0, alpha[i] = diff;
            } else {
                if (alpha[i] < 0.0) alpha[i] = 0.0, alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > C) alpha[i] = C, alpha[j] = C - diff;
            } else {
                if (alpha[j] > C) alpha[j] = C, alpha[i] = C + diff;
            }
        } else {
            double quad = gram[i][i] + gram[j][j] - 2.0 * Q(i, j);
            if (quad <= 0.0) quad = kTau;
            const double delta = (G[i] - G[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C) {
                if (alpha[i] > C) alpha[i] = C, alpha[j] = sum - C;
            } else {
                if (alpha[j] < 0.0) alpha[j] = 0.0, alpha[i] = sum;
            }
            if (sum > C) {
                if (alpha[j] > C) alpha[j] = C, alpha[i] = sum - C;
            } else {
                if (alpha[i] < 0.0) alpha[i] = 0.0, alpha[j] = sum;
            }
        }
        const double di = alpha[i] - old_i;
        const double dj = alpha[j] - old_j;
        for (std::size_t t = 0; t < n; ++t) G[t] += Q(t, i) * di + Q(t, j) * dj;
    }

    double ub = inf, lb = -inf, sum_free = 0.0;
    int n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = labels[t] * G[t];
        if (alpha[t] >= C) {
            if (labels[t] == -1) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else if (alpha[t] <= 0.0) {
            if (labels[t] == 1) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    const double rho = n_free > 0 ? sum_free / n_free : 0.5 * (ub + lb);
    fit.bias = -rho;
    return fit;
}

double BinaryMachine::decision(std::span<const double> x) const {
    double f = bias;
    for (std::size_t i = 0; i < supports.size(); ++i) f += coef[i] * kernel(supports[i], x);
    return f;
}

double BinaryMachine::weight_norm() const {
    double w2 = 0.0;
    for (std::size_t i = 0; i < supports.size(); ++i) {
        for (std::size_t j = 0; j < supports.size(); ++j) w2 += coef[i] * coef[j] * kernel(supports[i], supports[j]);
    }
    return std::sqrt(std::max(w2, 0.0));
}

double functional_margin(const BinaryMachine& m, std::span<const double> x, int y) {
    if (m.supports.empty()) throw Error(ErrorKind::UntrainedModel, "machine has no support vectors");
    return y * m.decision(x);
}

double geometric_margin(const BinaryMachine& m, std::span<const double> x, int y) {
    const double norm = m.weight_norm();
    if (norm <= 0.0) throw Error(ErrorKind::UntrainedModel, "machine has zero weight norm");
    return functional_margin(m, x, y) / norm;
}

std::vector<double> SvmModel::transform(std::span<const double> x) const {
    if (x.size() != input_dim) {
        throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(input_dim) + " features, got " +
                                                      std::to_string(x.size()));
    }
    std::vector<double> z(kept_dims.size());
    for (std::size_t k = 0; k < kept_dims.size(); ++k) z[k] = (x[kept_dims[k]] - mean[k]) / scale[k];
    return z;
}

SvmModel train_svm(const std::vector<std::vector<double>>& X, const std::vector<int>& y, const SvmParams& params) {
    if (!(params.C > 0.0)) throw Error(ErrorKind::Usage, "C must be positive");
    if (X.size() != y.size() || X.empty()) throw Error(ErrorKind::DimensionMismatch, "X and y sizes differ or empty");
    const std::size_t n = X.size();
    const std::size_t d = X.front().size();
    for (const auto& row : X) {
        if (row.size() != d) throw Error(ErrorKind::DimensionMismatch, "ragged feature matrix");
    }

    SvmModel model;
    model.classes = y;
    std::sort(model.classes.begin(), model.classes.end());
    model.classes.erase(std::unique(model.classes.begin(), model.classes.end()), model.classes.end());
    if (model.classes.size() < 2) throw Error(ErrorKind::SingleClass, "training data holds a single class");
    model.input_dim = d;
    model.C = params.C;

    for (std::size_t c = 0; c < d; ++c) {
        double m = 0.0;
        for (const auto& row : X) m += row[c];
        m /= static_cast<double>(n);
        double v = 0.0;
        for (const auto& row : X) v += (row[c] - m) * (row[c] - m);
        v /= static_cast<double>(n);
        if (v <= 1e-12 * std::max(1.0, m * m)) continue;
        model.kept_dims.push_back(c);
        model.mean.push_back(params.standardize ? m : 0.0);
        model.scale.push_back(params.standardize ? std::sqrt(v) : 1.0);
    }
    model.dropped_dims = d - model.kept_dims.size();
    if (model.kept_dims.empty()) throw Error(ErrorKind::DegenerateFeatures, "every feature column is constant");

    std::vector<std::vector<double>> Z;
    Z.reserve(n);
    for (const auto& row : X) Z.push_back(model.transform(row));

    model.kernel = params.kernel;
    if (model.kernel.gamma <= 0.0) {
        double s = 0.0, s2 = 0.0;
        for (const auto& row : Z) {
            for (double v : row) s += v, s2 += v * v;
        }
        const double cnt = static_cast<double>(n * Z.front().size());
        const double var = s2 / cnt - (s / cnt) * (s / cnt);
        model.kernel.gamma = var > 0.0 ? 1.0 / (static_cast<double>(Z.front().size()) * var) : 1.0;
    }

    std::vector<std::vector<double>> gram(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) gram[i][j] = gram[j][i] = model.kernel(Z[i], Z[j]);
    }

    for (std::size_t a = 0; a < model.classes.size(); ++a) {
        for (std::size_t b = a + 1; b < model.classes.size(); ++b) {
            std::vector<std::size_t> rows;
            std::vector<int> labels;
            for (std::size_t i = 0; i < n; ++i) {
                if (y[i] == model.classes[a]) rows.push_back(i), labels.push_back(1);
                else if (y[i] == model.classes[b]) rows.push_back(i), labels.push_back(-1);
            }
            std::vector<std::vector<double>> sub(rows.size(), std::vector<double>(rows.size()));
            for (std::size_t r = 0; r < rows.size(); ++r) {
                for (std::size_t s = 0; s < rows.size(); ++s) sub[r][s] = gram[rows[r]][rows[s]];
            }
            auto fit = solve_binary(sub, labels, params.C, params.tol, params.max_iterations);
            BinaryMachine m;
            m.positive = model.classes[a];
            m.negative = model.classes[b];
            m.kernel = model.kernel;
            m.bias = fit.bias;
            m.kkt_gap = fit.kkt_gap;
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (fit.alpha[r] > 0.0) {
                    m.supports.push_back(Z[rows[r]]);
                    m.coef.push_back(fit.alpha[r] * labels[r]);
                }
            }
            model.machines.push_back(std::move(m));
        }
    }
    return model;
}

SvmPrediction predict_svm(const SvmModel& model, std::span<const double> x) {
    if (model.machines.empty()) throw Error(ErrorKind::UntrainedModel, "svm model has no machines");
    const auto z = model.transform(x);
    SvmPrediction p;
    p.votes.assign(model.classes.size(), 0);
    p.scores.assign(model.classes.size(), 0.0);
    auto slot = [&](int cls) {
        return static_cast<std::size_t>(std::lower_bound(model.classes.begin(), model.classes.end(), cls) -
                                        model.classes.begin());
    };
    for (const auto& m : model.machines) {
        const double f = m.decision(z);
        const auto a = slot(m.positive);
        const auto b = slot(m.negative);
        ++p.votes[f > 0.0 ? a : b];
        p.scores[a] += f;
        p.scores[b] -= f;
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < model.classes.size(); ++c) {
        if (p.votes[c] > p.votes[best] || (p.votes[c] == p.votes[best] && p.scores[c] > p.scores[best])) best = c;
    }
    p.label = model.classes[best];
    return p;
}

std::string svm_to_json(const SvmModel& model) {
    nlohmann::ordered_json j;
    j["format"] = "actgram-svm";
    j["version"] = 1;
    j["kernel"] = {{"type", kernel_name(model.kernel.type)},
                   {"gamma", model.kernel.gamma},
                   {"degree", model.kernel.degree},
                   {"coef0", model.kernel.coef0}};
    j["C"] = model.C;
    j["classes"] = model.classes;
    j["input_dim"] = model.input_dim;
    j["kept_dims"] = model.kept_dims;
    j["mean"] = model.mean;
    j["scale"] = model.scale;
    auto& machines = j["machines"];
    machines = nlohmann::ordered_json::array();
    for (const auto& m : model.machines) {
        machines.push_back({{"positive", m.positive},
                            {"negative", m.negative},
                            {"bias", m.bias},
                            {"kkt_gap", m.kkt_gap},
                            {"coef", m.coef},
                            {"supports", m.supports}});
    }
    return j.dump() + "\n";
}

SvmModel svm_from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        if (j.at("format") != "actgram-svm" || j.at("version") != 1) {
            throw Error(ErrorKind::BadFile, "not a version-1 svm model");
        }
        SvmModel model;
        const auto& k = j.at("kernel");
        model.kernel.type = parse_kernel(k.at("type").get<std::string>());
        model.kernel.gamma = k.at("gamma").get<double>();
        model.kernel.degree = k.at("degree").get<int>();
        model.kernel.coef0 = k.at("coef0").get<double>();
        model.C = j.at("C").get<double>();
        model.classes = j.at("classes").get<std::vector<int>>();
        model.input_dim = j.at("input_dim").get<std::size_t>();
        model.kept_dims = j.at("kept_dims").get<std::vector<std::size_t>>();
        model.mean = j.at("mean").get<std::vector<double>>();
        model.scale = j.at("scale").get<std::vector<double>>();
        model.dropped_dims = model.input_dim - model.kept_dims.size();
        for (const auto& jm : j.at("machines")) {
            BinaryMachine m;
            m.positive = jm.at("positive").get<int>();
            m.negative = jm.at("negative").get<int>();
            m.bias = jm.at("bias").get<double>();
            m.kkt_gap = jm.at("kkt_gap").get<double>();
            m.coef = jm.at("coef").get<std::vector<double>>();
            m.supports = jm.at("supports").get<std::vector<std::vector<double>>>();
            m.kernel = model.kernel;
            model.machines.push_back(std::move(m));
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::BadFile, std::string("svm json: ") + e.what());
    }
}

}  // namespace actgram
