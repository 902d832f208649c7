#include "agp/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace agp {

namespace {

std::string num(double v) {
    if (!std::isfinite(v)) throw NumericalError("save_model: non-finite value");
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_vector(std::ostream& out, const Vector& v) {
    out << "[";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out << ", ";
        out << num(v(i));
    }
    out << "]";
}

void write_matrix(std::ostream& out, const Matrix& m, const char* indent) {
    out << "[\n";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        out << indent << "  ";
        write_vector(out, m.row(r).transpose());
        out << (r + 1 < m.rows() ? ",\n" : "\n");
    }
    out << indent << "]";
}

Vector vector_from_json(const nlohmann::json& j) {
    Vector v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

Matrix matrix_from_json(const nlohmann::json& j) {
    if (j.empty()) throw DataError("model file: empty matrix");
    const size_t cols = j[0].size();
    Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (size_t r = 0; r < j.size(); ++r) {
        if (j[r].size() != cols) throw DataError("model file: ragged matrix rows");
        for (size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
        }
    }
    return m;
}

}  // namespace

void save_model(const ModelState& state, const std::optional<Standardization>& standardization,
                double train_target_variance, const std::string& path) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"format\": \"agp-model\",\n";
    out << "  \"version\": 1,\n";
    out << "  \"mode\": \"" << to_string(state.metric.mode) << "\",\n";
    out << "  \"sigma\": " << num(state.sigma) << ",\n";
    out << "  \"center_method\": \"" << to_string(state.centers.method) << "\",\n";
    out << "  \"centers\": ";
    write_matrix(out, state.centers.centers, "  ");
    out << ",\n";
    out << "  \"center_targets\": ";
    write_vector(out, state.centers.targets);
    out << ",\n";

    out << "  \"metric\": {";
    switch (state.metric.mode) {
        case MetricMode::shared:
            out << "\"shared_lengthscale\": " << num(state.metric.shared_lengthscale);
            break;
        case MetricMode::per_center_univariate:
            out << "\"lengthscales\": ";
            write_vector(out, state.metric.lengthscales);
            break;
        case MetricMode::per_center_multivariate: {
            out << "\"precisions\": [\n";
            for (size_t i = 0; i < state.metric.precisions.size(); ++i) {
                out << "    ";
                write_matrix(out, state.metric.precisions[i], "    ");
                out << (i + 1 < state.metric.precisions.size() ? ",\n" : "\n");
            }
            out << "  ]";
            break;
        }
    }
    out << "},\n";

    if (standardization) {
        out << "  \"standardization\": {\n";
        out << "    \"mean\": ";
        write_vector(out, standardization->mean);
        out << ",\n";
        out << "    \"stddev\": ";
        write_vector(out, standardization->stddev);
        out << ",\n";
        out << "    \"constant_dims\": [";
        for (size_t i = 0; i < standardization->constant_dims.size(); ++i) {
            if (i) out << ", ";
            out << standardization->constant_dims[i];
        }
        out << "]\n  },\n";
    } else {
        out << "  \"standardization\": null,\n";
    }
    out << "  \"train_target_variance\": " << num(train_target_variance) << "\n";
    out << "}\n";

    std::ofstream file(path, std::ios::binary);
    if (!file) throw DataError("cannot open file for writing: " + path);
    file << out.str();
}

LoadedModel load_model(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw DataError("cannot open model file: " + path);

    nlohmann::json j;
    try {
        file >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("model file is not valid JSON: " + std::string(e.what()));
    }

    try {
        if (j.at("format").get<std::string>() != "agp-model") {
            throw DataError("not an agp model file: " + path);
        }
        CenterSet centers;
        centers.method = center_method_from_string(j.at("center_method").get<std::string>());
        centers.centers = matrix_from_json(j.at("centers"));
        centers.targets = vector_from_json(j.at("center_targets"));
        if (centers.targets.size() != centers.centers.rows()) {
            throw DataError("model file: center targets do not match centers");
        }

        KernelMetric metric;
        metric.mode = metric_mode_from_string(j.at("mode").get<std::string>());
        const nlohmann::json& jm = j.at("metric");
        switch (metric.mode) {
            case MetricMode::shared:
                metric.shared_lengthscale = jm.at("shared_lengthscale").get<double>();
                break;
            case MetricMode::per_center_univariate:
                metric.lengthscales = vector_from_json(jm.at("lengthscales"));
                break;
            case MetricMode::per_center_multivariate:
                for (const auto& p : jm.at("precisions")) {
                    metric.precisions.push_back(matrix_from_json(p));
                }
                break;
        }

        LoadedModel out;
        out.state = make_model(std::move(centers), std::move(metric),
                               j.at("sigma").get<double>());
        if (!j.at("standardization").is_null()) {
            Standardization stats;
            stats.mean = vector_from_json(j["standardization"].at("mean"));
            stats.stddev = vector_from_json(j["standardization"].at("stddev"));
            for (const auto& c : j["standardization"].at("constant_dims")) {
                stats.constant_dims.push_back(c.get<int>());
            }
            out.standardization = std::move(stats);
        }
        out.train_target_variance = j.at("train_target_variance").get<double>();
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("model file is missing fields: " + std::string(e.what()));
    }
}

}  // namespace agp
