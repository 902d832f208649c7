#include "agp/dataset.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "agp/rng.hpp"

namespace agp {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim surrounding whitespace and stray CR
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_cell(const std::string& cell, int line_no, int col_no) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || cell.empty()) {
        throw DataError("CSV parse error: non-numeric cell at row " + std::to_string(line_no) +
                        ", col " + std::to_string(col_no) + " ('" + cell + "')");
    }
    return value;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Dataset take_rows(const Dataset& data, const std::vector<int>& rows) {
    Dataset out;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), data.dim());
    out.targets.resize(static_cast<Eigen::Index>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        out.features.row(static_cast<Eigen::Index>(i)) = data.features.row(rows[i]);
        out.targets(static_cast<Eigen::Index>(i)) = data.targets(rows[i]);
    }
    out.standardization = data.standardization;
    return out;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& target_column) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty CSV file: " + path);
    const std::vector<std::string> header = split_fields(line);
    const int n_cols = static_cast<int>(header.size());
    if (n_cols < 2) throw DataError("CSV needs at least one feature column and a target: " + path);

    int target_idx = -1;
    for (int c = 0; c < n_cols; ++c) {
        if (header[c] == target_column) target_idx = c;
    }
    if (target_idx < 0) {
        // fall back to a 0-based column index
        int idx = -1;
        const auto* first = target_column.data();
        const auto* last = target_column.data() + target_column.size();
        auto [ptr, ec] = std::from_chars(first, last, idx);
        if (ec == std::errc() && ptr == last && idx >= 0 && idx < n_cols) target_idx = idx;
    }
    if (target_idx < 0) {
        throw DataError("target column '" + target_column + "' not found in " + path);
    }

    std::vector<std::vector<double>> rows;
    int line_no = 1;  // header is line 1
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> cells = split_fields(line);
        if (static_cast<int>(cells.size()) != n_cols) {
            throw DataError("ragged CSV row " + std::to_string(line_no) + ": expected " +
                            std::to_string(n_cols) + " cells, got " +
                            std::to_string(cells.size()));
        }
        std::vector<double> row(n_cols);
        for (int c = 0; c < n_cols; ++c) row[c] = parse_cell(cells[c], line_no, c + 1);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError("CSV has no data rows: " + path);

    Dataset out;
    const int m = static_cast<int>(rows.size());
    out.features.resize(m, n_cols - 1);
    out.targets.resize(m);
    for (int r = 0; r < m; ++r) {
        int f = 0;
        for (int c = 0; c < n_cols; ++c) {
            if (c == target_idx) {
                out.targets(r) = rows[r][c];
            } else {
                out.features(r, f++) = rows[r][c];
            }
        }
    }
    return out;
}

void write_csv(const Dataset& data, const std::string& path, const std::string& target_name) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open file for writing: " + path);
    for (int c = 0; c < data.dim(); ++c) out << "x" << c << ",";
    out << target_name << "\n";
    for (int r = 0; r < data.size(); ++r) {
        for (int c = 0; c < data.dim(); ++c) out << format_double(data.features(r, c)) << ",";
        out << format_double(data.targets(r)) << "\n";
    }
}

std::pair<Dataset, std::vector<Dataset>> standardize(const Dataset& train,
                                                     const std::vector<Dataset>& others) {
    if (train.size() < 1) throw std::invalid_argument("standardize: empty training set");
    const int d = train.dim();
    const int m = train.size();

    Standardization stats;
    stats.mean.resize(d);
    stats.stddev.resize(d);
    for (int c = 0; c < d; ++c) {
        double mu = train.features.col(c).mean();
        const double var = (train.features.col(c).array() - mu).square().sum() / m;
        double sd = std::sqrt(var);
        if (sd <= 1e-12 * std::max(1.0, std::abs(mu))) {
            // constant dimension: identity map, values pass through unchanged
            mu = 0.0;
            sd = 1.0;
            stats.constant_dims.push_back(c);
        }
        stats.mean(c) = mu;
        stats.stddev(c) = sd;
    }

    Dataset train_out = apply_standardization(train, stats);
    std::vector<Dataset> others_out;
    others_out.reserve(others.size());
    for (const Dataset& o : others) others_out.push_back(apply_standardization(o, stats));
    return {std::move(train_out), std::move(others_out)};
}

Dataset apply_standardization(const Dataset& data, const Standardization& stats) {
    if (data.dim() != stats.mean.size()) {
        throw DataError("apply_standardization: data has " + std::to_string(data.dim()) +
                        " dims, statistics have " + std::to_string(stats.mean.size()));
    }
    Dataset out = data;
    for (int c = 0; c < out.dim(); ++c) {
        out.features.col(c) = (out.features.col(c).array() - stats.mean(c)) / stats.stddev(c);
    }
    out.standardization = stats;
    return out;
}

Dataset invert_standardization(const Dataset& data, const Standardization& stats) {
    if (data.dim() != stats.mean.size()) {
        throw DataError("invert_standardization: dimension mismatch");
    }
    Dataset out = data;
    for (int c = 0; c < out.dim(); ++c) {
        out.features.col(c) = out.features.col(c).array() * stats.stddev(c) + stats.mean(c);
    }
    out.standardization.reset();
    return out;
}

Split split(const Dataset& data, const SplitSpec& spec) {
    const int m = data.size();
    if (spec.test_fraction < 0.0 || spec.test_fraction >= 1.0) {
        throw std::invalid_argument("split: test_fraction must be in [0, 1)");
    }
    const int test_count = static_cast<int>(std::lround(spec.test_fraction * m));
    const int trainval = m - test_count;
    if (spec.validation_count < 0 || spec.validation_count >= trainval) {
        throw std::invalid_argument("split: validation_count (" +
                                    std::to_string(spec.validation_count) +
                                    ") must be smaller than the trainval size (" +
                                    std::to_string(trainval) + ")");
    }

    std::vector<int> idx(m);
    for (int i = 0; i < m; ++i) idx[i] = i;
    Rng rng(spec.rng_seed);
    rng.shuffle(idx);

    const std::vector<int> test_idx(idx.begin(), idx.begin() + test_count);
    const std::vector<int> val_idx(idx.begin() + test_count,
                                   idx.begin() + test_count + spec.validation_count);
    const std::vector<int> train_idx(idx.begin() + test_count + spec.validation_count, idx.end());

    Split out;
    out.train = take_rows(data, train_idx);
    out.validation = take_rows(data, val_idx);
    out.test = take_rows(data, test_idx);
    return out;
}

namespace {

// Blob geometry in normalized [0,1]^2 coordinates.
struct Ellipse {
    double cx, cy;      // center
    double a, b;        // semi-axes
    double angle_deg;   // rotation
};

constexpr Ellipse kCircle{0.30, 0.34, 0.25, 0.25, 0.0};
constexpr Ellipse kEllipse{0.70, 0.64, 0.23, 0.0767, 30.0};

bool inside(const Ellipse& e, double x, double y) {
    const double t = e.angle_deg * std::numbers::pi / 180.0;
    const double dx = x - e.cx;
    const double dy = y - e.cy;
    const double u = std::cos(t) * dx + std::sin(t) * dy;
    const double v = -std::sin(t) * dx + std::cos(t) * dy;
    return (u * u) / (e.a * e.a) + (v * v) / (e.b * e.b) <= 1.0;
}

// Separable Gaussian blur with zero padding outside the image.
void gaussian_blur(std::vector<double>& img, int width, int height, double sigma_px) {
    const int radius = static_cast<int>(std::ceil(4.0 * sigma_px));
    std::vector<double> kernel(2 * radius + 1);
    double ksum = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        kernel[k + radius] = std::exp(-0.5 * k * k / (sigma_px * sigma_px));
        ksum += kernel[k + radius];
    }
    for (double& k : kernel) k /= ksum;

    std::vector<double> tmp(img.size(), 0.0);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                const int cc = c + k;
                if (cc >= 0 && cc < width) acc += kernel[k + radius] * img[r * width + cc];
            }
            tmp[r * width + c] = acc;
        }
    }
    for (int c = 0; c < width; ++c) {
        for (int r = 0; r < height; ++r) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                const int rr = r + k;
                if (rr >= 0 && rr < height) acc += kernel[k + radius] * tmp[rr * width + c];
            }
            img[r * width + c] = acc;
        }
    }
}

}  // namespace

Blobs gen_blobs(int width, int height) {
    if (width < 8 || height < 8) {
        throw std::invalid_argument("gen_blobs: width and height must be at least 8");
    }

    std::vector<double> img(static_cast<size_t>(width) * height, 0.0);
    for (int r = 0; r < height; ++r) {
        const double y = static_cast<double>(r) / (height - 1);
        for (int c = 0; c < width; ++c) {
            const double x = static_cast<double>(c) / (width - 1);
            if (inside(kCircle, x, y) || inside(kEllipse, x, y)) img[r * width + c] = 1.0;
        }
    }
    gaussian_blur(img, width, height, 1.0);

    Blobs out;
    out.width = width;
    out.height = height;
    out.data.features.resize(width * height, 2);
    out.data.targets.resize(width * height);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const int i = r * width + c;
            out.data.features(i, 0) = static_cast<double>(c) / (width - 1);
            out.data.features(i, 1) = static_cast<double>(r) / (height - 1);
            out.data.targets(i) = img[i];
        }
    }

    out.centers.resize(2, 2);
    out.center_targets.resize(2);
    const Ellipse shapes[2] = {kCircle, kEllipse};
    for (int s = 0; s < 2; ++s) {
        const int c = static_cast<int>(std::lround(shapes[s].cx * (width - 1)));
        const int r = static_cast<int>(std::lround(shapes[s].cy * (height - 1)));
        out.centers(s, 0) = static_cast<double>(c) / (width - 1);
        out.centers(s, 1) = static_cast<double>(r) / (height - 1);
        out.center_targets(s) = img[r * width + c];
    }
    return out;
}

Matrix gp1d_covariance(int n, double lengthscale, double span) {
    if (n < 2) throw std::invalid_argument("gp1d_covariance: n must be at least 2");
    if (!(lengthscale > 0.0)) {
        throw std::invalid_argument("gp1d_covariance: lengthscale must be positive");
    }
    const double step = span > 0.0 ? span / (n - 1) : 1.0;
    Matrix k(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double d = step * (i - j);
            k(i, j) = std::exp(-0.5 * d * d / (lengthscale * lengthscale));
        }
    }
    return k;
}

Dataset gen_gp_1d(int n, double lengthscale, double noise, uint64_t seed, double span) {
    Matrix k = gp1d_covariance(n, lengthscale, span);

    Eigen::LLT<Matrix> llt;
    double jitter = kPsdJitter;
    bool ok = false;
    while (jitter <= 1e-6 + 1e-18) {
        Matrix kj = k;
        kj.diagonal().array() += jitter;
        llt.compute(kj);
        if (llt.info() == Eigen::Success) {
            ok = true;
            break;
        }
        jitter *= 10.0;
    }
    if (!ok) {
        throw NumericalError("gen_gp_1d: covariance Cholesky failed after jitter escalation");
    }

    Rng rng(seed);
    Vector z(n), eps(n);
    for (int i = 0; i < n; ++i) z(i) = rng.normal();
    for (int i = 0; i < n; ++i) eps(i) = rng.normal();

    const double step = span > 0.0 ? span / (n - 1) : 1.0;
    Dataset out;
    out.features.resize(n, 1);
    for (int i = 0; i < n; ++i) out.features(i, 0) = step * i;
    out.targets = Matrix(llt.matrixL()) * z + noise * eps;
    return out;
}

}  // namespace agp
