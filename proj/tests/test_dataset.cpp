#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "agp/dataset.hpp"
#include "agp/rng.hpp"
#include "oracles.hpp"

using agp::Dataset;
using agp::Matrix;
using agp::Vector;

namespace {

std::string temp_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "agp_tests";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

}  // namespace

TEST_CASE("load_csv reads a small file with a named target column") {
    const std::string path = temp_path("small.csv");
    std::ofstream(path) << "a,b,y\n1,2,3\n4,5,6\n7,8,9\n";
    const Dataset ds = agp::load_csv(path, "y");
    CHECK(ds.size() == 3);
    CHECK(ds.dim() == 2);
    CHECK(ds.targets(0) == 3.0);
    CHECK(ds.features(2, 1) == 8.0);
}

TEST_CASE("load_csv selects the target by index when no header matches") {
    const std::string path = temp_path("by_index.csv");
    std::ofstream(path) << "a,b,c\n1,2,3\n";
    const Dataset ds = agp::load_csv(path, "1");
    CHECK(ds.targets(0) == 2.0);
    CHECK(ds.features(0, 0) == 1.0);
    CHECK(ds.features(0, 1) == 3.0);
}

TEST_CASE("load_csv reports the row and column of a non-numeric cell") {
    const std::string path = temp_path("bad_cell.csv");
    std::ofstream(path) << "a,b,c,y\n1,2,3,oops\n";
    try {
        agp::load_csv(path, "y");
        FAIL("expected DataError");
    } catch (const agp::DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("row 2") != std::string::npos);
        CHECK(msg.find("col 4") != std::string::npos);
    }
}

TEST_CASE("load_csv rejects missing files and ragged rows") {
    CHECK_THROWS_AS(agp::load_csv(temp_path("missing.csv"), "y"), agp::DataError);
    const std::string path = temp_path("ragged.csv");
    std::ofstream(path) << "a,y\n1,2\n1,2,3\n";
    CHECK_THROWS_AS(agp::load_csv(path, "y"), agp::DataError);
}

TEST_CASE("CSV round-trip preserves values") {
    agp::Rng rng(21);
    const Dataset ds = oracles::random_dataset(rng, 17, 3);
    const std::string path = temp_path("roundtrip.csv");
    agp::write_csv(ds, path);
    const Dataset back = agp::load_csv(path, "target");
    CHECK((back.features - ds.features).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((back.targets - ds.targets).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("standardize maps a two-point dimension to -1, 1") {
    Dataset ds;
    ds.features.resize(2, 1);
    ds.features << 0.0, 2.0;
    ds.targets.resize(2);
    ds.targets << 0.0, 0.0;
    const auto [train, others] = agp::standardize(ds, {});
    CHECK(train.features(0, 0) == doctest::Approx(-1.0));
    CHECK(train.features(1, 0) == doctest::Approx(1.0));
    CHECK(others.empty());
}

TEST_CASE("standardize leaves constant dimensions unchanged and records them") {
    Dataset ds;
    ds.features.resize(3, 2);
    ds.features << 5.0, 1.0, 5.0, 2.0, 5.0, 3.0;
    ds.targets = Vector::Zero(3);
    const auto [train, others] = agp::standardize(ds, {});
    CHECK(train.standardization->constant_dims == std::vector<int>{0});
    for (int r = 0; r < 3; ++r) CHECK(train.features(r, 0) == 5.0);
    CHECK(train.standardization->stddev(0) == 1.0);
    CHECK(train.standardization->mean(0) == 0.0);
}

TEST_CASE("standardize produces zero mean and unit variance on random data") {
    agp::Rng rng(22);
    Dataset ds = oracles::random_dataset(rng, 200, 4);
    ds.features *= 3.7;
    ds.features.array() += 2.5;
    const auto [train, others] = agp::standardize(ds, {});
    for (int c = 0; c < train.dim(); ++c) {
        const double mean = train.features.col(c).mean();
        const double var = (train.features.col(c).array() - mean).square().sum() / train.size();
        CHECK(std::abs(mean) < 1e-10);
        CHECK(std::abs(var - 1.0) < 1e-8);
    }
}

TEST_CASE("standardize applies the train statistics to other datasets") {
    agp::Rng rng(23);
    const Dataset train_in = oracles::random_dataset(rng, 50, 2);
    const Dataset other_in = oracles::random_dataset(rng, 20, 2);
    const auto [train, others] = agp::standardize(train_in, {other_in});
    REQUIRE(others.size() == 1);
    const agp::Standardization& stats = *train.standardization;
    for (int r = 0; r < 20; ++r) {
        for (int c = 0; c < 2; ++c) {
            const double expected = (other_in.features(r, c) - stats.mean(c)) / stats.stddev(c);
            CHECK(others[0].features(r, c) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("standardize round-trips through the inverse map") {
    agp::Rng rng(24);
    const Dataset ds = oracles::random_dataset(rng, 40, 3);
    const auto [train, others] = agp::standardize(ds, {});
    const Dataset back = agp::invert_standardization(train, *train.standardization);
    CHECK((back.features - ds.features).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("split partitions 200 samples into 100/100") {
    agp::Rng rng(25);
    const Dataset ds = oracles::random_dataset(rng, 200, 2);
    agp::SplitSpec spec;
    spec.validation_count = 100;
    spec.rng_seed = 3;
    const agp::Split parts = agp::split(ds, spec);
    CHECK(parts.train.size() == 100);
    CHECK(parts.validation.size() == 100);
    CHECK(parts.test.size() == 0);
}

TEST_CASE("split is deterministic under the seed") {
    agp::Rng rng(26);
    const Dataset ds = oracles::random_dataset(rng, 60, 2);
    agp::SplitSpec spec;
    spec.validation_count = 15;
    spec.test_fraction = 0.25;
    spec.rng_seed = 99;
    const agp::Split a = agp::split(ds, spec);
    const agp::Split b = agp::split(ds, spec);
    CHECK(a.train.features == b.train.features);
    CHECK(a.validation.features == b.validation.features);
    CHECK(a.test.features == b.test.features);
}

TEST_CASE("split partitions are disjoint and exhaustive") {
    // targets double as unique sample ids
    const int m = 97;
    Dataset ds;
    ds.features = Matrix::Zero(m, 1);
    ds.targets.resize(m);
    for (int i = 0; i < m; ++i) {
        ds.features(i, 0) = i;
        ds.targets(i) = i;
    }
    for (uint64_t seed : {0ULL, 1ULL, 42ULL}) {
        agp::SplitSpec spec;
        spec.validation_count = 20;
        spec.test_fraction = 0.3;
        spec.rng_seed = seed;
        const agp::Split parts = agp::split(ds, spec);
        std::multiset<int> seen;
        for (const Dataset* d : {&parts.train, &parts.validation, &parts.test}) {
            for (int i = 0; i < d->size(); ++i) seen.insert(static_cast<int>(d->targets(i)));
        }
        CHECK(seen.size() == static_cast<size_t>(m));
        for (int i = 0; i < m; ++i) CHECK(seen.count(i) == 1);
    }
}

TEST_CASE("split rejects an oversized validation count") {
    agp::Rng rng(27);
    const Dataset ds = oracles::random_dataset(rng, 10, 1);
    agp::SplitSpec spec;
    spec.validation_count = 10;
    CHECK_THROWS_AS(agp::split(ds, spec), std::invalid_argument);
}

TEST_CASE("gen_blobs is bright at the designated centers and dark in the corners") {
    const agp::Blobs blobs = agp::gen_blobs(64, 64);
    const double max_intensity = blobs.data.targets.maxCoeff();
    for (int s = 0; s < 2; ++s) {
        CHECK(blobs.center_targets(s) >= 0.9 * max_intensity);
    }
    CHECK(blobs.data.targets(0) < 0.05);                       // (0, 0)
    CHECK(blobs.data.targets(blobs.data.size() - 1) < 0.05);   // (w-1, h-1)
    CHECK(blobs.data.features.minCoeff() == 0.0);
    CHECK(blobs.data.features.maxCoeff() == 1.0);
}

TEST_CASE("gen_blobs bright-pixel fraction matches the analytic ellipse area") {
    const agp::Blobs blobs = agp::gen_blobs(96, 96);
    int bright = 0;
    for (int i = 0; i < blobs.data.size(); ++i) {
        if (blobs.data.targets(i) > 0.5) ++bright;
    }
    const double fraction = static_cast<double>(bright) / blobs.data.size();
    const double analytic = std::numbers::pi * (0.25 * 0.25 + 0.23 * 0.0767);
    CHECK(std::abs(fraction - analytic) < 0.03);
}

TEST_CASE("gen_blobs rejects tiny images") {
    CHECK_THROWS_AS(agp::gen_blobs(4, 64), std::invalid_argument);
}

TEST_CASE("gp1d_covariance has a unit diagonal and is PSD after jitter") {
    const Matrix k = agp::gp1d_covariance(20, 13.5);
    for (int i = 0; i < 20; ++i) CHECK(k(i, i) == 1.0);
    CHECK(agp::is_symmetric(k));
    Matrix kj = k;
    kj.diagonal().array() += agp::kPsdJitter;
    CHECK(agp::min_eigenvalue(kj) >= -1e-12);
}

TEST_CASE("gen_gp_1d is deterministic under the seed") {
    const Dataset a = agp::gen_gp_1d(40, 13.5, 0.1, 5);
    const Dataset b = agp::gen_gp_1d(40, 13.5, 0.1, 5);
    CHECK(a.targets == b.targets);
    const Dataset c = agp::gen_gp_1d(40, 13.5, 0.1, 6);
    CHECK(a.targets != c.targets);
    CHECK(a.features(0, 0) == 0.0);
    CHECK(a.features(39, 0) == 39.0);
}

TEST_CASE("gen_gp_1d empirical lag correlation matches the covariance") {
    const int n = 48;
    const double lengthscale = 6.0;
    const int draws = 1500;
    std::vector<double> lag_sum(6, 0.0);
    std::vector<long> lag_count(6, 0);
    for (int d = 0; d < draws; ++d) {
        const Dataset ds = agp::gen_gp_1d(n, lengthscale, 0.0, 1000 + d);
        for (int lag = 0; lag < 6; ++lag) {
            for (int i = 0; i + lag < n; ++i) {
                lag_sum[lag] += ds.targets(i) * ds.targets(i + lag);
                lag_count[lag]++;
            }
        }
    }
    const double var = lag_sum[0] / lag_count[0];
    for (int lag = 1; lag < 6; ++lag) {
        const double emp = (lag_sum[lag] / lag_count[lag]) / var;
        const double expected = std::exp(-0.5 * lag * lag / (lengthscale * lengthscale));
        CHECK(std::abs(emp - expected) / expected < 0.05);
    }
}
