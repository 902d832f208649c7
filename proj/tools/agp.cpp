#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "agp/centers.hpp"
#include "agp/dataset.hpp"
#include "agp/experiments.hpp"
#include "agp/metrics.hpp"
#include "agp/serialize.hpp"
#include "agp/train.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::vector<std::string>& args, int depth);

uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw agp::DataError("cannot hash missing file: " + path);
    uint64_t h = 1469598103934665603ULL;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_manifest(const std::string& path, const std::string& command,
                    const std::vector<std::string>& argv,
                    const std::vector<std::pair<std::string, std::string>>& input_hashes,
                    const std::vector<std::string>& outputs) {
    nlohmann::json j;
    j["format"] = "agp-manifest";
    j["version"] = 1;
    j["command"] = command;
    j["argv"] = argv;
    nlohmann::json inputs = nlohmann::json::object();
    for (const auto& [p, h] : input_hashes) inputs[p] = {{"fnv1a64", h}};
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw agp::DataError("cannot write manifest: " + path);
    out << j.dump(2) << "\n";
}

void write_raster_csv(const agp::Vector& values, int width, int height,
                      const std::string& path) {
    std::ofstream out(path);
    if (!out) throw agp::DataError("cannot open file for writing: " + path);
    out << "row,col,value\n";
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            out << r << "," << c << "," << fmt(values(r * width + c)) << "\n";
        }
    }
}

std::string output_stem(const std::string& model_path) {
    const std::string suffix = ".json";
    if (model_path.size() > suffix.size() &&
        model_path.compare(model_path.size() - suffix.size(), suffix.size(), suffix) == 0) {
        return model_path.substr(0, model_path.size() - suffix.size());
    }
    return model_path;
}

// ---------------------------------- train ----------------------------------

struct TrainArgs {
    std::string data, target, mode, out;
    std::string center_method = "kmeans";
    int centers = 10;
    double lr = 1e-5;
    int epochs = 50;
    int batch = 64;
    double momentum = 0.9;
    double mu = 1e-5;
    int val_count = 100;
    uint64_t seed = 0;
};

agp::MetricMode mode_from_flag(const std::string& mode) {
    if (mode == "center-gp") return agp::MetricMode::shared;
    if (mode == "agp-uni") return agp::MetricMode::per_center_univariate;
    if (mode == "agp-multi") return agp::MetricMode::per_center_multivariate;
    throw std::invalid_argument("unknown mode: " + mode);
}

int cmd_train(const TrainArgs& a) {
    const agp::Dataset raw = agp::load_csv(a.data, a.target);

    agp::SplitSpec spec;
    spec.validation_count = a.val_count;
    spec.rng_seed = a.seed;
    const agp::Split parts = agp::split(raw, spec);

    auto [train, others] = agp::standardize(parts.train, {parts.validation});
    const agp::Dataset& validation = others[0];
    for (int c : train.standardization->constant_dims) {
        std::cerr << "warning: feature column " << c << " is constant; left unscaled\n";
    }

    const agp::CenterSet centers =
        a.center_method == "kmeans" ? agp::kmeans(train, a.centers, a.seed)
                                    : agp::random_centers(train, a.centers, a.seed);

    agp::TrainConfig cfg;
    cfg.learning_rate = a.lr;
    cfg.momentum = a.momentum;
    cfg.batch_size = a.batch;
    cfg.mu = a.mu;
    cfg.epochs = a.epochs;
    cfg.seed = a.seed;
    cfg.grid = agp::default_grid(centers);

    const agp::FitResult fr =
        agp::fit(train, validation, centers, cfg, mode_from_flag(a.mode));

    const double train_var = agp::population_variance(train.targets);
    const std::string stem = output_stem(a.out);
    const std::string trace_path = stem + ".trace.csv";
    const std::string manifest_path = stem + ".manifest.json";

    agp::save_model(fr.model, train.standardization, train_var, a.out);
    agp::write_trace_csv(fr.trace, trace_path);

    const std::vector<std::string> argv = {
        "train", "--data", a.data, "--target", a.target, "--mode", a.mode,
        "--centers", std::to_string(a.centers), "--center-method", a.center_method,
        "--lr", fmt(a.lr), "--epochs", std::to_string(a.epochs),
        "--batch", std::to_string(a.batch), "--momentum", fmt(a.momentum),
        "--mu", fmt(a.mu), "--val-count", std::to_string(a.val_count),
        "--seed", std::to_string(a.seed), "--out", a.out};
    write_manifest(manifest_path, "train", argv, {{a.data, hex64(fnv1a64_file(a.data))}},
                   {a.out, trace_path});

    std::cout << "trained " << a.mode << " on " << train.size() << " samples ("
              << centers.count() << " centers, " << validation.size() << " validation)\n";
    std::cout << "best epoch " << fr.trace.best_epoch << ", validation loss "
              << fr.trace.epochs[fr.trace.best_epoch].validation_loss << "\n";
    std::cout << "model written to " << a.out << "\n";
    return 0;
}

// ----------------------------------- eval ----------------------------------

struct EvalArgs {
    std::string model, data, target, metric, out;
    bool csv = false;
};

int cmd_eval(const EvalArgs& a) {
    const agp::LoadedModel lm = agp::load_model(a.model);
    const agp::Dataset raw = agp::load_csv(a.data, a.target);
    if (raw.dim() != lm.state.centers.dim()) {
        throw agp::DataError("model expects " + std::to_string(lm.state.centers.dim()) +
                             " feature dims, data has " + std::to_string(raw.dim()));
    }
    const agp::Dataset data =
        lm.standardization ? agp::apply_standardization(raw, *lm.standardization) : raw;

    const agp::Vector preds = agp::predict_all(lm.state, data.features);
    const agp::EvalResult r = agp::evaluate(preds, data.targets, lm.train_target_variance);

    if (!a.metric.empty()) {
        const double v = a.metric == "mse" ? r.mse : (a.metric == "rmse" ? r.rmse : r.nrmse);
        std::cout << a.metric << " " << v << "\n";
    } else if (a.csv) {
        std::cout << agp::to_csv(r);
    } else {
        std::cout << agp::render_table(r);
    }

    if (!a.out.empty()) {
        fs::create_directories(a.out);
        const std::string eval_path = (fs::path(a.out) / "eval.csv").string();
        std::ofstream f(eval_path);
        f << agp::to_csv(r);
        const std::vector<std::string> argv = {"eval", "--model", a.model, "--data", a.data,
                                               "--target", a.target, "--out", a.out};
        write_manifest((fs::path(a.out) / "manifest.json").string(), "eval", argv,
                       {{a.model, hex64(fnv1a64_file(a.model))},
                        {a.data, hex64(fnv1a64_file(a.data))}},
                       {eval_path});
    }
    return 0;
}

// ---------------------------------- blobs ----------------------------------

struct BlobsArgs {
    std::string out;
    int size = 64;
    uint64_t seed = agp::BlobsConfig{}.seed;
    int train_pixels = 100;
    int val_pixels = 100;
    int epochs = agp::BlobsConfig{}.epochs;
    double lr = agp::BlobsConfig{}.learning_rate;
    double multi_lr = agp::BlobsConfig{}.multivariate_rate;
};

int cmd_blobs(const BlobsArgs& a) {
    agp::BlobsConfig cfg;
    cfg.size = a.size;
    cfg.seed = a.seed;
    cfg.train_pixels = a.train_pixels;
    cfg.validation_pixels = a.val_pixels;
    cfg.epochs = a.epochs;
    cfg.learning_rate = a.lr;
    cfg.multivariate_rate = a.multi_lr;

    const agp::BlobsResult res = agp::run_blobs(cfg);

    fs::create_directories(a.out);
    std::vector<std::string> outputs;
    auto emit = [&](const std::string& name) {
        outputs.push_back((fs::path(a.out) / name).string());
        return outputs.back();
    };

    write_raster_csv(res.blobs.data.targets, res.blobs.width, res.blobs.height, emit("input.csv"));
    {
        std::ofstream f(emit("nrmse.csv"));
        f << "model,nrmse\n";
        for (const auto& run : res.runs) f << run.name << "," << fmt(run.nrmse) << "\n";
    }
    for (const auto& run : res.runs) {
        write_raster_csv(run.prediction, res.blobs.width, res.blobs.height,
                         emit("pred_" + run.name + ".csv"));
        agp::write_trace_csv(run.trace, emit("trace_" + run.name + ".csv"));
    }

    const std::vector<std::string> argv = {
        "blobs", "--out", a.out, "--size", std::to_string(a.size),
        "--seed", std::to_string(a.seed), "--train-pixels", std::to_string(a.train_pixels),
        "--val-pixels", std::to_string(a.val_pixels), "--epochs", std::to_string(a.epochs),
        "--lr", fmt(a.lr), "--multi-lr", fmt(a.multi_lr)};
    write_manifest((fs::path(a.out) / "manifest.json").string(), "blobs", argv, {}, outputs);

    std::cout << "model             nrmse\n";
    for (const auto& run : res.runs) {
        char buf[80];
        std::snprintf(buf, sizeof(buf), "%-17s %.4f\n", run.name.c_str(), run.nrmse);
        std::cout << buf;
    }
    return 0;
}

// ------------------------------- consistency -------------------------------

struct ConsistencyArgs {
    std::string out;
    std::vector<int> sizes{32, 64, 128, 256};
    int repeats = 3;
    uint64_t seed = agp::ConsistencyConfig{}.seed;
    int epochs = agp::ConsistencyConfig{}.epochs;
    double lr = agp::ConsistencyConfig{}.learning_rate;
    double noise = agp::ConsistencyConfig{}.noise;
};

int cmd_consistency(const ConsistencyArgs& a) {
    agp::ConsistencyConfig cfg;
    cfg.sizes = a.sizes;
    cfg.repeats = a.repeats;
    cfg.seed = a.seed;
    cfg.epochs = a.epochs;
    cfg.learning_rate = a.lr;
    cfg.noise = a.noise;

    const std::vector<agp::ConsistencyRow> rows = agp::run_consistency(cfg);

    fs::create_directories(a.out);
    const std::string csv_path = (fs::path(a.out) / "consistency.csv").string();
    {
        std::ofstream f(csv_path);
        f << "size,mean,std,baseline\n";
        for (const auto& r : rows) {
            f << r.size << "," << fmt(r.agp_mean) << "," << fmt(r.agp_std) << ","
              << fmt(r.baseline_mean) << "\n";
        }
    }

    std::ostringstream sizes_flag;
    for (size_t i = 0; i < a.sizes.size(); ++i) sizes_flag << (i ? "," : "") << a.sizes[i];
    const std::vector<std::string> argv = {
        "consistency", "--out", a.out, "--sizes", sizes_flag.str(),
        "--repeats", std::to_string(a.repeats), "--seed", std::to_string(a.seed),
        "--epochs", std::to_string(a.epochs), "--lr", fmt(a.lr), "--noise", fmt(a.noise)};
    write_manifest((fs::path(a.out) / "manifest.json").string(), "consistency", argv, {},
                   {csv_path});

    std::cout << "size  distance(mean)  distance(std)  baseline\n";
    for (const auto& r : rows) {
        char buf[120];
        std::snprintf(buf, sizeof(buf), "%-5d %-15.4f %-14.4f %.4f\n", r.size, r.agp_mean,
                      r.agp_std, r.baseline_mean);
        std::cout << buf;
    }
    return 0;
}

// ---------------------------------- rerun ----------------------------------

int cmd_rerun(const std::string& manifest_path, int depth) {
    if (depth > 1) throw agp::DataError("rerun: nested rerun manifests are not supported");
    std::ifstream in(manifest_path);
    if (!in) throw agp::DataError("cannot open manifest: " + manifest_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw agp::DataError("manifest is not valid JSON: " + std::string(e.what()));
    }
    std::vector<std::string> argv;
    for (const auto& a : j.at("argv")) argv.push_back(a.get<std::string>());
    return run_cli(argv, depth + 1);
}

// --------------------------------- dispatch --------------------------------

int run_cli(const std::vector<std::string>& args, int depth) {
    CLI::App app{
        "Gaussian Process regression with per-center asymmetric kernel metrics.\n"
        "Models: center-gp (shared grid-searched lengthscale), agp-uni (one\n"
        "lengthscale per center), agp-multi (one precision matrix per center).\n"
        "All outputs are plain CSV (traces: epoch,train_loss,validation_loss,\n"
        "seconds; rasters: row,col,value) or JSON (models, manifests)."};
    app.require_subcommand(1);

    TrainArgs ta;
    auto* t = app.add_subcommand("train", "Fit a model on a CSV dataset");
    t->add_option("--data", ta.data, "training CSV path")->required();
    t->add_option("--target", ta.target, "target column name or 0-based index")->required();
    t->add_option("--mode", ta.mode, "model variant")
        ->required()
        ->check(CLI::IsMember({"center-gp", "agp-uni", "agp-multi"}));
    t->add_option("--centers", ta.centers, "number of data centers");
    t->add_option("--center-method", ta.center_method, "center selection")
        ->check(CLI::IsMember({"kmeans", "random"}));
    t->add_option("--lr", ta.lr,
                  "SGD learning rate (default 1e-5 suits low-dimensional data; "
                  "scale down with the squared feature dimension, e.g. 1e-11 near D=1000)");
    t->add_option("--epochs", ta.epochs, "SGD epochs");
    t->add_option("--batch", ta.batch, "mini-batch size");
    t->add_option("--momentum", ta.momentum, "SGD momentum");
    t->add_option("--mu", ta.mu, "regularizer weight");
    t->add_option("--val-count", ta.val_count, "validation samples held out of training");
    t->add_option("--seed", ta.seed, "RNG seed");
    t->add_option("--out", ta.out, "model JSON output path")->required();

    EvalArgs ea;
    auto* e = app.add_subcommand("eval", "Evaluate a saved model on a CSV dataset");
    e->add_option("--model", ea.model, "model JSON path")->required();
    e->add_option("--data", ea.data, "evaluation CSV path")->required();
    e->add_option("--target", ea.target, "target column name or 0-based index")->required();
    e->add_option("--metric", ea.metric, "print a single metric")
        ->check(CLI::IsMember({"nrmse", "rmse", "mse"}));
    e->add_flag("--csv", ea.csv, "print a CSV row instead of a table");
    e->add_option("--out", ea.out, "directory for eval.csv + manifest");

    BlobsArgs ba;
    auto* b = app.add_subcommand("blobs", "Two-blob pixel intensity experiment");
    b->add_option("--out", ba.out, "output directory")->required();
    b->add_option("--size", ba.size, "image width/height in pixels");
    b->add_option("--seed", ba.seed, "RNG seed");
    b->add_option("--train-pixels", ba.train_pixels, "training pixels sampled");
    b->add_option("--val-pixels", ba.val_pixels, "validation pixels sampled");
    b->add_option("--epochs", ba.epochs, "SGD epochs");
    b->add_option("--lr", ba.lr, "SGD learning rate for per-center lengthscales");
    b->add_option("--multi-lr", ba.multi_lr, "SGD learning rate for precision matrices");

    ConsistencyArgs ca;
    auto* c = app.add_subcommand("consistency", "1-D lengthscale recovery experiment");
    c->add_option("--out", ca.out, "output directory")->required();
    c->add_option("--sizes", ca.sizes, "training sizes")->delimiter(',');
    c->add_option("--repeats", ca.repeats, "repetitions per size");
    c->add_option("--seed", ca.seed, "RNG seed");
    c->add_option("--epochs", ca.epochs, "SGD epochs");
    c->add_option("--lr", ca.lr, "SGD learning rate");
    c->add_option("--noise", ca.noise, "observation noise of the sampled GP");

    std::string manifest_path;
    auto* r = app.add_subcommand("rerun", "Re-execute a run from its manifest");
    r->add_option("--manifest", manifest_path, "manifest JSON path")->required();

    try {
        // CLI11 parses reversed argv vectors.
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& ex) {
        if (ex.get_exit_code() == 0) return app.exit(ex);  // --help / --version
        std::cerr << ex.what() << "\n\n" << app.help() << std::flush;
        return 1;
    }

    try {
        if (t->parsed()) return cmd_train(ta);
        if (e->parsed()) return cmd_eval(ea);
        if (b->parsed()) return cmd_blobs(ba);
        if (c->parsed()) return cmd_consistency(ca);
        if (r->parsed()) return cmd_rerun(manifest_path, depth);
    } catch (const agp::DataError& ex) {
        std::cerr << "data error: " << ex.what() << "\n";
        return 2;
    } catch (const agp::NumericalError& ex) {
        std::cerr << "numerical error: " << ex.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& ex) {
        std::cerr << "data error: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 3;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, 0);
}
