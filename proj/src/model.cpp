#include "idrr/model.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "idrr/delimited.hpp"
#include "idrr/errors.hpp"
#include "idrr/hashing.hpp"

namespace idrr {

Parameters Parameters::zeros_like() const {
    Parameters out;
    for (const auto& t : tensors) out.tensors.emplace_back(t.rows(), t.cols(), 0.0);
    return out;
}

namespace {

void xavier_uniform(Matrix& m, Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
    for (double& v : m.data()) v = (2.0 * rng.unit() - 1.0) * bound;
}

// out(n, o) = sum_i in(n, i) * w(o, i) + b(o)
Matrix affine(const Matrix& in, const Matrix& w, const Matrix& b) {
    Matrix out(in.rows(), w.rows());
    for (std::size_t n = 0; n < in.rows(); ++n) {
        const auto x = in.row(n);
        for (std::size_t o = 0; o < w.rows(); ++o) {
            const auto wr = w.row(o);
            double acc = b(0, o);
            for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * wr[i];
            out(n, o) = acc;
        }
    }
    return out;
}

}  // namespace

MultiTaskModel::MultiTaskModel(const SenseHierarchy& hierarchy, const ModelConfig& config)
    : config_(config), encoder_(make_encoder(config.encoder)) {
    if (!(config_.dropout_rate >= 0.0 && config_.dropout_rate < 1.0)) throw ConfigError("dropout_rate must be in [0,1)");
    trunk_width_ = config_.trunk_width == 0 ? encoder_->width() : config_.trunk_width;
    for (std::size_t h = 0; h < 3; ++h) head_sizes_[h] = hierarchy.size(kLevels[h]);

    Rng rng(mix_seed(config_.seed, 0x1d2a));
    params_.tensors.emplace_back(trunk_width_, encoder_->width());
    params_.tensors.emplace_back(1, trunk_width_);
    xavier_uniform(params_.trunk_weight(), rng);
    for (std::size_t h = 0; h < 3; ++h) {
        params_.tensors.emplace_back(head_sizes_[h], trunk_width_);
        params_.tensors.emplace_back(1, head_sizes_[h]);
        xavier_uniform(params_.head_weight(h), rng);
    }
    check_shapes();
}

MultiTaskModel::MultiTaskModel(const SenseHierarchy& hierarchy, const ModelConfig& config, Parameters parameters)
    : config_(config), encoder_(make_encoder(config.encoder)), params_(std::move(parameters)) {
    if (!(config_.dropout_rate >= 0.0 && config_.dropout_rate < 1.0)) throw ConfigError("dropout_rate must be in [0,1)");
    trunk_width_ = config_.trunk_width == 0 ? encoder_->width() : config_.trunk_width;
    for (std::size_t h = 0; h < 3; ++h) head_sizes_[h] = hierarchy.size(kLevels[h]);
    check_shapes();
}

void MultiTaskModel::check_shapes() const {
    auto expect = [](const Matrix& m, std::size_t r, std::size_t c, const char* what) {
        if (m.rows() != r || m.cols() != c) {
            throw ShapeError(std::string(what) + " has shape " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                             ", expected " + std::to_string(r) + "x" + std::to_string(c));
        }
    };
    if (params_.tensors.size() != 8) throw ShapeError("expected 8 parameter tensors");
    expect(params_.trunk_weight(), trunk_width_, encoder_->width(), "trunk weight");
    expect(params_.trunk_bias(), 1, trunk_width_, "trunk bias");
    static const char* names[] = {"level-1 head", "level-2 head", "level-3 head"};
    for (std::size_t h = 0; h < 3; ++h) {
        expect(params_.head_weight(h), head_sizes_[h], trunk_width_, names[h]);
        expect(params_.head_bias(h), 1, head_sizes_[h], names[h]);
    }
}

std::vector<double> MultiTaskModel::embed(std::string_view arg1, std::string_view arg2) const {
    return encoder_->encode(arg1, arg2);
}

HeadOutputs MultiTaskModel::forward(const Matrix& embeddings, Mode mode, Rng* dropout_rng, ForwardCache* cache) const {
    if (embeddings.cols() != encoder_->width()) {
        throw ShapeError("embedding width " + std::to_string(embeddings.cols()) + " does not match encoder width " +
                         std::to_string(encoder_->width()));
    }
    Matrix trunk = affine(embeddings, params_.trunk_weight(), params_.trunk_bias());
    Matrix mask(trunk.rows(), trunk.cols(), 1.0);
    const double p = config_.dropout_rate;
    if (mode == Mode::Train && p > 0.0) {
        if (!dropout_rng) throw Error("train-mode forward with dropout needs a random source");
        const double keep_scale = 1.0 / (1.0 - p);
        for (double& m : mask.data()) m = dropout_rng->unit() < p ? 0.0 : keep_scale;
    }
    Matrix dropped = trunk;
    for (std::size_t i = 0; i < dropped.data().size(); ++i) dropped.data()[i] *= mask.data()[i];

    HeadOutputs out;
    for (std::size_t h = 0; h < 3; ++h) out.scores[h] = affine(dropped, params_.head_weight(h), params_.head_bias(h));
    if (cache) {
        cache->input = embeddings;
        cache->trunk = std::move(trunk);
        cache->dropped = std::move(dropped);
        cache->mask = std::move(mask);
    }
    return out;
}

Parameters MultiTaskModel::backward(const ForwardCache& cache, const std::array<Matrix, 3>& score_grads) const {
    Parameters grads = params_.zeros_like();
    const std::size_t n = cache.input.rows();
    Matrix d_dropped(n, trunk_width_, 0.0);
    for (std::size_t h = 0; h < 3; ++h) {
        const Matrix& ds = score_grads[h];
        if (ds.rows() != n || ds.cols() != head_sizes_[h]) throw ShapeError("score gradient shape mismatch");
        Matrix& dw = grads.head_weight(h);
        Matrix& db = grads.head_bias(h);
        const Matrix& w = params_.head_weight(h);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < head_sizes_[h]; ++c) {
                const double g = ds(r, c);
                if (g == 0.0) continue;
                db(0, c) += g;
                for (std::size_t t = 0; t < trunk_width_; ++t) {
                    dw(c, t) += g * cache.dropped(r, t);
                    d_dropped(r, t) += g * w(c, t);
                }
            }
        }
    }
    Matrix& dw = grads.trunk_weight();
    Matrix& db = grads.trunk_bias();
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t t = 0; t < trunk_width_; ++t) {
            const double g = d_dropped(r, t) * cache.mask(r, t);
            if (g == 0.0) continue;
            db(0, t) += g;
            for (std::size_t i = 0; i < cache.input.cols(); ++i) dw(t, i) += g * cache.input(r, i);
        }
    }
    return grads;
}

std::vector<double> to_distribution(std::span<const double> scores) {
    if (scores.empty()) throw NumericError("cannot normalize an empty score vector");
    double max = scores[0];
    for (double s : scores) {
        if (!std::isfinite(s)) throw NumericError("non-finite score");
        max = std::max(max, s);
    }
    std::vector<double> out(scores.size());
    double total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i] = std::exp(scores[i] - max);
        total += out[i];
    }
    for (double& v : out) v /= total;
    return out;
}

LabelDistribution to_distribution(Level level, std::span<const double> scores) {
    return LabelDistribution{level, to_distribution(scores)};
}

Matrix to_distribution(const Matrix& scores) {
    Matrix out(scores.rows(), scores.cols());
    for (std::size_t r = 0; r < scores.rows(); ++r) {
        const auto p = to_distribution(scores.row(r));
        std::copy(p.begin(), p.end(), out.row(r).begin());
    }
    return out;
}

std::size_t pool_single_label(const LabelDistribution& dist) { return argmax_lowest(dist.values); }

// ---- checkpoints ----

namespace {

std::string format_parameters(const Parameters& params) {
    std::string out = "# idrr parameters v1\n";
    char buf[64];
    for (std::size_t k = 0; k < params.tensors.size(); ++k) {
        const Matrix& m = params.tensors[k];
        out += "tensor " + std::to_string(k) + " " + std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
        for (std::size_t r = 0; r < m.rows(); ++r) {
            for (std::size_t c = 0; c < m.cols(); ++c) {
                std::snprintf(buf, sizeof buf, "%a", m(r, c));
                if (c) out += ' ';
                out += buf;
            }
            out += '\n';
        }
    }
    return out;
}

Parameters parse_parameters(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != "# idrr parameters v1") throw SchemaError("params.txt: missing header");
    Parameters params;
    std::string word;
    while (is >> word) {
        std::size_t index = 0, rows = 0, cols = 0;
        if (word != "tensor" || !(is >> index >> rows >> cols) || index != params.tensors.size()) {
            throw SchemaError("params.txt: bad tensor header");
        }
        Matrix m(rows, cols);
        for (double& v : m.data()) {
            std::string token;
            if (!(is >> token)) throw SchemaError("params.txt: truncated tensor " + std::to_string(index));
            char* end = nullptr;
            v = std::strtod(token.c_str(), &end);
            if (end != token.c_str() + token.size()) throw SchemaError("params.txt: bad value '" + token + "'");
        }
        params.tensors.push_back(std::move(m));
    }
    return params;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw Error("cannot write '" + path.string() + "'");
}

}  // namespace

void save_checkpoint(const std::string& dir, const MultiTaskModel& model, const SenseHierarchy& hierarchy,
                     const std::string& run_config_text) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string params = format_parameters(model.parameters());
    const std::string schema = hierarchy.to_schema();
    write_file(fs::path(dir) / "params.txt", params);
    write_file(fs::path(dir) / "hierarchy.tsv", schema);
    write_file(fs::path(dir) / "run_config.conf", run_config_text);

    const ModelConfig& c = model.config();
    nlohmann::ordered_json j;
    j["format"] = "idrr-checkpoint-v1";
    j["encoder"] = {{"model_id", c.encoder.model_id},
                    {"max_tokens", c.encoder.max_tokens},
                    {"pooling", pooling_name(c.encoder.pooling)}};
    j["trunk_width"] = c.trunk_width;
    j["dropout_rate"] = c.dropout_rate;
    j["seed"] = c.seed;
    j["hierarchy_hash"] = sha256_hex(schema);
    j["run_config_hash"] = sha256_hex(run_config_text);
    j["params_hash"] = sha256_hex(params);
    write_file(fs::path(dir) / "model.json", j.dump(2) + "\n");
}

MultiTaskModel load_checkpoint(const std::string& dir, const SenseHierarchy& hierarchy, CheckpointInfo* info) {
    namespace fs = std::filesystem;
    const fs::path root(dir);
    if (!fs::is_directory(root)) throw DataError("checkpoint directory '" + dir + "' does not exist");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file((root / "model.json").string()));
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("checkpoint model.json: " + std::string(e.what()));
    }
    const std::string expected_hierarchy = sha256_hex(hierarchy.to_schema());
    if (j.value("hierarchy_hash", "") != expected_hierarchy) {
        throw DataError("checkpoint '" + dir + "' was trained with a different sense hierarchy (hash " +
                        j.value("hierarchy_hash", std::string("?")) + ", current " + expected_hierarchy + ")");
    }
    const std::string run_config = read_text_file((root / "run_config.conf").string());
    if (j.value("run_config_hash", "") != sha256_hex(run_config)) {
        throw DataError("checkpoint '" + dir + "': run_config.conf does not match its recorded hash");
    }
    const std::string params_text = read_text_file((root / "params.txt").string());
    if (j.value("params_hash", "") != sha256_hex(params_text)) {
        throw DataError("checkpoint '" + dir + "': params.txt does not match its recorded hash");
    }
    ModelConfig config;
    try {
        config.encoder.model_id = j.at("encoder").at("model_id");
        config.encoder.max_tokens = j.at("encoder").at("max_tokens");
        config.encoder.pooling = parse_pooling(j.at("encoder").at("pooling").get<std::string>());
        config.trunk_width = j.at("trunk_width");
        config.dropout_rate = j.at("dropout_rate");
        config.seed = j.at("seed");
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("checkpoint model.json: " + std::string(e.what()));
    }
    if (info) *info = {j.at("hierarchy_hash"), j.at("run_config_hash")};
    return MultiTaskModel(hierarchy, config, parse_parameters(params_text));
}

}  // namespace idrr
