#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "gradcheck.hpp"
#include "idrr/delimited.hpp"
#include "idrr/encoder.hpp"
#include "idrr/errors.hpp"
#include "idrr/model.hpp"
#include "idrr/training.hpp"
#include "support.hpp"

using namespace idrr;

namespace {

const SenseHierarchy& H() { return SenseHierarchy::standard(); }

ModelConfig small_config(double dropout = 0.1) {
    ModelConfig c;
    c.encoder.model_id = "hash-encoder-16";
    c.encoder.max_tokens = 32;
    c.trunk_width = 8;
    c.dropout_rate = dropout;
    c.seed = 3;
    return c;
}

Matrix batch_embeddings(const MultiTaskModel& model, std::size_t n) {
    std::vector<std::pair<std::string, std::string>> pairs;
    for (std::size_t i = 0; i < n; ++i) pairs.emplace_back("The sky darkened " + std::to_string(i), "It rained.");
    return embed_pairs(model, pairs);
}

}  // namespace

TEST_CASE("tokenizer and pair input") {
    CHECK(tokenize("The sky, darkened.") == std::vector<std::string>{"the", "sky", ",", "darkened", "."});
    const auto in = make_pair_input("a b", "c", 16);
    CHECK(in.tokens == std::vector<std::string>{"[CLS]", "a", "b", "[SEP]", "c", "[SEP]"});
    CHECK(in.segments == std::vector<int>{0, 0, 0, 0, 1, 1});
    CHECK_THROWS_AS(make_pair_input("", "c", 16), InputError);
    CHECK_THROWS_AS(make_pair_input("a", "c", 8), ConfigError);
}

TEST_CASE("encoder contract") {
    EncoderSpec spec;
    spec.model_id = "hash-encoder-32";
    const auto enc = make_encoder(spec);
    const auto v = enc->encode("The sky darkened.", "It rained.");
    CHECK(v.size() == 32);
    CHECK(enc->encode("The sky darkened.", "It rained.") == v);
    CHECK(enc->encode("It rained.", "The sky darkened.") != v);

    std::string long_text;
    for (int i = 0; i < 10000; ++i) long_text += "word" + std::to_string(i % 97) + " ";
    const auto in = make_pair_input(long_text, "short tail", spec.max_tokens);
    CHECK(in.tokens.size() <= spec.max_tokens);
    CHECK(in.tokens.size() == spec.max_tokens);
    CHECK(enc->encode(long_text, "short tail").size() == 32);

    spec.pooling = Pooling::Mean;
    CHECK(make_encoder(spec)->encode("The sky darkened.", "It rained.") != v);
    spec.model_id = "roberta-base";
    CHECK_THROWS_AS(make_encoder(spec), ProviderError);
}

TEST_CASE("forward shapes") {
    const MultiTaskModel model(H(), small_config());
    SUBCASE("batch of 16") {
        const auto out = model.forward(batch_embeddings(model, 16), Mode::Eval);
        for (const auto& s : out.scores) CHECK(s.rows() == 16);
    }
    SUBCASE("batch of 1") {
        const auto out = model.forward(batch_embeddings(model, 1), Mode::Eval);
        CHECK(out.at(Level::One).cols() == 4);
        CHECK(out.at(Level::Two).cols() == 14);
        CHECK(out.at(Level::Three).cols() == H().size(Level::Three));
    }
    SUBCASE("eval twice is identical") {
        const Matrix x = batch_embeddings(model, 5);
        CHECK(model.forward(x, Mode::Eval).scores == model.forward(x, Mode::Eval).scores);
    }
    SUBCASE("train mode applies dropout") {
        const Matrix x = batch_embeddings(model, 5);
        Rng rng(1);
        CHECK(model.forward(x, Mode::Train, &rng).scores != model.forward(x, Mode::Eval).scores);
        CHECK_THROWS_AS(model.forward(x, Mode::Train), Error);
    }
    SUBCASE("wrong embedding width") {
        CHECK_THROWS_AS(model.forward(Matrix(2, 7), Mode::Eval), ShapeError);
    }
}

TEST_CASE("dropout 0: train and eval forward agree") {
    const MultiTaskModel model(H(), small_config(0.0));
    const Matrix x = batch_embeddings(model, 6);
    Rng rng(4);
    const auto a = model.forward(x, Mode::Train, &rng);
    const auto b = model.forward(x, Mode::Eval);
    for (std::size_t h = 0; h < 3; ++h)
        for (std::size_t i = 0; i < a.scores[h].data().size(); ++i)
            CHECK(std::abs(a.scores[h].data()[i] - b.scores[h].data()[i]) <= 1e-6);
}

TEST_CASE("to_distribution") {
    CHECK(to_distribution(std::vector<double>{0, 0, 0, 0}) == std::vector<double>{0.25, 0.25, 0.25, 0.25});
    const auto d = to_distribution(std::vector<double>{1, 0});
    CHECK(std::round(d[0] * 1e4) / 1e4 == doctest::Approx(0.7311));
    CHECK(std::round(d[1] * 1e4) / 1e4 == doctest::Approx(0.2689));
    const std::vector<double> s{3.2, 1.1, 0.5};
    CHECK(argmax_lowest(to_distribution(s)) == argmax_lowest(s));
    CHECK_THROWS_AS(to_distribution(std::vector<double>{1, INFINITY}), NumericError);
}

TEST_CASE("property: softmax shift invariance and pooling equals argmax") {
    Rng rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng.below(20);
        std::vector<double> s(n), shifted(n);
        const double c = 50.0 * (rng.unit() - 0.5);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = 4.0 * rng.normal();
            shifted[i] = s[i] + c;
        }
        const auto a = to_distribution(s);
        const auto b = to_distribution(shifted);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-9);
        std::size_t brute = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (s[i] > s[brute]) brute = i;
        CHECK(pool_single_label(LabelDistribution{Level::Two, a}) == brute);
    }
    CHECK(pool_single_label(LabelDistribution{Level::One, {0.1, 0.7, 0.2}}) == 1);
    CHECK(pool_single_label(LabelDistribution{Level::One, {0.25, 0.25, 0.25, 0.25}}) == 0);
}

TEST_CASE("backward matches finite differences for every loss") {
    Rng rng(21);
    for (LossKind kind : {LossKind::CrossEntropy, LossKind::Mae, LossKind::Mse, LossKind::Huber}) {
        CAPTURE(loss_name(kind));
        MultiTaskModel model(H(), small_config(0.0));
        // Larger weights so the heads are far from uniform.
        for (auto& t : model.parameters().tensors)
            for (double& v : t.data()) v += 0.3 * rng.normal();
        const Matrix x = batch_embeddings(model, 3);
        std::array<Matrix, 3> targets;
        for (std::size_t h = 0; h < 3; ++h) targets[h] = testing::random_targets(rng, 3, model.head_size(h));
        CHECK(testing::model_fd_error(kind, model, x, targets) <= 1e-4);
    }
}

TEST_CASE("checkpoint round trip and hash verification") {
    namespace fs = std::filesystem;
    const fs::path dir = testing::scratch_dir("ckpt");
    const MultiTaskModel model(H(), small_config());
    save_checkpoint((dir / "c").string(), model, H(), "loss = mae\n");
    CheckpointInfo info;
    const MultiTaskModel loaded = load_checkpoint((dir / "c").string(), H(), &info);
    CHECK(loaded.parameters() == model.parameters());
    CHECK(loaded.config() == model.config());
    CHECK(info.hierarchy_hash.size() == 64);

    SUBCASE("different hierarchy is refused") {
        const auto other = SenseHierarchy::from_level3_names({"Reason"});
        CHECK_THROWS_AS(load_checkpoint((dir / "c").string(), other), DataError);
    }
    SUBCASE("tampered parameters are detected") {
        std::ofstream(dir / "c" / "params.txt", std::ios::app) << "0x1p+0\n";
        CHECK_THROWS_AS(load_checkpoint((dir / "c").string(), H()), DataError);
    }
    SUBCASE("tampered run config is detected") {
        std::ofstream(dir / "c" / "run_config.conf", std::ios::app) << "lr = 1\n";
        CHECK_THROWS_AS(load_checkpoint((dir / "c").string(), H()), DataError);
    }
    fs::remove_all(dir);
}

TEST_CASE("adopting parameters of the wrong shape") {
    const MultiTaskModel model(H(), small_config());
    Parameters p = model.parameters();
    p.head_weight(1) = Matrix(13, 8);
    CHECK_THROWS_AS(MultiTaskModel(H(), small_config(), p), ShapeError);
}
