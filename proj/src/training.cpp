#include "idrr/training.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "idrr/errors.hpp"
#include "idrr/losses.hpp"
#include "idrr/random.hpp"
#include "idrr/schedule.hpp"

namespace idrr {

Adam::Adam(const Parameters& shape_like) : m_(shape_like.zeros_like()), v_(shape_like.zeros_like()) {}

void Adam::step(Parameters& params, const Parameters& grads, double lr) {
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    for (std::size_t k = 0; k < params.tensors.size(); ++k) {
        auto& p = params.tensors[k].data();
        const auto& g = grads.tensors[k].data();
        auto& m = m_.tensors[k].data();
        auto& v = v_.tensors[k].data();
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g[i];
            v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g[i] * g[i];
            p[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + kEpsilon);
        }
    }
}

Matrix embed_pairs(const MultiTaskModel& model, const std::vector<std::pair<std::string, std::string>>& pairs) {
    Matrix out(pairs.size(), model.input_width());
    for (std::size_t r = 0; r < pairs.size(); ++r) {
        const auto e = model.embed(pairs[r].first, pairs[r].second);
        std::copy(e.begin(), e.end(), out.row(r).begin());
    }
    return out;
}

Matrix embed_instances(const MultiTaskModel& model, const std::vector<RelationInstance>& instances) {
    std::vector<std::pair<std::string, std::string>> pairs;
    pairs.reserve(instances.size());
    for (const auto& inst : instances) pairs.emplace_back(inst.arg1, inst.arg2);
    return embed_pairs(model, pairs);
}

std::vector<PredictionRecord> predict(const MultiTaskModel& model, const Matrix& embeddings,
                                      const std::vector<std::string>& ids) {
    if (ids.size() != embeddings.rows()) throw ShapeError("id count does not match embedding rows");
    const HeadOutputs out = model.forward(embeddings, Mode::Eval);
    std::vector<PredictionRecord> records(ids.size());
    for (std::size_t r = 0; r < ids.size(); ++r) {
        records[r].id = ids[r];
        for (std::size_t l = 0; l < 3; ++l) {
            records[r].dist.push_back(to_distribution(kLevels[l], out.scores[l].row(r)));
            records[r].label.push_back(pool_single_label(records[r].dist.back()));
        }
    }
    return records;
}

std::vector<PredictionRecord> predict(const MultiTaskModel& model, const std::vector<RelationInstance>& instances) {
    std::vector<std::string> ids;
    for (const auto& inst : instances) ids.push_back(inst.id);
    return predict(model, embed_instances(model, instances), ids);
}

std::array<Matrix, 3> target_matrices(const std::vector<RelationInstance>& instances,
                                      const std::vector<std::size_t>& rows, LabelSetting setting,
                                      const SenseHierarchy& hierarchy) {
    std::array<Matrix, 3> out;
    for (std::size_t l = 0; l < 3; ++l) {
        out[l] = Matrix(rows.size(), hierarchy.size(kLevels[l]), 0.0);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const RelationInstance& inst = instances.at(rows[r]);
            if (setting == LabelSetting::Single) {
                out[l](r, inst.majority[l]) = 1.0;
            } else {
                std::copy(inst.dist[l].values.begin(), inst.dist[l].values.end(), out[l].row(r).begin());
            }
        }
    }
    return out;
}

namespace {

Matrix gather_rows(const Matrix& m, const std::vector<std::size_t>& rows) {
    Matrix out(rows.size(), m.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto src = m.row(rows[r]);
        std::copy(src.begin(), src.end(), out.row(r).begin());
    }
    return out;
}

void clip_gradients(Parameters& grads, double max_norm) {
    double sq = 0.0;
    for (const auto& t : grads.tensors) {
        for (double g : t.data()) sq += g * g;
    }
    const double norm = std::sqrt(sq);
    if (norm <= max_norm || norm == 0.0) return;
    const double scale = max_norm / norm;
    for (auto& t : grads.tensors) {
        for (double& g : t.data()) g *= scale;
    }
}

}  // namespace

TrainResult train(const ExperimentConfig& config, std::uint64_t seed, const SenseHierarchy& hierarchy,
                  const std::vector<RelationInstance>& train_set, const std::vector<RelationInstance>& validation_set,
                  const LogSink& log) {
    if (train_set.empty()) throw TrainingError("training split is empty");
    ModelConfig model_config = config.model;
    model_config.seed = seed;
    MultiTaskModel model(hierarchy, model_config);
    const Schedule schedule = make_schedule(config.schedule, config.base_lr, config.epochs, config.schedule_options);

    const Matrix train_embeddings = embed_instances(model, train_set);
    Matrix validation_embeddings;
    std::vector<std::string> validation_ids;
    if (!validation_set.empty()) {
        validation_embeddings = embed_instances(model, validation_set);
        for (const auto& inst : validation_set) validation_ids.push_back(inst.id);
    }

    Rng shuffle_rng(mix_seed(seed, 1));
    Rng dropout_rng(mix_seed(seed, 2));
    Adam adam(model.parameters());
    TrainingLog training_log;

    const std::size_t n = train_set.size();
    const std::size_t steps_per_epoch = (n + config.batch_size - 1) / config.batch_size;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const auto started = std::chrono::steady_clock::now();
        shuffle_rng.shuffle(order);
        double loss_sum = 0.0;
        for (std::size_t step = 0; step < steps_per_epoch; ++step) {
            const std::size_t begin = step * config.batch_size;
            const std::size_t end = std::min(n, begin + config.batch_size);
            const std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                                order.begin() + static_cast<std::ptrdiff_t>(end));
            const Matrix batch = gather_rows(train_embeddings, rows);
            const auto targets = target_matrices(train_set, rows, config.label_setting, hierarchy);

            ForwardCache cache;
            const HeadOutputs out = model.forward(batch, Mode::Train, &dropout_rng, &cache);
            std::array<Matrix, 3> score_grads;
            std::array<double, 3> head_values{};
            for (std::size_t h = 0; h < 3; ++h) {
                LossValue lv = head_loss(config.loss, out.scores[h], targets[h]);
                head_values[h] = lv.value;
                score_grads[h] = std::move(lv.grad);
            }
            double total = 0.0;
            try {
                total = total_loss(head_values[0], head_values[1], head_values[2]);
            } catch (const NumericError&) {
                throw TrainingError("non-finite loss at epoch " + std::to_string(epoch + 1) + ", batch " +
                                    std::to_string(step + 1) + " (first instance '" + train_set[rows[0]].id + "')");
            }
            loss_sum += total;

            Parameters grads = model.backward(cache, score_grads);
            if (config.max_grad_norm > 0.0) clip_gradients(grads, config.max_grad_norm);
            const double t = static_cast<double>(epoch) + static_cast<double>(step) / static_cast<double>(steps_per_epoch);
            const double lr = schedule(t);
            training_log.step_epoch.push_back(t);
            training_log.lr_trace.push_back(lr);
            adam.step(model.parameters(), grads, lr);
        }

        EpochRecord record;
        record.epoch = epoch + 1;
        record.train_loss = loss_sum / static_cast<double>(steps_per_epoch);
        if (!validation_set.empty()) {
            const auto preds = predict(model, validation_embeddings, validation_ids);
            const EvaluationReport report = evaluate_distributions(preds, validation_set, hierarchy);
            std::array<double, 3> js{}, f1{};
            for (std::size_t l = 0; l < 3; ++l) {
                js[l] = *report.levels[l].js_mean;
                f1[l] = report.levels[l].f1_weighted;
            }
            record.validation_js = js;
            record.validation_f1 = f1;
        }
        record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        if (log) {
            char buf[256];
            if (record.validation_js) {
                std::snprintf(buf, sizeof buf,
                              "seed %llu epoch %d loss %.6f val JS %.4f/%.4f/%.4f val F1 %.2f/%.2f/%.2f (%.2fs)",
                              static_cast<unsigned long long>(seed), record.epoch, record.train_loss,
                              (*record.validation_js)[0], (*record.validation_js)[1], (*record.validation_js)[2],
                              (*record.validation_f1)[0], (*record.validation_f1)[1], (*record.validation_f1)[2],
                              record.seconds);
            } else {
                std::snprintf(buf, sizeof buf, "seed %llu epoch %d loss %.6f (%.2fs)",
                              static_cast<unsigned long long>(seed), record.epoch, record.train_loss, record.seconds);
            }
            log(buf);
        }
        training_log.epochs.push_back(record);
    }
    return TrainResult{std::move(model), std::move(training_log)};
}

Aggregate aggregate(const std::vector<double>& values) {
    Aggregate a;
    if (values.empty()) return a;
    double sum = 0.0;
    for (double v : values) sum += v;
    a.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double sq = 0.0;
        for (double v : values) sq += (v - a.mean) * (v - a.mean);
        a.std = std::sqrt(sq / static_cast<double>(values.size() - 1));
        a.std_defined = true;
    }
    return a;
}

AggregatedResults run_seeds(const ExperimentConfig& config, const SenseHierarchy& hierarchy,
                            const std::vector<RelationInstance>& train_set,
                            const std::vector<RelationInstance>& validation_set,
                            const std::vector<RelationInstance>& test_set,
                            const std::function<void(const SeedRun&, const MultiTaskModel&)>& on_run,
                            const LogSink& log) {
    if (config.seeds.empty()) throw ConfigError("at least one seed is required");
    AggregatedResults results;
    for (std::uint64_t seed : config.seeds) {
        try {
            TrainResult trained = train(config, seed, hierarchy, train_set, validation_set, log);
            SeedRun run;
            run.seed = seed;
            run.log = std::move(trained.log);
            run.test_predictions = predict(trained.model, test_set);
            run.test_report = evaluate_distributions(run.test_predictions, test_set, hierarchy);
            if (on_run) on_run(run, trained.model);
            results.runs.push_back(std::move(run));
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw TrainingError("run with seed " + std::to_string(seed) + " failed: " + e.what());
        }
    }
    for (std::size_t l = 0; l < 3; ++l) {
        std::vector<double> js, f1;
        for (const auto& run : results.runs) {
            js.push_back(*run.test_report.levels[l].js_mean);
            f1.push_back(run.test_report.levels[l].f1_weighted);
        }
        results.js[l] = aggregate(js);
        results.f1[l] = aggregate(f1);
    }
    return results;
}

}  // namespace idrr
