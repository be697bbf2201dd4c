#include "cartogan/ismap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "cartogan/adam.hpp"
#include "cartogan/image_tensor.hpp"
#include "cartogan/params_io.hpp"

namespace cartogan::ismap {

using gan::FTensor;
using gan::Tape;
using nlohmann::json;

EvalReport metrics(const ConfusionCounts& c) {
    if (c.tp < 0 || c.fp < 0 || c.fn < 0 || c.tn < 0)
        throw std::invalid_argument("metrics: negative confusion count");
    EvalReport r;
    r.counts = c;
    auto rate = [](std::int64_t num, std::int64_t den, double& out, bool& defined) {
        if (den == 0) {
            out = 0.0;
            defined = false;
        } else {
            out = double(num) / double(den);
            defined = true;
        }
    };
    rate(c.tp, c.tp + c.fp, r.precision, r.precision_defined);
    rate(c.tp, c.tp + c.fn, r.recall, r.recall_defined);
    rate(c.tp + c.tn, c.total(), r.accuracy, r.accuracy_defined);
    if (r.precision + r.recall > 0.0) {
        r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
        r.f1_defined = true;
    } else {
        r.f1 = 0.0;
        r.f1_defined = false;
    }
    return r;
}

ConfusionCounts counts_from_rates(double precision, double recall) {
    if (precision <= 0 || precision > 1 || recall <= 0 || recall > 1)
        throw std::invalid_argument("counts_from_rates: rates must be in (0, 1]");
    const double scale = 1e9;
    ConfusionCounts c;
    c.tp = std::int64_t(std::llround(precision * recall * scale));
    c.fp = std::int64_t(std::llround((1.0 - precision) * recall * scale));
    c.fn = std::int64_t(std::llround(precision * (1.0 - recall) * scale));
    c.tn = 0;
    return c;
}

std::string EvalReport::to_json() const {
    json j{{"counts",
            json{{"tp", counts.tp}, {"fp", counts.fp}, {"fn", counts.fn}, {"tn", counts.tn}}},
           {"precision", precision},
           {"recall", recall},
           {"accuracy", accuracy},
           {"f1", f1},
           {"undefined",
            json{{"precision", !precision_defined},
                 {"recall", !recall_defined},
                 {"accuracy", !accuracy_defined},
                 {"f1", !f1_defined}}}};
    return j.dump(2) + "\n";
}

EvalReport EvalReport::from_json(const std::string& text) {
    json j = json::parse(text);
    EvalReport r;
    r.counts.tp = j.at("counts").at("tp").get<std::int64_t>();
    r.counts.fp = j.at("counts").at("fp").get<std::int64_t>();
    r.counts.fn = j.at("counts").at("fn").get<std::int64_t>();
    r.counts.tn = j.at("counts").at("tn").get<std::int64_t>();
    r.precision = j.at("precision").get<double>();
    r.recall = j.at("recall").get<double>();
    r.accuracy = j.at("accuracy").get<double>();
    r.f1 = j.at("f1").get<double>();
    r.precision_defined = !j.at("undefined").at("precision").get<bool>();
    r.recall_defined = !j.at("undefined").at("recall").get<bool>();
    r.accuracy_defined = !j.at("undefined").at("accuracy").get<bool>();
    r.f1_defined = !j.at("undefined").at("f1").get<bool>();
    return r;
}

std::string EvalReport::table(const std::vector<std::pair<std::string, EvalReport>>& columns) {
    std::string out;
    char buf[64];
    auto row = [&](const char* name, auto get) {
        std::snprintf(buf, sizeof(buf), "%-10s", name);
        out += buf;
        for (const auto& [label, r] : columns) {
            (void)label;
            std::snprintf(buf, sizeof(buf), " %10.3f", get(r));
            out += buf;
        }
        out += '\n';
    };
    std::snprintf(buf, sizeof(buf), "%-10s", "Metric");
    out += buf;
    for (const auto& [label, r] : columns) {
        (void)r;
        std::snprintf(buf, sizeof(buf), " %10s", label.c_str());
        out += buf;
    }
    out += '\n';
    row("Precision", [](const EvalReport& r) { return r.precision; });
    row("Recall", [](const EvalReport& r) { return r.recall; });
    row("Accuracy", [](const EvalReport& r) { return r.accuracy; });
    row("F1-Score", [](const EvalReport& r) { return r.f1; });
    return out;
}

void IsMapConfig::validate() const {
    if (epochs <= 0) throw std::invalid_argument("ismap config: epochs must be positive");
    if (lr <= 0) throw std::invalid_argument("ismap config: lr must be positive");
    if (holdout_fraction < 0 || holdout_fraction >= 1)
        throw std::invalid_argument("ismap config: holdout fraction must be in [0, 1)");
}

IsMapClassifier::IsMapClassifier(const IsMapConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    Rng init = Rng::from_key(cfg_.seed, 0x15A9);
    net_ = gan::IsMapNet::make(init);
    net_.collect(params_, "ismap");
}

double IsMapClassifier::train(const std::vector<RasterTile>& maps,
                              const std::vector<RasterTile>& non_maps,
                              const ProgressFn& progress) {
    if (maps.empty() || non_maps.empty())
        throw std::invalid_argument("ismap: both classes must be non-empty");
    int size = maps.front().width;
    auto check = [&](const RasterTile& t) {
        if (t.width != size || t.height != size)
            throw std::invalid_argument("ismap: all inputs must share one tile size");
    };

    std::vector<std::pair<FTensor, float>> items;
    items.reserve(maps.size() + non_maps.size());
    for (const auto& t : maps) {
        check(t);
        items.push_back({tile_to_tensor(t), 1.0f});
    }
    for (const auto& t : non_maps) {
        check(t);
        items.push_back({tile_to_tensor(t), 0.0f});
    }

    Rng split_rng = Rng::from_key(cfg_.seed, 0x5917);
    std::vector<std::size_t> order(items.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    split_rng.shuffle(order);
    std::size_t holdout = std::size_t(double(items.size()) * cfg_.holdout_fraction);
    std::vector<std::size_t> eval_idx(order.begin(), order.begin() + holdout);
    std::vector<std::size_t> train_idx(order.begin() + holdout, order.end());
    if (train_idx.empty()) throw std::invalid_argument("ismap: holdout leaves no training data");

    ag::AdamConfig ac{cfg_.lr, cfg_.beta1, cfg_.beta2, 1e-8};
    ag::AdamState<float> opt(gan::parameters(params_), ac);
    Rng epoch_rng = Rng::from_key(cfg_.seed, 0xE90C);

    auto holdout_acc = [&]() {
        if (eval_idx.empty()) return 1.0;
        std::int64_t correct = 0;
        for (auto i : eval_idx) {
            Tape<float> t;
            float logit = net_.forward(t, items[i].first).scalar();
            bool map = logit >= 0.0f; // sigmoid(logit) >= 0.5
            if (map == (items[i].second > 0.5f)) ++correct;
        }
        return double(correct) / double(eval_idx.size());
    };

    for (int e = 1; e <= cfg_.epochs; ++e) {
        std::vector<std::size_t> idx = train_idx;
        epoch_rng.shuffle(idx);
        double loss_acc = 0;
        for (auto i : idx) {
            opt.zero_grads();
            Tape<float> tape;
            FTensor logit = net_.forward(tape, items[i].first);
            FTensor target = FTensor::full({1, 1, 1, 1}, items[i].second);
            FTensor loss = ag::bce_with_logits(tape, logit, target);
            tape.backward(loss);
            opt.step();
            loss_acc += double(loss.scalar());
        }
        holdout_accuracy_ = holdout_acc();
        if (progress) progress(e, loss_acc / double(idx.size()), holdout_accuracy_);
    }
    return holdout_accuracy_;
}

double IsMapClassifier::classify(const RasterTile& tile) const {
    Tape<float> tape;
    float logit = net_.forward(tape, tile_to_tensor(tile)).scalar();
    return double(ag::detail::sigmoid_val(logit));
}

EvalReport IsMapClassifier::evaluate(const std::vector<RasterTile>& positives,
                                     const std::vector<RasterTile>& negatives) const {
    if (positives.empty() || negatives.empty())
        throw std::invalid_argument("ismap evaluate: both sets must be non-empty");
    ConfusionCounts c;
    for (const auto& t : positives)
        (is_map(t) ? c.tp : c.fn)++;
    for (const auto& t : negatives)
        (is_map(t) ? c.fp : c.tn)++;
    return metrics(c);
}

void IsMapClassifier::save(const std::filesystem::path& base) const {
    auto blob_path = base;
    blob_path += ".cgt";
    ag::save_blob(blob_path, params_);
    json j{{"version", 1},
           {"kind", "ismap"},
           {"holdout_accuracy", holdout_accuracy_},
           {"config",
            json{{"epochs", cfg_.epochs},
                 {"lr", cfg_.lr},
                 {"beta1", cfg_.beta1},
                 {"beta2", cfg_.beta2},
                 {"seed", cfg_.seed},
                 {"holdout_fraction", cfg_.holdout_fraction}}}};
    auto json_path = base;
    json_path += ".json";
    std::ofstream out(json_path);
    if (!out) throw std::runtime_error("ismap: cannot write " + json_path.string());
    out << j.dump(2) << "\n";
}

IsMapClassifier IsMapClassifier::load(const std::filesystem::path& base) {
    auto json_path = base;
    json_path += ".json";
    std::ifstream in(json_path);
    if (!in) throw std::runtime_error("ismap: cannot open " + json_path.string());
    json j;
    in >> j;
    if (j.at("kind").get<std::string>() != "ismap")
        throw std::runtime_error("ismap: not an ismap checkpoint");
    IsMapConfig cfg;
    cfg.epochs = j.at("config").at("epochs").get<int>();
    cfg.lr = j.at("config").at("lr").get<double>();
    cfg.beta1 = j.at("config").at("beta1").get<double>();
    cfg.beta2 = j.at("config").at("beta2").get<double>();
    cfg.seed = j.at("config").at("seed").get<std::uint64_t>();
    cfg.holdout_fraction = j.at("config").at("holdout_fraction").get<double>();
    IsMapClassifier c(cfg);
    auto blob_path = base;
    blob_path += ".cgt";
    gan::load_named(c.params_, ag::load_blob(blob_path));
    c.holdout_accuracy_ = j.at("holdout_accuracy").get<double>();
    return c;
}

} // namespace cartogan::ismap
