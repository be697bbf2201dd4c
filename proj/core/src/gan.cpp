#include "cartogan/gan.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "cartogan/hash.hpp"
#include "cartogan/image_tensor.hpp"
#include "cartogan/params_io.hpp"

namespace cartogan::gan {

using nlohmann::json;

namespace {

constexpr std::uint64_t kTagInit = 0x100;
constexpr std::uint64_t kTagShuffle = 0x101;
constexpr std::uint64_t kTagDropout = 0x102;
constexpr std::uint64_t kTagSample = 0x103;

FTensor full_like(const FTensor& ref, float v) {
    return FTensor::full(ref.shape(), v, false);
}

json config_to_json(const TrainConfig& c) {
    return json{{"kind", c.kind},
                {"epochs", c.epochs},
                {"lr", c.lr},
                {"beta1", c.beta1},
                {"beta2", c.beta2},
                {"batch_size", c.batch_size},
                {"lambda_l1", c.lambda_l1},
                {"lambda_cyc", c.lambda_cyc},
                {"seed", c.seed},
                {"checkpoint_interval", c.checkpoint_interval},
                {"image_size", c.image_size},
                {"gen_base", c.gen_base},
                {"disc_base", c.disc_base}};
}

TrainConfig config_from_json(const json& j) {
    TrainConfig c;
    c.kind = j.at("kind").get<std::string>();
    c.epochs = j.at("epochs").get<int>();
    c.lr = j.at("lr").get<double>();
    c.beta1 = j.at("beta1").get<double>();
    c.beta2 = j.at("beta2").get<double>();
    c.batch_size = j.at("batch_size").get<int>();
    c.lambda_l1 = j.at("lambda_l1").get<float>();
    c.lambda_cyc = j.at("lambda_cyc").get<float>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.checkpoint_interval = j.at("checkpoint_interval").get<int>();
    c.image_size = j.at("image_size").get<int>();
    c.gen_base = j.at("gen_base").get<int>();
    c.disc_base = j.at("disc_base").get<int>();
    return c;
}

json history_to_json(const std::vector<EpochLoss>& h) {
    json arr = json::array();
    for (const auto& e : h)
        arr.push_back(json{{"epoch", e.epoch}, {"g", e.g}, {"d", e.d}, {"cyc", e.cyc}});
    return arr;
}

std::vector<EpochLoss> history_from_json(const json& arr) {
    std::vector<EpochLoss> h;
    for (const auto& e : arr)
        h.push_back({e.at("epoch").get<int>(), e.at("g").get<double>(), e.at("d").get<double>(),
                     e.at("cyc").get<double>()});
    return h;
}

// Moments are persisted next to their parameters as <name>.m1/.m2 records.
void append_moments(std::vector<ag::NamedTensor>& blob, const NamedParams& params,
                    ag::AdamState<float>& opt) {
    for (std::size_t i = 0; i < params.size(); ++i) {
        blob.emplace_back(params[i].first + ".m1",
                          FTensor::from_data(params[i].second.shape(), opt.moment1(i)));
        blob.emplace_back(params[i].first + ".m2",
                          FTensor::from_data(params[i].second.shape(), opt.moment2(i)));
    }
}

void restore_moments(const std::vector<ag::NamedTensor>& blob, const NamedParams& params,
                     ag::AdamState<float>& opt) {
    std::map<std::string, const FTensor*> lookup;
    for (const auto& [name, t] : blob) lookup[name] = &t;
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto m1 = lookup.find(params[i].first + ".m1");
        auto m2 = lookup.find(params[i].first + ".m2");
        if (m1 == lookup.end() || m2 == lookup.end())
            throw std::runtime_error("checkpoint: missing optimizer state for " + params[i].first);
        opt.moment1(i) = m1->second->data();
        opt.moment2(i) = m2->second->data();
    }
}

json load_sidecar(const std::filesystem::path& base) {
    auto path = base;
    path += ".json";
    std::ifstream in(path);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path.string());
    json j;
    in >> j;
    return j;
}

} // namespace

void TrainConfig::validate() const {
    if (kind != "pix2pix" && kind != "cyclegan")
        throw std::invalid_argument("train config: kind must be pix2pix or cyclegan");
    if (epochs <= 0) throw std::invalid_argument("train config: epochs must be positive");
    if (lr <= 0) throw std::invalid_argument("train config: lr must be positive");
    if (lambda_l1 < 0 || lambda_cyc < 0)
        throw std::invalid_argument("train config: loss weights must be non-negative");
    if (batch_size != 1) throw std::invalid_argument("train config: only batch size 1 is supported");
    if (!is_valid_tile_size(image_size))
        throw std::invalid_argument("train config: image size must be 64, 128 or 256");
    if (gen_base < 4 || disc_base < 4)
        throw std::invalid_argument("train config: base channel counts must be >= 4");
    if (checkpoint_interval < 0)
        throw std::invalid_argument("train config: checkpoint interval must be >= 0");
}

std::string config_hash(const TrainConfig& cfg) { return sha256_hex(config_to_json(cfg).dump()); }

FTensor pix2pix_d_loss(Tape<float>& tape, const DiscriminatorNet& d, const FTensor& x,
                       const FTensor& y_real, const FTensor& y_fake) {
    FTensor real_logits = d.forward(tape, ag::concat_channels(tape, x, y_real));
    FTensor fake_logits = d.forward(tape, ag::concat_channels(tape, x, y_fake));
    FTensor loss_real = ag::bce_with_logits(tape, real_logits, full_like(real_logits, 1.0f));
    FTensor loss_fake = ag::bce_with_logits(tape, fake_logits, full_like(fake_logits, 0.0f));
    return ag::scale(tape, ag::add(tape, loss_real, loss_fake), 0.5f);
}

FTensor pix2pix_g_loss(Tape<float>& tape, const DiscriminatorNet& d, const GenFn& g,
                       const FTensor& x, const FTensor& y_real, float lambda_l1,
                       FTensor* fake_out) {
    FTensor fake = g(tape, x);
    if (fake_out) *fake_out = fake;
    FTensor logits = d.forward(tape, ag::concat_channels(tape, x, fake));
    FTensor adv = ag::bce_with_logits(tape, logits, full_like(logits, 1.0f));
    FTensor rec = ag::l1_loss(tape, y_real, fake);
    return ag::add(tape, adv, ag::scale(tape, rec, lambda_l1));
}

CycleLossOut cyclegan_losses(Tape<float>& tape_g, Tape<float>& tape_d, const GenFn& g,
                             const GenFn& f, const DiscriminatorNet& d_x,
                             const DiscriminatorNet& d_y, const FTensor& x, const FTensor& y,
                             float lambda_cyc) {
    CycleLossOut out;
    out.fake_y = g(tape_g, x);
    out.fake_x = f(tape_g, y);
    FTensor rec_x = f(tape_g, out.fake_y);
    FTensor rec_y = g(tape_g, out.fake_x);

    FTensor logits_gy = d_y.forward(tape_g, out.fake_y);
    FTensor logits_fx = d_x.forward(tape_g, out.fake_x);
    FTensor adv_g = ag::bce_with_logits(tape_g, logits_gy, full_like(logits_gy, 1.0f));
    FTensor adv_f = ag::bce_with_logits(tape_g, logits_fx, full_like(logits_fx, 1.0f));
    out.cycle = ag::add(tape_g, ag::l1_loss(tape_g, rec_x, x), ag::l1_loss(tape_g, rec_y, y));
    out.g_total = ag::add(tape_g, ag::add(tape_g, adv_g, adv_f),
                          ag::scale(tape_g, out.cycle, lambda_cyc));

    auto disc_loss = [&](const DiscriminatorNet& d, const FTensor& real, const FTensor& fake) {
        FTensor lr = d.forward(tape_d, real);
        FTensor lf = d.forward(tape_d, ag::detach(fake));
        FTensor a = ag::bce_with_logits(tape_d, lr, full_like(lr, 1.0f));
        FTensor b = ag::bce_with_logits(tape_d, lf, full_like(lf, 0.0f));
        return ag::scale(tape_d, ag::add(tape_d, a, b), 0.5f);
    };
    out.d_y = disc_loss(d_y, y, out.fake_y);
    out.d_x = disc_loss(d_x, x, out.fake_x);
    return out;
}

// ---------------------------------------------------------------------------
// Pix2Pix trainer

Pix2PixTrainer::Pix2PixTrainer(const TrainConfig& cfg)
    : cfg_(cfg), shuffle_rng_(0), dropout_rng_(0) {
    cfg_.validate();
    if (cfg_.kind != "pix2pix") throw std::invalid_argument("Pix2PixTrainer: kind mismatch");
    Rng init = Rng::from_key(cfg_.seed, kTagInit);
    g_ = GeneratorNet::make(cfg_.image_size, cfg_.gen_base, init);
    d_ = DiscriminatorNet::make(6, cfg_.disc_base, init);
    g_.collect(g_params_, "G");
    d_.collect(d_params_, "D");
    ag::AdamConfig ac{cfg_.lr, cfg_.beta1, cfg_.beta2, 1e-8};
    opt_g_ = ag::AdamState<float>(parameters(g_params_), ac);
    opt_d_ = ag::AdamState<float>(parameters(d_params_), ac);
    shuffle_rng_ = Rng::from_key(cfg_.seed, kTagShuffle);
    dropout_rng_ = Rng::from_key(cfg_.seed, kTagDropout);
}

void Pix2PixTrainer::set_pairs(std::vector<std::pair<FTensor, FTensor>> pairs) {
    if (pairs.empty()) throw std::invalid_argument("pix2pix: empty dataset");
    for (const auto& [x, y] : pairs) {
        if (x.shape().h != cfg_.image_size || !(x.shape() == y.shape()))
            throw std::invalid_argument("pix2pix: tile shape mismatch with config");
    }
    pairs_ = std::move(pairs);
}

void Pix2PixTrainer::step(const FTensor& x, const FTensor& y, double& g_acc, double& d_acc) {
    opt_g_.zero_grads();
    opt_d_.zero_grads();
    Tape<float> tg, td;
    GenFn gen = [this](Tape<float>& t, const FTensor& in) {
        return g_.forward(t, in, true, dropout_rng_);
    };
    FTensor fake;
    FTensor g_loss = pix2pix_g_loss(tg, d_, gen, x, y, cfg_.lambda_l1, &fake);
    FTensor d_loss = pix2pix_d_loss(td, d_, x, y, ag::detach(fake));
    // Both gradients come from the same forward state; the adversarial
    // pollution of D's grads is discarded before D's own backward.
    tg.backward(g_loss);
    opt_d_.zero_grads();
    td.backward(d_loss);
    opt_d_.step();
    opt_g_.step();
    g_acc += double(g_loss.scalar());
    d_acc += double(d_loss.scalar());
}

EpochLoss Pix2PixTrainer::run_epoch() {
    if (pairs_.empty()) throw std::logic_error("pix2pix: set_pairs before training");
    std::vector<std::size_t> order(pairs_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffle_rng_.shuffle(order);
    double g_acc = 0, d_acc = 0;
    for (std::size_t i : order) step(pairs_[i].first, pairs_[i].second, g_acc, d_acc);
    ++epoch_;
    EpochLoss e{epoch_, g_acc / double(pairs_.size()), d_acc / double(pairs_.size()), 0.0};
    history_.push_back(e);
    return e;
}

void Pix2PixTrainer::train(int epochs, const ProgressFn& progress) {
    for (int i = 0; i < epochs; ++i) {
        EpochLoss e = run_epoch();
        if (!std::isfinite(e.g) || !std::isfinite(e.d))
            throw std::runtime_error("pix2pix: non-finite loss at epoch " + std::to_string(e.epoch));
        if (progress) progress(e);
    }
}

double Pix2PixTrainer::eval_l1() const {
    double acc = 0;
    Rng unused(0);
    for (const auto& [x, y] : pairs_) {
        Tape<float> t;
        FTensor fake = g_.forward(t, x, false, unused);
        acc += double(ag::l1_loss(t, fake, y).scalar());
    }
    return acc / double(pairs_.size());
}

void Pix2PixTrainer::save(const std::filesystem::path& base) const {
    std::vector<ag::NamedTensor> blob(g_params_.begin(), g_params_.end());
    blob.insert(blob.end(), d_params_.begin(), d_params_.end());
    append_moments(blob, g_params_, const_cast<ag::AdamState<float>&>(opt_g_));
    append_moments(blob, d_params_, const_cast<ag::AdamState<float>&>(opt_d_));
    auto blob_path = base;
    blob_path += ".cgt";
    ag::save_blob(blob_path, blob);

    json j{{"version", 1},
           {"kind", cfg_.kind},
           {"epoch", epoch_},
           {"config", config_to_json(cfg_)},
           {"config_hash", config_hash(cfg_)},
           {"rng", json{{"shuffle", shuffle_rng_.state()}, {"dropout", dropout_rng_.state()}}},
           {"adam_t", json{{"g", opt_g_.step_count()}, {"d", opt_d_.step_count()}}},
           {"loss_history", history_to_json(history_)}};
    auto json_path = base;
    json_path += ".json";
    std::ofstream out(json_path);
    if (!out) throw std::runtime_error("checkpoint: cannot write " + json_path.string());
    out << j.dump(2) << "\n";
}

Pix2PixTrainer Pix2PixTrainer::load(const std::filesystem::path& base) {
    json j = load_sidecar(base);
    if (j.at("kind").get<std::string>() != "pix2pix")
        throw std::runtime_error("checkpoint: not a pix2pix checkpoint");
    Pix2PixTrainer t(config_from_json(j.at("config")));
    auto blob_path = base;
    blob_path += ".cgt";
    auto blob = ag::load_blob(blob_path);
    load_named(t.g_params_, blob);
    load_named(t.d_params_, blob);
    restore_moments(blob, t.g_params_, t.opt_g_);
    restore_moments(blob, t.d_params_, t.opt_d_);
    t.opt_g_.set_step_count(j.at("adam_t").at("g").get<long long>());
    t.opt_d_.set_step_count(j.at("adam_t").at("d").get<long long>());
    t.shuffle_rng_.set_state(j.at("rng").at("shuffle").get<std::uint64_t>());
    t.dropout_rng_.set_state(j.at("rng").at("dropout").get<std::uint64_t>());
    t.epoch_ = j.at("epoch").get<int>();
    t.history_ = history_from_json(j.at("loss_history"));
    return t;
}

// ---------------------------------------------------------------------------
// CycleGAN trainer

CycleGanTrainer::CycleGanTrainer(const TrainConfig& cfg)
    : cfg_(cfg), shuffle_rng_(0), sample_rng_(0) {
    cfg_.validate();
    if (cfg_.kind != "cyclegan") throw std::invalid_argument("CycleGanTrainer: kind mismatch");
    Rng init = Rng::from_key(cfg_.seed, kTagInit);
    g_ = GeneratorNet::make(cfg_.image_size, cfg_.gen_base, init);
    f_ = GeneratorNet::make(cfg_.image_size, cfg_.gen_base, init);
    dx_ = DiscriminatorNet::make(3, cfg_.disc_base, init);
    dy_ = DiscriminatorNet::make(3, cfg_.disc_base, init);
    g_.collect(g_params_, "G");
    f_.collect(g_params_, "F");
    dx_.collect(d_params_, "DX");
    dy_.collect(d_params_, "DY");
    ag::AdamConfig ac{cfg_.lr, cfg_.beta1, cfg_.beta2, 1e-8};
    opt_g_ = ag::AdamState<float>(parameters(g_params_), ac);
    opt_d_ = ag::AdamState<float>(parameters(d_params_), ac);
    shuffle_rng_ = Rng::from_key(cfg_.seed, kTagShuffle);
    sample_rng_ = Rng::from_key(cfg_.seed, kTagSample);
}

void CycleGanTrainer::set_data(std::vector<FTensor> xs, std::vector<FTensor> ys) {
    if (xs.empty() || ys.empty()) throw std::invalid_argument("cyclegan: empty dataset");
    for (const auto& t : xs)
        if (t.shape().h != cfg_.image_size)
            throw std::invalid_argument("cyclegan: tile shape mismatch with config");
    xs_ = std::move(xs);
    ys_ = std::move(ys);
}

EpochLoss CycleGanTrainer::run_epoch() {
    if (xs_.empty()) throw std::logic_error("cyclegan: set_data before training");
    std::vector<std::size_t> order(xs_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffle_rng_.shuffle(order);
    double g_acc = 0, d_acc = 0, c_acc = 0;
    // Dropout stays off for the cycle pair: reconstruction must not chase a
    // noise source. (The paired model keeps it as its z.)
    Rng unused(0);
    GenFn gfn = [this, &unused](Tape<float>& t, const FTensor& in) {
        return g_.forward(t, in, false, unused);
    };
    GenFn ffn = [this, &unused](Tape<float>& t, const FTensor& in) {
        return f_.forward(t, in, false, unused);
    };
    for (std::size_t i : order) {
        const FTensor& x = xs_[i];
        const FTensor& y = ys_[sample_rng_.next_below(ys_.size())];
        opt_g_.zero_grads();
        opt_d_.zero_grads();
        Tape<float> tg, td;
        CycleLossOut L = cyclegan_losses(tg, td, gfn, ffn, dx_, dy_, x, y, cfg_.lambda_cyc);
        FTensor d_total = ag::add(td, L.d_x, L.d_y);
        tg.backward(L.g_total);
        opt_d_.zero_grads();
        td.backward(d_total);
        opt_d_.step();
        opt_g_.step();
        g_acc += double(L.g_total.scalar());
        d_acc += 0.5 * (double(L.d_x.scalar()) + double(L.d_y.scalar()));
        c_acc += double(L.cycle.scalar());
    }
    ++epoch_;
    double n = double(xs_.size());
    EpochLoss e{epoch_, g_acc / n, d_acc / n, c_acc / n};
    history_.push_back(e);
    return e;
}

void CycleGanTrainer::train(int epochs, const ProgressFn& progress) {
    for (int i = 0; i < epochs; ++i) {
        EpochLoss e = run_epoch();
        if (!std::isfinite(e.g) || !std::isfinite(e.d) || !std::isfinite(e.cyc))
            throw std::runtime_error("cyclegan: non-finite loss at epoch " + std::to_string(e.epoch));
        if (progress) progress(e);
    }
}

double CycleGanTrainer::eval_cycle() const {
    Rng unused(0);
    double acc = 0;
    std::size_t n = std::min(xs_.size(), ys_.size());
    for (std::size_t i = 0; i < n; ++i) {
        Tape<float> t;
        FTensor ry = f_.forward(t, g_.forward(t, xs_[i], false, unused), false, unused);
        FTensor rx = g_.forward(t, f_.forward(t, ys_[i], false, unused), false, unused);
        acc += double(ag::l1_loss(t, ry, xs_[i]).scalar()) +
               double(ag::l1_loss(t, rx, ys_[i]).scalar());
    }
    return acc / double(n);
}

void CycleGanTrainer::save(const std::filesystem::path& base) const {
    std::vector<ag::NamedTensor> blob(g_params_.begin(), g_params_.end());
    blob.insert(blob.end(), d_params_.begin(), d_params_.end());
    append_moments(blob, g_params_, const_cast<ag::AdamState<float>&>(opt_g_));
    append_moments(blob, d_params_, const_cast<ag::AdamState<float>&>(opt_d_));
    auto blob_path = base;
    blob_path += ".cgt";
    ag::save_blob(blob_path, blob);

    json j{{"version", 1},
           {"kind", cfg_.kind},
           {"epoch", epoch_},
           {"config", config_to_json(cfg_)},
           {"config_hash", config_hash(cfg_)},
           {"rng", json{{"shuffle", shuffle_rng_.state()}, {"sample", sample_rng_.state()}}},
           {"adam_t", json{{"g", opt_g_.step_count()}, {"d", opt_d_.step_count()}}},
           {"loss_history", history_to_json(history_)}};
    auto json_path = base;
    json_path += ".json";
    std::ofstream out(json_path);
    if (!out) throw std::runtime_error("checkpoint: cannot write " + json_path.string());
    out << j.dump(2) << "\n";
}

CycleGanTrainer CycleGanTrainer::load(const std::filesystem::path& base) {
    json j = load_sidecar(base);
    if (j.at("kind").get<std::string>() != "cyclegan")
        throw std::runtime_error("checkpoint: not a cyclegan checkpoint");
    CycleGanTrainer t(config_from_json(j.at("config")));
    auto blob_path = base;
    blob_path += ".cgt";
    auto blob = ag::load_blob(blob_path);
    load_named(t.g_params_, blob);
    load_named(t.d_params_, blob);
    restore_moments(blob, t.g_params_, t.opt_g_);
    restore_moments(blob, t.d_params_, t.opt_d_);
    t.opt_g_.set_step_count(j.at("adam_t").at("g").get<long long>());
    t.opt_d_.set_step_count(j.at("adam_t").at("d").get<long long>());
    t.shuffle_rng_.set_state(j.at("rng").at("shuffle").get<std::uint64_t>());
    t.sample_rng_.set_state(j.at("rng").at("sample").get<std::uint64_t>());
    t.epoch_ = j.at("epoch").get<int>();
    t.history_ = history_from_json(j.at("loss_history"));
    return t;
}

LoadedGenerator load_generator(const std::filesystem::path& base) {
    json j = load_sidecar(base);
    TrainConfig cfg = config_from_json(j.at("config"));
    Rng throwaway(0);
    LoadedGenerator out{cfg, GeneratorNet::make(cfg.image_size, cfg.gen_base, throwaway)};
    NamedParams params;
    out.net.collect(params, "G");
    auto blob_path = base;
    blob_path += ".cgt";
    load_named(params, ag::load_blob(blob_path));
    return out;
}

RasterTile apply_generator(const GeneratorNet& g, const RasterTile& input) {
    if (input.width != g.image_size || input.height != g.image_size)
        throw std::invalid_argument("apply_generator: tile is " + std::to_string(input.width) +
                                    "px but checkpoint expects " + std::to_string(g.image_size) +
                                    "px");
    Tape<float> tape;
    Rng unused(0);
    FTensor out = g.forward(tape, tile_to_tensor(input), false, unused);
    return tensor_to_tile(out);
}

void write_loss_csv(const std::filesystem::path& path, const std::string& kind,
                    const std::vector<EpochLoss>& history) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_loss_csv: cannot open " + path.string());
    bool cyc = kind == "cyclegan";
    out << (cyc ? "epoch,loss_g,loss_d,loss_cyc\n" : "epoch,loss_g,loss_d\n");
    char buf[128];
    for (const auto& e : history) {
        if (cyc)
            std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%.6f\n", e.epoch, e.g, e.d, e.cyc);
        else
            std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f\n", e.epoch, e.g, e.d);
        out << buf;
    }
}

} // namespace cartogan::gan
