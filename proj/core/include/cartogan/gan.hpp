#ifndef CARTOGAN_GAN_HPP
#define CARTOGAN_GAN_HPP

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cartogan/adam.hpp"
#include "cartogan/nets.hpp"
#include "cartogan/raster.hpp"

namespace cartogan::gan {

struct TrainConfig {
    std::string kind = "pix2pix"; // pix2pix | cyclegan
    int epochs = 200;
    double lr = 2e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    int batch_size = 1;
    float lambda_l1 = 100.0f;  // pix2pix reconstruction weight
    float lambda_cyc = 10.0f;  // cycle consistency weight
    std::uint64_t seed = 1;
    int checkpoint_interval = 0; // epochs between checkpoints, 0 = final only
    int image_size = 64;
    int gen_base = 32;
    int disc_base = 32;

    void validate() const;
};

struct EpochLoss {
    int epoch = 0;
    double g = 0.0;
    double d = 0.0;
    double cyc = 0.0; // 0 for pix2pix
};

using GenFn = std::function<FTensor(Tape<float>&, const FTensor&)>;

// Conditional discriminator loss on a detached fake:
// 0.5 * (bce(D(x ++ y_real), 1) + bce(D(x ++ y_fake), 0)).
FTensor pix2pix_d_loss(Tape<float>& tape, const DiscriminatorNet& d, const FTensor& x,
                       const FTensor& y_real, const FTensor& y_fake);

// bce(D(x ++ G(x)), 1) + lambda * mean|y_real - G(x)|. G runs inside so the
// dropout noise source is live; the produced fake is returned through
// fake_out when requested.
FTensor pix2pix_g_loss(Tape<float>& tape, const DiscriminatorNet& d, const GenFn& g,
                       const FTensor& x, const FTensor& y_real, float lambda_l1,
                       FTensor* fake_out = nullptr);

struct CycleLossOut {
    FTensor g_total; // adv(G) + adv(F) + lambda * cycle
    FTensor d_x;     // discriminator loss for domain X
    FTensor d_y;
    FTensor cycle;   // mean|F(G(x))-x| + mean|G(F(y))-y|
    FTensor fake_x;  // F(y), connected to tape_g
    FTensor fake_y;  // G(x)
};

// Generator-side terms are built on tape_g, discriminator terms on tape_d
// (with detached fakes), so each backward pass replays only its own ops.
CycleLossOut cyclegan_losses(Tape<float>& tape_g, Tape<float>& tape_d, const GenFn& g,
                             const GenFn& f, const DiscriminatorNet& d_x,
                             const DiscriminatorNet& d_y, const FTensor& x, const FTensor& y,
                             float lambda_cyc);

// Progress hook: called once per finished epoch.
using ProgressFn = std::function<void(const EpochLoss&)>;

class Pix2PixTrainer {
public:
    explicit Pix2PixTrainer(const TrainConfig& cfg);

    // Exactly-paired (simple, target) tiles, already normalized to [-1,1].
    void set_pairs(std::vector<std::pair<FTensor, FTensor>> pairs);

    EpochLoss run_epoch();
    void train(int epochs, const ProgressFn& progress = nullptr);

    void save(const std::filesystem::path& base) const; // writes base.cgt + base.json
    static Pix2PixTrainer load(const std::filesystem::path& base);

    const TrainConfig& config() const { return cfg_; }
    const GeneratorNet& generator() const { return g_; }
    const DiscriminatorNet& discriminator() const { return d_; }
    const std::vector<EpochLoss>& history() const { return history_; }
    int epoch() const { return epoch_; }

    // Mean L1 between G(x) and y over the configured pairs, dropout off.
    double eval_l1() const;

private:
    void step(const FTensor& x, const FTensor& y, double& g_acc, double& d_acc);

    TrainConfig cfg_;
    GeneratorNet g_;
    DiscriminatorNet d_;
    NamedParams g_params_, d_params_;
    ag::AdamState<float> opt_g_, opt_d_;
    Rng shuffle_rng_, dropout_rng_;
    std::vector<std::pair<FTensor, FTensor>> pairs_;
    std::vector<EpochLoss> history_;
    int epoch_ = 0;
};

class CycleGanTrainer {
public:
    explicit CycleGanTrainer(const TrainConfig& cfg);

    // Unpaired tile sets; an epoch is one pass over xs with ys sampled
    // uniformly with replacement.
    void set_data(std::vector<FTensor> xs, std::vector<FTensor> ys);

    EpochLoss run_epoch();
    void train(int epochs, const ProgressFn& progress = nullptr);

    void save(const std::filesystem::path& base) const;
    static CycleGanTrainer load(const std::filesystem::path& base);

    const TrainConfig& config() const { return cfg_; }
    const GeneratorNet& generator_xy() const { return g_; }
    const GeneratorNet& generator_yx() const { return f_; }
    const std::vector<EpochLoss>& history() const { return history_; }
    int epoch() const { return epoch_; }

    // Mean cycle-consistency value (both directions) over the data.
    double eval_cycle() const;

private:
    TrainConfig cfg_;
    GeneratorNet g_, f_;
    DiscriminatorNet dx_, dy_;
    NamedParams g_params_, d_params_;
    ag::AdamState<float> opt_g_, opt_d_;
    Rng shuffle_rng_, sample_rng_;
    std::vector<FTensor> xs_, ys_;
    std::vector<EpochLoss> history_;
    int epoch_ = 0;
};

// Loads the generator (pix2pix: G, cyclegan: the X->Y generator) from a
// checkpoint written by either trainer.
struct LoadedGenerator {
    TrainConfig cfg;
    GeneratorNet net;
};
LoadedGenerator load_generator(const std::filesystem::path& base);

// G applied per tile, dropout off; deterministic bytes.
RasterTile apply_generator(const GeneratorNet& g, const RasterTile& input);

// CSV "epoch,loss_g,loss_d[,loss_cyc]".
void write_loss_csv(const std::filesystem::path& path, const std::string& kind,
                    const std::vector<EpochLoss>& history);

// Canonical hash of a config (used to bind checkpoints to their settings).
std::string config_hash(const TrainConfig& cfg);

} // namespace cartogan::gan

#endif
