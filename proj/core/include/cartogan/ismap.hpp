#ifndef CARTOGAN_ISMAP_HPP
#define CARTOGAN_ISMAP_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "cartogan/nets.hpp"
#include "cartogan/raster.hpp"

namespace cartogan::ismap {

struct ConfusionCounts {
    std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
    std::int64_t total() const { return tp + fp + fn + tn; }
};

struct EvalReport {
    ConfusionCounts counts;
    double precision = 0, recall = 0, accuracy = 0, f1 = 0;
    // Zero-denominator metrics report 0 with the matching flag cleared.
    bool precision_defined = true, recall_defined = true, accuracy_defined = true,
         f1_defined = true;

    std::string to_json() const;
    static EvalReport from_json(const std::string& text);
    // Aligned 4-row table, one column per labelled run.
    static std::string table(const std::vector<std::pair<std::string, EvalReport>>& columns);
};

// Precision, recall, accuracy and F1 from confusion counts.
EvalReport metrics(const ConfusionCounts& c);

// Synthesizes counts whose precision/recall equal the given rates to ~1e-9,
// so rate pairs can be pushed through metrics() directly.
ConfusionCounts counts_from_rates(double precision, double recall);

struct IsMapConfig {
    int epochs = 5;
    double lr = 2e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    std::uint64_t seed = 7;
    double holdout_fraction = 0.1;

    void validate() const;
};

using ProgressFn = std::function<void(int epoch, double loss, double holdout_accuracy)>;

class IsMapClassifier {
public:
    explicit IsMapClassifier(const IsMapConfig& cfg);

    // BCE training on map (label 1) vs non-map (label 0) images. All inputs
    // must share one tile size. Returns final held-out accuracy.
    double train(const std::vector<RasterTile>& maps, const std::vector<RasterTile>& non_maps,
                 const ProgressFn& progress = nullptr);

    // Sigmoid probability of "map"; label rule prob >= 0.5.
    double classify(const RasterTile& tile) const;
    bool is_map(const RasterTile& tile) const { return classify(tile) >= 0.5; }

    EvalReport evaluate(const std::vector<RasterTile>& positives,
                        const std::vector<RasterTile>& negatives) const;

    void save(const std::filesystem::path& base) const;
    static IsMapClassifier load(const std::filesystem::path& base);

    double holdout_accuracy() const { return holdout_accuracy_; }
    const IsMapConfig& config() const { return cfg_; }

private:
    IsMapConfig cfg_;
    gan::IsMapNet net_;
    gan::NamedParams params_;
    double holdout_accuracy_ = 0.0;
};

} // namespace cartogan::ismap

#endif
