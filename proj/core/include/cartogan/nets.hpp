#ifndef CARTOGAN_NETS_HPP
#define CARTOGAN_NETS_HPP

#include <string>
#include <vector>

#include "cartogan/ops.hpp"
#include "cartogan/rng.hpp"
#include "cartogan/tensor.hpp"

namespace cartogan::gan {

using ag::Shape;
using ag::Tape;
using FTensor = ag::Tensor<float>;
using NamedParams = std::vector<std::pair<std::string, FTensor>>;

struct ConvLayer {
    FTensor w, b;
    int stride = 1, pad = 0;

    static ConvLayer make(int c_in, int c_out, int k, int stride, int pad, Rng& rng);
    FTensor operator()(Tape<float>& tape, const FTensor& x) const;
    void collect(NamedParams& out, const std::string& prefix) const;
};

struct ConvTLayer {
    FTensor w, b; // (c_in, c_out, k, k)
    int stride = 1, pad = 0;

    static ConvTLayer make(int c_in, int c_out, int k, int stride, int pad, Rng& rng);
    FTensor operator()(Tape<float>& tape, const FTensor& x) const;
    void collect(NamedParams& out, const std::string& prefix) const;
};

struct NormLayer {
    FTensor gain, bias;

    static NormLayer make(int channels);
    FTensor operator()(Tape<float>& tape, const FTensor& x) const;
    void collect(NamedParams& out, const std::string& prefix) const;
};

// Encoder-decoder with skip connections. depth downsampling blocks
// (conv k4 s2 p1 -> instance norm -> leaky relu 0.2), symmetric upsampling
// blocks (convT k4 s2 p1 -> instance norm -> relu), skip concat between
// mirror levels, final convT -> tanh. Dropout p=0.5 after the two deepest
// decoder blocks is the noise source; active only in training mode.
struct GeneratorNet {
    int image_size = 64;
    int depth = 4;
    int base = 32;
    struct EncBlock {
        ConvLayer conv;
        NormLayer norm;
    };
    struct DecBlock {
        ConvTLayer conv;
        NormLayer norm; // unused on the outermost block
        bool dropout = false;
        bool outermost = false;
    };
    std::vector<EncBlock> enc;
    std::vector<DecBlock> dec;

    static GeneratorNet make(int image_size, int base, Rng& rng);
    FTensor forward(Tape<float>& tape, const FTensor& x, bool training, Rng& dropout_rng) const;
    void collect(NamedParams& out, const std::string& prefix) const;
};

// Patch discriminator: three conv k4 s2 p1 blocks (leaky relu 0.2, instance
// norm after the first), then conv k4 s1 p1 down to a 1-channel logit grid.
struct DiscriminatorNet {
    int in_channels = 6;
    int base = 32;
    std::vector<ConvLayer> convs;
    std::vector<NormLayer> norms; // for blocks 2..
    ConvLayer head;

    static DiscriminatorNet make(int in_channels, int base, Rng& rng);
    FTensor forward(Tape<float>& tape, const FTensor& x) const;
    void collect(NamedParams& out, const std::string& prefix) const;
};

// Compact map/non-map classifier: 3x (conv k3 s1 p1 -> relu -> max pool),
// channels 3->16->32->64, global average pool, linear to one logit.
struct IsMapNet {
    std::vector<ConvLayer> convs;
    ConvLayer fc; // 1x1 conv on the pooled (n,64,1,1) features

    static IsMapNet make(Rng& rng);
    FTensor forward(Tape<float>& tape, const FTensor& x) const;
    void collect(NamedParams& out, const std::string& prefix) const;
};

// Gathers every parameter as a flat list for the optimizer (collect order).
std::vector<FTensor> parameters(const NamedParams& named);

// Loads values into an existing parameter set by name; throws on missing
// or shape-mismatched entries.
void load_named(NamedParams& dst, const std::vector<std::pair<std::string, FTensor>>& src);

} // namespace cartogan::gan

#endif
