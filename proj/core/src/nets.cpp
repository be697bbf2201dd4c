#include "cartogan/nets.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace cartogan::gan {

namespace {

FTensor gaussian_param(Shape s, float stddev, Rng& rng) {
    FTensor t = FTensor::zeros(s, true);
    for (auto& v : t.data()) v = float(rng.normal()) * stddev;
    return t;
}

int unet_depth_for(int image_size) {
    // bottleneck at 4x4: 64px -> 4 blocks, 128px -> 5, 256px -> 6
    int depth = 0;
    int s = image_size;
    while (s > 4) {
        s /= 2;
        ++depth;
    }
    return depth;
}

constexpr int kMaxChannels = 256;

} // namespace

ConvLayer ConvLayer::make(int c_in, int c_out, int k, int stride, int pad, Rng& rng) {
    ConvLayer l;
    l.w = gaussian_param({c_out, c_in, k, k}, 0.02f, rng);
    l.b = FTensor::zeros({1, c_out, 1, 1}, true);
    l.stride = stride;
    l.pad = pad;
    return l;
}

FTensor ConvLayer::operator()(Tape<float>& tape, const FTensor& x) const {
    return ag::conv2d(tape, x, w, b, stride, pad);
}

void ConvLayer::collect(NamedParams& out, const std::string& prefix) const {
    out.emplace_back(prefix + ".w", w);
    out.emplace_back(prefix + ".b", b);
}

ConvTLayer ConvTLayer::make(int c_in, int c_out, int k, int stride, int pad, Rng& rng) {
    ConvTLayer l;
    l.w = gaussian_param({c_in, c_out, k, k}, 0.02f, rng);
    l.b = FTensor::zeros({1, c_out, 1, 1}, true);
    l.stride = stride;
    l.pad = pad;
    return l;
}

FTensor ConvTLayer::operator()(Tape<float>& tape, const FTensor& x) const {
    return ag::conv2d_transpose(tape, x, w, b, stride, pad);
}

void ConvTLayer::collect(NamedParams& out, const std::string& prefix) const {
    out.emplace_back(prefix + ".w", w);
    out.emplace_back(prefix + ".b", b);
}

NormLayer NormLayer::make(int channels) {
    NormLayer l;
    l.gain = FTensor::full({1, channels, 1, 1}, 1.0f, true);
    l.bias = FTensor::zeros({1, channels, 1, 1}, true);
    return l;
}

FTensor NormLayer::operator()(Tape<float>& tape, const FTensor& x) const {
    return ag::instance_norm(tape, x, gain, bias);
}

void NormLayer::collect(NamedParams& out, const std::string& prefix) const {
    out.emplace_back(prefix + ".gain", gain);
    out.emplace_back(prefix + ".bias", bias);
}

GeneratorNet GeneratorNet::make(int image_size, int base, Rng& rng) {
    GeneratorNet g;
    g.image_size = image_size;
    g.depth = unet_depth_for(image_size);
    g.base = base;
    auto ch = [&](int level) { return std::min(base << level, kMaxChannels); };

    int c_in = 3;
    for (int i = 0; i < g.depth; ++i) {
        EncBlock b;
        b.conv = ConvLayer::make(c_in, ch(i), 4, 2, 1, rng);
        b.norm = NormLayer::make(ch(i));
        g.enc.push_back(std::move(b));
        c_in = ch(i);
    }
    for (int j = 0; j < g.depth; ++j) {
        DecBlock b;
        bool outermost = j == g.depth - 1;
        // input: bottleneck for j=0, else previous decoder output concat skip
        int in_c = j == 0 ? ch(g.depth - 1) : 2 * ch(g.depth - 1 - j);
        int out_c = outermost ? 3 : ch(g.depth - 2 - j);
        b.conv = ConvTLayer::make(in_c, out_c, 4, 2, 1, rng);
        if (!outermost) b.norm = NormLayer::make(out_c);
        b.dropout = j < 2 && !outermost;
        b.outermost = outermost;
        g.dec.push_back(std::move(b));
    }
    return g;
}

FTensor GeneratorNet::forward(Tape<float>& tape, const FTensor& x, bool training,
                              Rng& dropout_rng) const {
    if (x.shape().c != 3 || x.shape().h != image_size || x.shape().w != image_size)
        throw std::invalid_argument("generator: input must be (n,3," + std::to_string(image_size) +
                                    "," + std::to_string(image_size) + "), got " +
                                    x.shape().str());
    std::vector<FTensor> skips;
    FTensor h = x;
    for (const auto& blk : enc) {
        h = blk.conv(tape, h);
        h = blk.norm(tape, h);
        h = ag::leaky_relu(tape, h, 0.2f);
        skips.push_back(h);
    }
    FTensor d = h;
    for (int j = 0; j < depth; ++j) {
        const auto& blk = dec[j];
        d = blk.conv(tape, d);
        if (blk.outermost) return ag::tanh(tape, d);
        d = blk.norm(tape, d);
        d = ag::relu(tape, d);
        if (blk.dropout) d = ag::dropout(tape, d, 0.5, training, dropout_rng);
        d = ag::concat_channels(tape, d, skips[depth - 2 - j]);
    }
    return d; // unreachable
}

void GeneratorNet::collect(NamedParams& out, const std::string& prefix) const {
    for (std::size_t i = 0; i < enc.size(); ++i) {
        enc[i].conv.collect(out, prefix + ".enc" + std::to_string(i + 1) + ".conv");
        enc[i].norm.collect(out, prefix + ".enc" + std::to_string(i + 1) + ".norm");
    }
    for (std::size_t j = 0; j < dec.size(); ++j) {
        dec[j].conv.collect(out, prefix + ".dec" + std::to_string(j + 1) + ".conv");
        if (!dec[j].outermost)
            dec[j].norm.collect(out, prefix + ".dec" + std::to_string(j + 1) + ".norm");
    }
}

DiscriminatorNet DiscriminatorNet::make(int in_channels, int base, Rng& rng) {
    DiscriminatorNet d;
    d.in_channels = in_channels;
    d.base = base;
    int c_in = in_channels;
    for (int i = 0; i < 3; ++i) {
        int c_out = std::min(base << i, kMaxChannels);
        d.convs.push_back(ConvLayer::make(c_in, c_out, 4, 2, 1, rng));
        if (i > 0) d.norms.push_back(NormLayer::make(c_out));
        c_in = c_out;
    }
    d.head = ConvLayer::make(c_in, 1, 4, 1, 1, rng);
    return d;
}

FTensor DiscriminatorNet::forward(Tape<float>& tape, const FTensor& x) const {
    if (x.shape().c != in_channels)
        throw std::invalid_argument("discriminator: expected " + std::to_string(in_channels) +
                                    " channels, got " + std::to_string(x.shape().c));
    FTensor h = x;
    for (std::size_t i = 0; i < convs.size(); ++i) {
        h = convs[i](tape, h);
        if (i > 0) h = norms[i - 1](tape, h);
        h = ag::leaky_relu(tape, h, 0.2f);
    }
    return head(tape, h); // (n,1,h',w') patch logit grid
}

void DiscriminatorNet::collect(NamedParams& out, const std::string& prefix) const {
    for (std::size_t i = 0; i < convs.size(); ++i)
        convs[i].collect(out, prefix + ".b" + std::to_string(i + 1) + ".conv");
    for (std::size_t i = 0; i < norms.size(); ++i)
        norms[i].collect(out, prefix + ".b" + std::to_string(i + 2) + ".norm");
    head.collect(out, prefix + ".head");
}

IsMapNet IsMapNet::make(Rng& rng) {
    IsMapNet n;
    int channels[4] = {3, 16, 32, 64};
    for (int i = 0; i < 3; ++i)
        n.convs.push_back(ConvLayer::make(channels[i], channels[i + 1], 3, 1, 1, rng));
    n.fc = ConvLayer::make(64, 1, 1, 1, 0, rng);
    return n;
}

FTensor IsMapNet::forward(Tape<float>& tape, const FTensor& x) const {
    FTensor h = x;
    for (const auto& conv : convs) {
        h = conv(tape, h);
        h = ag::relu(tape, h);
        h = ag::max_pool2x2(tape, h);
    }
    h = ag::global_avg_pool(tape, h);
    return fc(tape, h); // (n,1,1,1) logit
}

void IsMapNet::collect(NamedParams& out, const std::string& prefix) const {
    for (std::size_t i = 0; i < convs.size(); ++i)
        convs[i].collect(out, prefix + ".conv" + std::to_string(i + 1));
    fc.collect(out, prefix + ".fc");
}

std::vector<FTensor> parameters(const NamedParams& named) {
    std::vector<FTensor> out;
    out.reserve(named.size());
    for (const auto& [name, t] : named) {
        (void)name;
        out.push_back(t);
    }
    return out;
}

void load_named(NamedParams& dst, const std::vector<std::pair<std::string, FTensor>>& src) {
    std::map<std::string, const FTensor*> lookup;
    for (const auto& [name, t] : src) lookup[name] = &t;
    for (auto& [name, t] : dst) {
        auto it = lookup.find(name);
        if (it == lookup.end())
            throw std::runtime_error("load_named: missing parameter '" + name + "'");
        if (!(it->second->shape() == t.shape()))
            throw std::runtime_error("load_named: shape mismatch for '" + name + "': " +
                                     it->second->shape().str() + " vs " + t.shape().str());
        t.data() = it->second->data();
    }
}

} // namespace cartogan::gan
