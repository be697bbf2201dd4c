#ifndef CARTOGAN_OPS_HPP
#define CARTOGAN_OPS_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cartogan/gemm.hpp"
#include "cartogan/rng.hpp"
#include "cartogan/tensor.hpp"

// Reverse-mode ops over dense NCHW tensors: exactly the operator set the
// generator/discriminator/classifier architectures need. Cross-correlation
// convention throughout (no kernel flip); all loss reductions are means.
namespace cartogan::ag {

namespace detail {

template <typename T>
inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

template <typename T>
inline void same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
    if (!(a.shape() == b.shape()))
        throw std::invalid_argument(std::string(op) + ": shape mismatch " + a.shape().str() +
                                    " vs " + b.shape().str());
}

template <typename T>
inline Tensor<T> make_out(Shape s, bool requires_grad) {
    Tensor<T> t = Tensor<T>::zeros(s, requires_grad);
    return t;
}

// Valid output-column range so the matching input column stays in [0, limit).
inline void col_range(int pad, int kj, int stride, int limit, int out_limit, int& lo, int& hi) {
    lo = pad - kj > 0 ? (pad - kj + stride - 1) / stride : 0;
    int num = limit - 1 - kj + pad;
    hi = num < 0 ? -1 : std::min(out_limit - 1, num / stride);
}

// (channels, height, width) image -> (channels*k*k, out_h*out_w) patch
// matrix under the cross-correlation indexing, zero padded.
template <typename T>
void im2col(const T* img, int channels, int height, int width, int k, int stride, int pad,
            int out_h, int out_w, T* col) {
    const std::size_t m = std::size_t(out_h) * out_w;
    std::size_t r = 0;
    for (int c = 0; c < channels; ++c) {
        const T* src = img + std::size_t(c) * height * width;
        for (int ki = 0; ki < k; ++ki)
            for (int kj = 0; kj < k; ++kj, ++r) {
                T* dst = col + r * m;
                int lo, hi;
                col_range(pad, kj, stride, width, out_w, lo, hi);
                for (int y = 0; y < out_h; ++y) {
                    int iy = y * stride - pad + ki;
                    T* drow = dst + std::size_t(y) * out_w;
                    if (iy < 0 || iy >= height || hi < lo) {
                        std::fill(drow, drow + out_w, T(0));
                        continue;
                    }
                    const T* srow = src + std::size_t(iy) * width;
                    std::fill(drow, drow + lo, T(0));
                    int ix = lo * stride - pad + kj;
                    if (stride == 1)
                        std::copy(srow + ix, srow + ix + (hi - lo + 1), drow + lo);
                    else
                        for (int x = lo; x <= hi; ++x, ix += stride) drow[x] = srow[ix];
                    std::fill(drow + hi + 1, drow + out_w, T(0));
                }
            }
    }
}

// Scatter-add inverse of im2col.
template <typename T>
void col2im_add(const T* col, int channels, int height, int width, int k, int stride, int pad,
                int out_h, int out_w, T* img) {
    const std::size_t m = std::size_t(out_h) * out_w;
    std::size_t r = 0;
    for (int c = 0; c < channels; ++c) {
        T* dst = img + std::size_t(c) * height * width;
        for (int ki = 0; ki < k; ++ki)
            for (int kj = 0; kj < k; ++kj, ++r) {
                const T* src = col + r * m;
                int lo, hi;
                col_range(pad, kj, stride, width, out_w, lo, hi);
                if (hi < lo) continue;
                for (int y = 0; y < out_h; ++y) {
                    int iy = y * stride - pad + ki;
                    if (iy < 0 || iy >= height) continue;
                    const T* srow = src + std::size_t(y) * out_w;
                    T* drow = dst + std::size_t(iy) * width;
                    int ix = lo * stride - pad + kj;
                    for (int x = lo; x <= hi; ++x, ix += stride) drow[ix] += srow[x];
                }
            }
    }
}

} // namespace detail

template <typename T>
Tensor<T> conv2d(Tape<T>& tape, const Tensor<T>& in, const Tensor<T>& weight,
                 const Tensor<T>& bias, int stride, int pad) {
    const Shape is = in.shape(), ws = weight.shape();
    if (ws.h != ws.w) throw std::invalid_argument("conv2d: kernel must be square");
    if (is.c != ws.c)
        throw std::invalid_argument("conv2d: input channels " + std::to_string(is.c) +
                                    " != weight channels " + std::to_string(ws.c));
    if (!(bias.shape() == Shape{1, ws.n, 1, 1}))
        throw std::invalid_argument("conv2d: bias shape must be (1,c_out,1,1)");
    if (stride < 1 || pad < 0) throw std::invalid_argument("conv2d: bad stride/pad");
    const int k = ws.h, co = ws.n, ci = ws.c;
    const int oh = (is.h + 2 * pad - k) / stride + 1;
    const int ow = (is.w + 2 * pad - k) / stride + 1;
    if (is.h + 2 * pad < k || is.w + 2 * pad < k)
        throw std::invalid_argument("conv2d: kernel larger than padded input");

    bool rg = in.requires_grad() || weight.requires_grad() || bias.requires_grad();
    Tensor<T> out = detail::make_out<T>({is.n, co, oh, ow}, rg);

    const int kk = ci * k * k;        // patch rows
    const std::size_t m = std::size_t(oh) * ow;
    const std::size_t in_plane = std::size_t(is.h) * is.w;

    {
        const T* ip = in.data().data();
        const T* wp = weight.data().data();
        const T* bp = bias.data().data();
        T* op = out.data().data();
        std::vector<T> col(std::size_t(kk) * m);
        for (int n = 0; n < is.n; ++n) {
            detail::im2col(ip + std::size_t(n) * ci * in_plane, ci, is.h, is.w, k, stride, pad, oh,
                           ow, col.data());
            T* out_n = op + std::size_t(n) * co * m;
            for (int c = 0; c < co; ++c) std::fill(out_n + c * m, out_n + (c + 1) * m, bp[c]);
            detail::gemm(false, false, co, int(m), kk, T(1), wp, kk, col.data(), int(m), T(1),
                         out_n, int(m));
        }
    }

    if (rg) {
        const int sh = is.h, sw = is.w, sn = is.n;
        tape.record(out, [=]() mutable {
            const T* go = out.node()->grad.data();
            const T* ipv = in.data().data();
            const T* wpv = weight.data().data();
            std::vector<T> col;
            if (weight.requires_grad()) col.resize(std::size_t(kk) * m);
            std::vector<T> colg;
            if (in.requires_grad()) colg.resize(std::size_t(kk) * m);
            for (int n = 0; n < sn; ++n) {
                const T* go_n = go + std::size_t(n) * co * m;
                if (bias.requires_grad()) {
                    T* gb = bias.grad().data();
                    for (int c = 0; c < co; ++c) {
                        T acc = 0;
                        for (std::size_t i = 0; i < m; ++i) acc += go_n[c * m + i];
                        gb[c] += acc;
                    }
                }
                if (weight.requires_grad()) {
                    detail::im2col(ipv + std::size_t(n) * ci * in_plane, ci, sh, sw, k, stride,
                                   pad, oh, ow, col.data());
                    detail::gemm(false, true, co, kk, int(m), T(1), go_n, int(m), col.data(),
                                 int(m), T(1), weight.grad().data(), kk);
                }
                if (in.requires_grad()) {
                    detail::gemm(true, false, kk, int(m), co, T(1), wpv, kk, go_n, int(m), T(0),
                                 colg.data(), int(m));
                    detail::col2im_add(colg.data(), ci, sh, sw, k, stride, pad, oh, ow,
                                       in.grad().data() + std::size_t(n) * ci * in_plane);
                }
            }
        });
    }
    return out;
}

// Transposed convolution; weight layout (c_in, c_out, k, k) so that the
// same weight tensor satisfies <conv2d(x,W), y> == <x, conv2d_transpose(y,W)>.
template <typename T>
Tensor<T> conv2d_transpose(Tape<T>& tape, const Tensor<T>& in, const Tensor<T>& weight,
                           const Tensor<T>& bias, int stride, int pad) {
    const Shape is = in.shape(), ws = weight.shape();
    if (ws.h != ws.w) throw std::invalid_argument("conv2d_transpose: kernel must be square");
    if (is.c != ws.n)
        throw std::invalid_argument("conv2d_transpose: input channels " + std::to_string(is.c) +
                                    " != weight dim0 " + std::to_string(ws.n));
    const int k = ws.h, ci = ws.n, co = ws.c;
    if (!(bias.shape() == Shape{1, co, 1, 1}))
        throw std::invalid_argument("conv2d_transpose: bias shape must be (1,c_out,1,1)");
    if (stride < 1 || pad < 0) throw std::invalid_argument("conv2d_transpose: bad stride/pad");
    const int oh = (is.h - 1) * stride - 2 * pad + k;
    const int ow = (is.w - 1) * stride - 2 * pad + k;
    if (oh < 1 || ow < 1) throw std::invalid_argument("conv2d_transpose: empty output");

    bool rg = in.requires_grad() || weight.requires_grad() || bias.requires_grad();
    Tensor<T> out = detail::make_out<T>({is.n, co, oh, ow}, rg);

    const int kk = co * k * k;                          // patch rows over the *output* image
    const std::size_t m2 = std::size_t(is.h) * is.w;    // input spatial size
    const std::size_t out_plane = std::size_t(oh) * ow;

    {
        const T* ip = in.data().data();
        const T* wp = weight.data().data();
        const T* bp = bias.data().data();
        T* op = out.data().data();
        std::vector<T> col(std::size_t(kk) * m2);
        for (int n = 0; n < is.n; ++n) {
            // col (co*k*k, h*w) = W^T (co*k*k, ci) * in_n (ci, h*w)
            detail::gemm(true, false, kk, int(m2), ci, T(1), wp, kk,
                         ip + std::size_t(n) * ci * m2, int(m2), T(0), col.data(), int(m2));
            T* out_n = op + std::size_t(n) * co * out_plane;
            for (int c = 0; c < co; ++c)
                std::fill(out_n + c * out_plane, out_n + (c + 1) * out_plane, bp[c]);
            detail::col2im_add(col.data(), co, oh, ow, k, stride, pad, is.h, is.w, out_n);
        }
    }

    if (rg) {
        const int sh = is.h, sw = is.w, sn = is.n;
        tape.record(out, [=]() mutable {
            const T* go = out.node()->grad.data();
            const T* ipv = in.data().data();
            const T* wpv = weight.data().data();
            std::vector<T> colg(std::size_t(kk) * m2);
            for (int n = 0; n < sn; ++n) {
                const T* go_n = go + std::size_t(n) * co * out_plane;
                if (bias.requires_grad()) {
                    T* gb = bias.grad().data();
                    for (int c = 0; c < co; ++c) {
                        T acc = 0;
                        for (std::size_t i = 0; i < out_plane; ++i) acc += go_n[c * out_plane + i];
                        gb[c] += acc;
                    }
                }
                detail::im2col(go_n, co, oh, ow, k, stride, pad, sh, sw, colg.data());
                if (in.requires_grad())
                    detail::gemm(false, false, ci, int(m2), kk, T(1), wpv, kk, colg.data(),
                                 int(m2), T(1), in.grad().data() + std::size_t(n) * ci * m2,
                                 int(m2));
                if (weight.requires_grad())
                    detail::gemm(false, true, ci, kk, int(m2), T(1),
                                 ipv + std::size_t(n) * ci * m2, int(m2), colg.data(), int(m2),
                                 T(1), weight.grad().data(), kk);
            }
        });
    }
    return out;
}

// Per-(sample, channel) plane normalization; gain/bias shaped (1,c,1,1).
template <typename T>
Tensor<T> instance_norm(Tape<T>& tape, const Tensor<T>& in, const Tensor<T>& gain,
                        const Tensor<T>& bias, T eps = T(1e-5)) {
    const Shape is = in.shape();
    if (!(gain.shape() == Shape{1, is.c, 1, 1}) || !(bias.shape() == Shape{1, is.c, 1, 1}))
        throw std::invalid_argument("instance_norm: gain/bias must be (1,c,1,1)");
    const int m = is.h * is.w;
    if (m < 1) throw std::invalid_argument("instance_norm: empty plane");

    bool rg = in.requires_grad() || gain.requires_grad() || bias.requires_grad();
    Tensor<T> out = detail::make_out<T>(is, rg);

    auto mu = std::make_shared<std::vector<T>>(std::size_t(is.n) * is.c);
    auto istd = std::make_shared<std::vector<T>>(std::size_t(is.n) * is.c);

    const T* ip = in.data().data();
    const T* gp = gain.data().data();
    const T* bp = bias.data().data();
    T* op = out.data().data();
    for (int n = 0; n < is.n; ++n)
        for (int c = 0; c < is.c; ++c) {
            std::size_t base = (std::size_t(n) * is.c + c) * m;
            T mean = 0;
            for (int i = 0; i < m; ++i) mean += ip[base + i];
            mean /= T(m);
            T var = 0;
            for (int i = 0; i < m; ++i) {
                T d = ip[base + i] - mean;
                var += d * d;
            }
            var /= T(m);
            T inv = T(1) / std::sqrt(var + eps);
            (*mu)[std::size_t(n) * is.c + c] = mean;
            (*istd)[std::size_t(n) * is.c + c] = inv;
            for (int i = 0; i < m; ++i)
                op[base + i] = (ip[base + i] - mean) * inv * gp[c] + bp[c];
        }

    if (rg) {
        tape.record(out, [=]() mutable {
            const T* go = out.node()->grad.data();
            const T* ipv = in.data().data();
            const T* gpv = gain.data().data();
            const Shape s = in.shape();
            const int mm = s.h * s.w;
            for (int n = 0; n < s.n; ++n)
                for (int c = 0; c < s.c; ++c) {
                    std::size_t base = (std::size_t(n) * s.c + c) * mm;
                    T mean = (*mu)[std::size_t(n) * s.c + c];
                    T inv = (*istd)[std::size_t(n) * s.c + c];
                    T s1 = 0, s2 = 0;
                    for (int i = 0; i < mm; ++i) {
                        T xh = (ipv[base + i] - mean) * inv;
                        s1 += go[base + i];
                        s2 += go[base + i] * xh;
                    }
                    if (gain.requires_grad()) gain.grad()[c] += s2;
                    if (bias.requires_grad()) bias.grad()[c] += s1;
                    if (in.requires_grad()) {
                        T* gi = in.grad().data();
                        T ginv = gpv[c] * inv;
                        for (int i = 0; i < mm; ++i) {
                            T xh = (ipv[base + i] - mean) * inv;
                            gi[base + i] += ginv * (go[base + i] - s1 / T(mm) - xh * s2 / T(mm));
                        }
                    }
                }
        });
    }
    return out;
}

template <typename T>
Tensor<T> leaky_relu(Tape<T>& tape, const Tensor<T>& in, T slope) {
    bool rg = in.requires_grad();
    Tensor<T> out = detail::make_out<T>(in.shape(), rg);
    const auto& iv = in.data();
    auto& ov = out.data();
    for (std::size_t i = 0; i < iv.size(); ++i) ov[i] = iv[i] >= 0 ? iv[i] : slope * iv[i];
    if (rg) {
        tape.record(out, [=]() mutable {
            const T* go = out.node()->grad.data();
            const T* ipv = in.data().data();
            T* gi = in.grad().data();
            for (std::size_t i = 0; i < in.data().size(); ++i)
                gi[i] += go[i] * (ipv[i] >= 0 ? T(1) : slope);
        });
    }
    return out;
}

template <typename T>
Tensor<T> relu(Tape<T>& tape, const Tensor<T>& in) {
    return leaky_relu(tape, in, T(0));
}

template <typename T>
Tensor<T> tanh(Tape<T>& tape, const Tensor<T>& in) {
    bool rg = in.requires_grad();
    Tensor<T> out = detail::make_out<T>(in.shape(), rg);
    const auto& iv = in.data();
    auto& ov = out.data();
    for (std::size_t i = 0; i < iv.size(); ++i) ov[i] = std::tanh(iv[i]);
    if (rg) {
        tape.record(out, [=]() mutable {
            const T* go = out.node()->grad.data();
            const T* ov2 = out.data().data();
            T* gi = in.grad().data();
            for (std::size_t i = 0; i < in.data().size(); ++i)
                gi[i] += go[i] * (T(1) - ov2[i] * ov2[i]);
        });
    }
    return out;
}

namespace detail {
template <typename T>
inline T sigmoid_val(T x) {
    if (x >= 0) return T(1) / (T(1) + std::exp(-x));
    T e = std::exp(x);
    return e / (T(1) + e);
}
} // namespace detail

template <typename T>
Tensor<T> sigmoid(Tape<T>& tape, const Tensor<T>& in) {
    bool rg = in.requires_grad();
    Tensor<T> out = detail::make_out<T>(in.shape(), rg);
    const auto& iv = in.data();
    auto& ov = out.data();
    for (std::size_t i = 0; i < iv.size(); ++i) ov[i] = detail::sigmoid_val(iv[i]);
    if (rg) {
        tape.record(out, [=]() mutable {
            const T* go = out.node()->grad.data();
            const T* ov2 = out.data().data();
            T* gi = in.grad().data();
            for (std::size_t i = 0; i < in.data().size(); ++i)
                gi[i] += go[i] * ov2[i] * (T(1) - ov2[i]);
        });
    }
    return out;
}

// Inverted dropout: keeps with probability 1-p and scales kept values by
// 1/(1-p); identity in eval mode. Training mode consumes one draw per
// element regardless of p so the stream stays aligned.
template <typename T>
Tensor<T> dropout(Tape<T>& tape, const Tensor<T>& in, double p, bool training, Rng& rng) {
    if (p < 0 || p >= 1) throw std::invalid_argument("dropout: p must be in [0,1)");
    if (!training) return in;
    bool rg = in.requires_grad();
    Tensor<T> out = detail::make_out<T>(in.shape(), rg);
    auto mask = std::make_shared<std::vector<T>>(in.data().size());
    T scale = T(1.0 / (1.0 - p));
    const auto& iv = in.data();
    auto& ov = out.data();
    for (std::size_t i = 0; i < iv.size(); ++i) {
        (*mask)[i] = rng.next_double() >= p ? scale : T(0);
        ov[i] = iv[i] * (*mask)[i];
    }
    if (rg) {
        tape.record(out, [=]() mutable {
            const T* go = out.node()->grad.data();
            T* gi = in.grad().data();
            for (std::size_t i = 0; i < in.data().size(); ++i) gi[i] += go[i] * (*mask)[i];
        });
    }
    return out;
}

template <typename T>
Tensor<T> concat_channels(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b) {
    const Shape as = a.shape(), bs = b.shape();
    if (as.n != bs.n || as.h != bs.h || as.w != bs.w)
        throw std::invalid_argument("concat_channels: n/h/w mismatch");
    bool rg = a.requires_grad() || b.requires_grad();
    Tensor<T> out = detail::make_out<T>({as.n, as.c + bs.c, as.h, as.w}, rg);
    const std::size_t plane = std::size_t(as.h) * as.w;
    const T* ap = a.data().data();
    const T* bp = b.data().data();
    T* op = out.data().data();
    for (int n = 0; n < as.n; ++n) {
        std::copy(ap + std::size_t(n) * as.c * plane, ap + std::size_t(n + 1) * as.c * plane,
                  op + std::size_t(n) * (as.c + bs.c) * plane);
        std::copy(bp + std::size_t(n) * bs.c * plane, bp + std::size_t(n + 1) * bs.c * plane,
                  op + (std::size_t(n) * (as.c + bs.c) + as.c) * plane);
    }
    if (rg) {
        tape.record(out, [=]() mutable {
            const T* go = out.node()->grad.data();
            const Shape asv = a.shape(), bsv = b.shape();
            const std::size_t pl = std::size_t(asv.h) * asv.w;
            for (int n = 0; n < asv.n; ++n) {
                if (a.requires_grad()) {
                    T* ga = a.grad().data();
                    const T* src = go + std::size_t(n) * (asv.c + bsv.c) * pl;
                    for (std::size_t i = 0; i < std::size_t(asv.c) * pl; ++i)
                        ga[std::size_t(n) * asv.c * pl + i] += src[i];
                }
                if (b.requires_grad()) {
                    T* gb = b.grad().data();
                    const T* src = go + (std::size_t(n) * (asv.c + bsv.c) + asv.c) * pl;
                    for (std::size_t i = 0; i < std::size_t(bsv.c) * pl; ++i)
                        gb[std::size_t(n) * bsv.c * pl + i] += src[i];
                }
            }
        });
    }
    return out;
}

template <typename T>
Tensor<T> max_pool2x2(Tape<T>& tape, const Tensor<T>& in) {
    const Shape is = in.shape();
    if (is.h % 2 != 0 || is.w % 2 != 0)
        throw std::invalid_argument("max_pool2x2: spatial dims must be even");
    const int oh = is.h / 2, ow = is.w / 2;
    bool rg = in.requires_grad();
    Tensor<T> out = detail::make_out<T>({is.n, is.c, oh, ow}, rg);
    auto arg = std::make_shared<std::vector<std::uint32_t>>(out.numel());
    const T* ip = in.data().data();
    T* op = out.data().data();
    std::size_t oi = 0;
    for (int n = 0; n < is.n; ++n)
        for (int c = 0; c < is.c; ++c) {
            std::size_t base = (std::size_t(n) * is.c + c) * is.h * is.w;
            for (int y = 0; y < oh; ++y)
                for (int x = 0; x < ow; ++x, ++oi) {
                    std::size_t i00 = base + std::size_t(2 * y) * is.w + 2 * x;
                    std::size_t idx[4] = {i00, i00 + 1, i00 + std::size_t(is.w),
                                          i00 + std::size_t(is.w) + 1};
                    std::size_t best = idx[0];
                    for (int q = 1; q < 4; ++q)
                        if (ip[idx[q]] > ip[best]) best = idx[q];
                    op[oi] = ip[best];
                    (*arg)[oi] = std::uint32_t(best);
                }
        }
    if (rg) {
        tape.record(out, [=]() mutable {
            const T* go = out.node()->grad.data();
            T* gi = in.grad().data();
            for (std::size_t i = 0; i < out.numel(); ++i) gi[(*arg)[i]] += go[i];
        });
    }
    return out;
}

template <typename T>
Tensor<T> global_avg_pool(Tape<T>& tape, const Tensor<T>& in) {
    const Shape is = in.shape();
    const int m = is.h * is.w;
    bool rg = in.requires_grad();
    Tensor<T> out = detail::make_out<T>({is.n, is.c, 1, 1}, rg);
    const T* ip = in.data().data();
    T* op = out.data().data();
    for (int n = 0; n < is.n; ++n)
        for (int c = 0; c < is.c; ++c) {
            std::size_t base = (std::size_t(n) * is.c + c) * m;
            T acc = 0;
            for (int i = 0; i < m; ++i) acc += ip[base + i];
            op[std::size_t(n) * is.c + c] = acc / T(m);
        }
    if (rg) {
        tape.record(out, [=]() mutable {
            const T* go = out.node()->grad.data();
            T* gi = in.grad().data();
            const Shape s = in.shape();
            const int mm = s.h * s.w;
            for (int n = 0; n < s.n; ++n)
                for (int c = 0; c < s.c; ++c) {
                    T g = go[std::size_t(n) * s.c + c] / T(mm);
                    std::size_t base = (std::size_t(n) * s.c + c) * mm;
                    for (int i = 0; i < mm; ++i) gi[base + i] += g;
                }
        });
    }
    return out;
}

template <typename T>
Tensor<T> add(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b) {
    detail::same_shape(a, b, "add");
    bool rg = a.requires_grad() || b.requires_grad();
    Tensor<T> out = detail::make_out<T>(a.shape(), rg);
    for (std::size_t i = 0; i < a.data().size(); ++i) out.data()[i] = a.data()[i] + b.data()[i];
    if (rg) {
        tape.record(out, [=]() mutable {
            const T* go = out.node()->grad.data();
            if (a.requires_grad()) {
                T* ga = a.grad().data();
                for (std::size_t i = 0; i < a.data().size(); ++i) ga[i] += go[i];
            }
            if (b.requires_grad()) {
                T* gb = b.grad().data();
                for (std::size_t i = 0; i < b.data().size(); ++i) gb[i] += go[i];
            }
        });
    }
    return out;
}

template <typename T>
Tensor<T> mul(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b) {
    detail::same_shape(a, b, "mul");
    bool rg = a.requires_grad() || b.requires_grad();
    Tensor<T> out = detail::make_out<T>(a.shape(), rg);
    for (std::size_t i = 0; i < a.data().size(); ++i) out.data()[i] = a.data()[i] * b.data()[i];
    if (rg) {
        tape.record(out, [=]() mutable {
            const T* go = out.node()->grad.data();
            if (a.requires_grad()) {
                T* ga = a.grad().data();
                const T* bv = b.data().data();
                for (std::size_t i = 0; i < a.data().size(); ++i) ga[i] += go[i] * bv[i];
            }
            if (b.requires_grad()) {
                T* gb = b.grad().data();
                const T* av = a.data().data();
                for (std::size_t i = 0; i < b.data().size(); ++i) gb[i] += go[i] * av[i];
            }
        });
    }
    return out;
}

template <typename T>
Tensor<T> scale(Tape<T>& tape, const Tensor<T>& a, T s) {
    bool rg = a.requires_grad();
    Tensor<T> out = detail::make_out<T>(a.shape(), rg);
    for (std::size_t i = 0; i < a.data().size(); ++i) out.data()[i] = a.data()[i] * s;
    if (rg) {
        tape.record(out, [=]() mutable {
            const T* go = out.node()->grad.data();
            T* ga = a.grad().data();
            for (std::size_t i = 0; i < a.data().size(); ++i) ga[i] += go[i] * s;
        });
    }
    return out;
}

template <typename T>
Tensor<T> sum(Tape<T>& tape, const Tensor<T>& a) {
    bool rg = a.requires_grad();
    Tensor<T> out = detail::make_out<T>({1, 1, 1, 1}, rg);
    T acc = 0;
    for (T v : a.data()) acc += v;
    out.data()[0] = acc;
    if (rg) {
        tape.record(out, [=]() mutable {
            T g = out.node()->grad[0];
            T* ga = a.grad().data();
            for (std::size_t i = 0; i < a.data().size(); ++i) ga[i] += g;
        });
    }
    return out;
}

template <typename T>
Tensor<T> l1_loss(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b) {
    detail::same_shape(a, b, "l1_loss");
    bool rg = a.requires_grad() || b.requires_grad();
    Tensor<T> out = detail::make_out<T>({1, 1, 1, 1}, rg);
    const std::size_t n = a.data().size();
    T acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += std::abs(a.data()[i] - b.data()[i]);
    out.data()[0] = acc / T(n);
    if (rg) {
        tape.record(out, [=]() mutable {
            T g = out.node()->grad[0] / T(n);
            const T* av = a.data().data();
            const T* bv = b.data().data();
            T* ga = a.requires_grad() ? a.grad().data() : nullptr;
            T* gb = b.requires_grad() ? b.grad().data() : nullptr;
            for (std::size_t i = 0; i < n; ++i) {
                T d = av[i] - bv[i];
                T s = d > 0 ? T(1) : (d < 0 ? T(-1) : T(0));
                if (ga) ga[i] += g * s;
                if (gb) gb[i] -= g * s;
            }
        });
    }
    return out;
}

template <typename T>
Tensor<T> mse_loss(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b) {
    detail::same_shape(a, b, "mse_loss");
    bool rg = a.requires_grad() || b.requires_grad();
    Tensor<T> out = detail::make_out<T>({1, 1, 1, 1}, rg);
    const std::size_t n = a.data().size();
    T acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        T d = a.data()[i] - b.data()[i];
        acc += d * d;
    }
    out.data()[0] = acc / T(n);
    if (rg) {
        tape.record(out, [=]() mutable {
            T g = out.node()->grad[0] / T(n);
            const T* av = a.data().data();
            const T* bv = b.data().data();
            T* ga = a.requires_grad() ? a.grad().data() : nullptr;
            T* gb = b.requires_grad() ? b.grad().data() : nullptr;
            for (std::size_t i = 0; i < n; ++i) {
                T d = T(2) * (av[i] - bv[i]);
                if (ga) ga[i] += g * d;
                if (gb) gb[i] -= g * d;
            }
        });
    }
    return out;
}

// Numerically stable mean BCE on logits: max(l,0) - l*t + log(1+exp(-|l|)).
template <typename T>
Tensor<T> bce_with_logits(Tape<T>& tape, const Tensor<T>& logits, const Tensor<T>& targets) {
    detail::same_shape(logits, targets, "bce_with_logits");
    bool rg = logits.requires_grad() || targets.requires_grad();
    Tensor<T> out = detail::make_out<T>({1, 1, 1, 1}, rg);
    const std::size_t n = logits.data().size();
    T acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        T l = logits.data()[i], t = targets.data()[i];
        acc += std::max(l, T(0)) - l * t + std::log1p(std::exp(-std::abs(l)));
    }
    out.data()[0] = acc / T(n);
    if (rg) {
        tape.record(out, [=]() mutable {
            T g = out.node()->grad[0] / T(n);
            const T* lv = logits.data().data();
            const T* tv = targets.data().data();
            T* gl = logits.requires_grad() ? logits.grad().data() : nullptr;
            T* gt = targets.requires_grad() ? targets.grad().data() : nullptr;
            for (std::size_t i = 0; i < n; ++i) {
                if (gl) gl[i] += g * (detail::sigmoid_val(lv[i]) - tv[i]);
                if (gt) gt[i] += g * (-lv[i]);
            }
        });
    }
    return out;
}

// Leaf copy: shares no graph history with the source.
template <typename T>
Tensor<T> detach(const Tensor<T>& x) {
    return Tensor<T>::from_data(x.shape(), x.data(), false);
}

} // namespace cartogan::ag

#endif
