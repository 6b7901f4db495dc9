#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "motionauth/errors.hpp"
#include "motionauth/nn/tape.hpp"

// Differentiable operations over Graph nodes. Batched sequence data uses a
// block-row convention: a batch of N matrices (R x C) is stored as one
// (N*R x C) matrix with sample n occupying rows [n*R, (n+1)*R).

namespace motionauth::nn {

template <typename S>
Var<S> add(Var<S> a, Var<S> b) {
  Graph<S>& g = *a.g;
  require_same_shape(a.value(), b.value(), "add");
  const bool ng = g.needs_grad(a.id) || g.needs_grad(b.id);
  const int ai = a.id, bi = b.id, id = g.next_id();
  g.add(a.value() + b.value(), ng,
        !ng ? std::function<void(Graph<S>&)>()
            : [id, ai, bi](Graph<S>& gr) {
                const Mat<S>& dy = gr.grad(id);
                gr.accumulate(ai, dy);
                gr.accumulate(bi, dy);
              });
  return {&g, id};
}

template <typename S>
Var<S> scale(Var<S> x, S c) {
  Graph<S>& g = *x.g;
  const bool ng = g.needs_grad(x.id);
  const int xi = x.id, id = g.next_id();
  g.add(Mat<S>(x.value() * c), ng,
        !ng ? std::function<void(Graph<S>&)>()
            : [id, xi, c](Graph<S>& gr) {
                gr.accumulate(xi, Mat<S>(gr.grad(id) * c));
              });
  return {&g, id};
}

// a + c*b; the combined loss of Eq-style "L_traj + lambda * L_auth" terms.
template <typename S>
Var<S> add_scaled(Var<S> a, Var<S> b, S c) {
  Graph<S>& g = *a.g;
  require_same_shape(a.value(), b.value(), "add_scaled");
  const bool ng = g.needs_grad(a.id) || g.needs_grad(b.id);
  const int ai = a.id, bi = b.id, id = g.next_id();
  g.add(Mat<S>(a.value() + c * b.value()), ng,
        !ng ? std::function<void(Graph<S>&)>()
            : [id, ai, bi, c](Graph<S>& gr) {
                const Mat<S>& dy = gr.grad(id);
                gr.accumulate(ai, dy);
                gr.accumulate(bi, Mat<S>(dy * c));
              });
  return {&g, id};
}

template <typename S>
Var<S> matmul(Var<S> a, Var<S> b) {
  Graph<S>& g = *a.g;
  if (a.value().cols() != b.value().rows())
    throw ShapeError("matmul: shape mismatch " + shape_str(a.value()) +
                     " vs " + shape_str(b.value()));
  const bool ng = g.needs_grad(a.id) || g.needs_grad(b.id);
  const int ai = a.id, bi = b.id, id = g.next_id();
  g.add(Mat<S>(a.value() * b.value()), ng,
        !ng ? std::function<void(Graph<S>&)>()
            : [id, ai, bi](Graph<S>& gr) {
                const Mat<S>& dy = gr.grad(id);
                if (gr.needs_grad(ai))
                  gr.grad(ai) += dy * gr.value(bi).transpose();
                if (gr.needs_grad(bi))
                  gr.grad(bi) += gr.value(ai).transpose() * dy;
              });
  return {&g, id};
}

// y = x*W + b, b broadcast over rows (b is 1 x d_out).
template <typename S>
Var<S> linear(Var<S> x, Var<S> w, Var<S> b) {
  Graph<S>& g = *x.g;
  if (x.value().cols() != w.value().rows() ||
      b.value().rows() != 1 || b.value().cols() != w.value().cols())
    throw ShapeError("linear: shape mismatch x" + shape_str(x.value()) +
                     " W" + shape_str(w.value()) + " b" +
                     shape_str(b.value()));
  Mat<S> y = x.value() * w.value();
  y.rowwise() += b.value().row(0);
  const bool ng = g.needs_grad(x.id) || g.needs_grad(w.id) ||
                  g.needs_grad(b.id);
  const int xi = x.id, wi = w.id, bi = b.id, id = g.next_id();
  g.add(std::move(y), ng,
        !ng ? std::function<void(Graph<S>&)>()
            : [id, xi, wi, bi](Graph<S>& gr) {
                const Mat<S>& dy = gr.grad(id);
                if (gr.needs_grad(xi))
                  gr.grad(xi) += dy * gr.value(wi).transpose();
                if (gr.needs_grad(wi))
                  gr.grad(wi) += gr.value(xi).transpose() * dy;
                if (gr.needs_grad(bi))
                  gr.grad(bi).row(0) += dy.colwise().sum();
              });
  return {&g, id};
}

template <typename S>
Var<S> transpose(Var<S> x) {
  Graph<S>& g = *x.g;
  const bool ng = g.needs_grad(x.id);
  const int xi = x.id, id = g.next_id();
  g.add(Mat<S>(x.value().transpose()), ng,
        !ng ? std::function<void(Graph<S>&)>()
            : [id, xi](Graph<S>& gr) {
                gr.accumulate(xi, Mat<S>(gr.grad(id).transpose()));
              });
  return {&g, id};
}

// Reinterpret in row-major element order; rows*cols must be preserved.
template <typename S>
Var<S> reshape(Var<S> x, Eigen::Index rows, Eigen::Index cols) {
  Graph<S>& g = *x.g;
  const Mat<S>& xv = x.value();
  if (xv.size() != rows * cols)
    throw ShapeError("reshape: cannot view " + shape_str(xv) + " as (" +
                     std::to_string(rows) + " x " + std::to_string(cols) +
                     ")");
  Mat<S> y = Eigen::Map<const Mat<S>>(xv.data(), rows, cols);
  const bool ng = g.needs_grad(x.id);
  const Eigen::Index xr = xv.rows(), xc = xv.cols();
  const int xi = x.id, id = g.next_id();
  g.add(std::move(y), ng,
        !ng ? std::function<void(Graph<S>&)>()
            : [id, xi, xr, xc](Graph<S>& gr) {
                const Mat<S>& dy = gr.grad(id);
                gr.accumulate(xi,
                              Mat<S>(Eigen::Map<const Mat<S>>(dy.data(), xr,
                                                              xc)));
              });
  return {&g, id};
}

template <typename S>
Var<S> slice_rows(Var<S> x, Eigen::Index r0, Eigen::Index n) {
  Graph<S>& g = *x.g;
  if (r0 < 0 || r0 + n > x.value().rows())
    throw ShapeError("slice_rows: range out of bounds for " +
                     shape_str(x.value()));
  const bool ng = g.needs_grad(x.id);
  const int xi = x.id, id = g.next_id();
  g.add(Mat<S>(x.value().middleRows(r0, n)), ng,
        !ng ? std::function<void(Graph<S>&)>()
            : [id, xi, r0, n](Graph<S>& gr) {
                if (gr.needs_grad(xi))
                  gr.grad(xi).middleRows(r0, n) += gr.grad(id);
              });
  return {&g, id};
}

template <typename S>
Var<S> slice_cols(Var<S> x, Eigen::Index c0, Eigen::Index n) {
  Graph<S>& g = *x.g;
  if (c0 < 0 || c0 + n > x.value().cols())
    throw ShapeError("slice_cols: range out of bounds for " +
                     shape_str(x.value()));
  const bool ng = g.needs_grad(x.id);
  const int xi = x.id, id = g.next_id();
  g.add(Mat<S>(x.value().middleCols(c0, n)), ng,
        !ng ? std::function<void(Graph<S>&)>()
            : [id, xi, c0, n](Graph<S>& gr) {
                if (gr.needs_grad(xi))
                  gr.grad(xi).middleCols(c0, n) += gr.grad(id);
              });
  return {&g, id};
}

template <typename S>
Var<S> vstack(const std::vector<Var<S>>& xs) {
  if (xs.empty()) throw ShapeError("vstack: empty input");
  Graph<S>& g = *xs[0].g;
  const Eigen::Index cols = xs[0].value().cols();
  Eigen::Index rows = 0;
  bool ng = false;
  for (const auto& x : xs) {
    if (x.value().cols() != cols)
      throw ShapeError("vstack: column mismatch " + shape_str(x.value()));
    rows += x.value().rows();
    ng = ng || g.needs_grad(x.id);
  }
  Mat<S> y(rows, cols);
  std::vector<int> ids;
  std::vector<Eigen::Index> offs, lens;
  Eigen::Index at = 0;
  for (const auto& x : xs) {
    const Eigen::Index r = x.value().rows();
    y.middleRows(at, r) = x.value();
    ids.push_back(x.id);
    offs.push_back(at);
    lens.push_back(r);
    at += r;
  }
  const int id = g.next_id();
  g.add(std::move(y), ng,
        !ng ? std::function<void(Graph<S>&)>()
            : [id, ids, offs, lens](Graph<S>& gr) {
                const Mat<S>& dy = gr.grad(id);
                for (std::size_t i = 0; i < ids.size(); ++i)
                  if (gr.needs_grad(ids[i]))
                    gr.grad(ids[i]) += dy.middleRows(offs[i], lens[i]);
              });
  return {&g, id};
}

template <typename S>
Var<S> relu(Var<S> x) {
  Graph<S>& g = *x.g;
  const bool ng = g.needs_grad(x.id);
  const int xi = x.id, id = g.next_id();
  g.add(Mat<S>(x.value().cwiseMax(S(0))), ng,
        !ng ? std::function<void(Graph<S>&)>()
            : [id, xi](Graph<S>& gr) {
                if (!gr.needs_grad(xi)) return;
                const Mat<S>& xv = gr.value(xi);
                gr.grad(xi) +=
                    (xv.array() > S(0)).template cast<S>().matrix()
                        .cwiseProduct(gr.grad(id));
              });
  return {&g, id};
}

template <typename S>
Var<S> sum(Var<S> x) {
  Graph<S>& g = *x.g;
  Mat<S> y(1, 1);
  y(0, 0) = x.value().sum();
  const bool ng = g.needs_grad(x.id);
  const Eigen::Index r = x.value().rows(), c = x.value().cols();
  const int xi = x.id, id = g.next_id();
  g.add(std::move(y), ng,
        !ng ? std::function<void(Graph<S>&)>()
            : [id, xi, r, c](Graph<S>& gr) {
                gr.accumulate(xi,
                              Mat<S>(Mat<S>::Constant(r, c, gr.grad(id)(0, 0))));
              });
  return {&g, id};
}

// Max-stabilized softmax over each row.
template <typename S>
Var<S> softmax_rows(Var<S> x) {
  Graph<S>& g = *x.g;
  const Mat<S>& xv = x.value();
  Mat<S> y(xv.rows(), xv.cols());
  for (Eigen::Index i = 0; i < xv.rows(); ++i) {
    const S m = xv.row(i).maxCoeff();
    y.row(i) = (xv.row(i).array() - m).exp();
    y.row(i) /= y.row(i).sum();
  }
  const bool ng = g.needs_grad(x.id);
  const int xi = x.id, id = g.next_id();
  g.add(std::move(y), ng,
        !ng ? std::function<void(Graph<S>&)>()
            : [id, xi](Graph<S>& gr) {
                if (!gr.needs_grad(xi)) return;
                const Mat<S>& yv = gr.value(id);
                const Mat<S>& dy = gr.grad(id);
                Mat<S> dx(yv.rows(), yv.cols());
                for (Eigen::Index i = 0; i < yv.rows(); ++i) {
                  const S dot = dy.row(i).cwiseProduct(yv.row(i)).sum();
                  dx.row(i) =
                      yv.row(i).cwiseProduct(dy.row(i).array().matrix() -
                                             Mat<S>::Constant(1, yv.cols(),
                                                              dot));
                }
                gr.grad(xi) += dx;
              });
  return {&g, id};
}

template <typename S>
Var<S> layer_norm(Var<S> x, Var<S> gamma, Var<S> beta, S eps = S(1e-5)) {
  Graph<S>& g = *x.g;
  const Mat<S>& xv = x.value();
  const Eigen::Index d = xv.cols();
  if (gamma.value().cols() != d || beta.value().cols() != d)
    throw ShapeError("layer_norm: gamma/beta must be (1 x " +
                     std::to_string(d) + ")");
  Mat<S> xhat(xv.rows(), d);
  Mat<S> inv(xv.rows(), 1);
  for (Eigen::Index i = 0; i < xv.rows(); ++i) {
    const S mu = xv.row(i).mean();
    const S var = (xv.row(i).array() - mu).square().mean();
    const S is = S(1) / std::sqrt(var + eps);
    inv(i, 0) = is;
    xhat.row(i) = (xv.row(i).array() - mu) * is;
  }
  Mat<S> y = xhat;
  for (Eigen::Index i = 0; i < y.rows(); ++i)
    y.row(i) = y.row(i).cwiseProduct(gamma.value().row(0)) +
               beta.value().row(0);
  const bool ng = g.needs_grad(x.id) || g.needs_grad(gamma.id) ||
                  g.needs_grad(beta.id);
  const int xi = x.id, gi = gamma.id, bi = beta.id, id = g.next_id();
  g.add(std::move(y), ng,
        !ng ? std::function<void(Graph<S>&)>()
            : [id, xi, gi, bi, xhat = std::move(xhat),
               inv = std::move(inv)](Graph<S>& gr) {
                const Mat<S>& dy = gr.grad(id);
                const Eigen::Index d = dy.cols();
                if (gr.needs_grad(gi))
                  gr.grad(gi).row(0) += dy.cwiseProduct(xhat).colwise().sum();
                if (gr.needs_grad(bi)) gr.grad(bi).row(0) += dy.colwise().sum();
                if (!gr.needs_grad(xi)) return;
                const Mat<S>& gam = gr.value(gi);
                Mat<S> dx(dy.rows(), d);
                for (Eigen::Index i = 0; i < dy.rows(); ++i) {
                  Mat<S> h = dy.row(i).cwiseProduct(gam.row(0));
                  const S mh = h.mean();
                  const S mhx = h.cwiseProduct(xhat.row(i)).mean();
                  dx.row(i) = inv(i, 0) * (h.array() - mh -
                                           xhat.row(i).array() * mhx);
                }
                gr.grad(xi) += dx;
              });
  return {&g, id};
}

// Scaled dot-product attention over N independent block pairs, H heads each.
// q is (N*Lq x d), k and v are (N*Lk x d). With causal=true (requires
// Lq == Lk) position i attends only to j <= i; masked weights are exact
// zeros. Post-softmax weights can be captured through probs_out, indexed
// block-major: probs_out[n*H + h].
template <typename S>
Var<S> block_attention(Var<S> q, Var<S> k, Var<S> v, int n_blocks,
                       int n_heads, bool causal,
                       std::vector<Mat<S>>* probs_out = nullptr) {
  Graph<S>& g = *q.g;
  const Mat<S>&qv = q.value(), &kv = k.value(), &vv = v.value();
  const Eigen::Index d = qv.cols();
  if (kv.cols() != d || vv.cols() != d)
    throw ShapeError("block_attention: d_model mismatch");
  if (n_heads <= 0 || d % n_heads != 0)
    throw ConfigError("block_attention: d_model " + std::to_string(d) +
                      " not divisible by n_heads " + std::to_string(n_heads));
  if (qv.rows() % n_blocks != 0 || kv.rows() % n_blocks != 0 ||
      kv.rows() != vv.rows())
    throw ShapeError("block_attention: rows not divisible into blocks");
  const Eigen::Index lq = qv.rows() / n_blocks, lk = kv.rows() / n_blocks;
  if (causal && lq != lk)
    throw ShapeError("block_attention: causal mask needs Lq == Lk");
  const Eigen::Index dk = d / n_heads;
  const S alpha = S(1) / S(std::sqrt(double(dk)));

  Mat<S> y(qv.rows(), d);
  std::vector<Mat<S>> probs(std::size_t(n_blocks) * n_heads);
  for (int n = 0; n < n_blocks; ++n) {
    for (int h = 0; h < n_heads; ++h) {
      auto qb = qv.block(n * lq, h * dk, lq, dk);
      auto kb = kv.block(n * lk, h * dk, lk, dk);
      Mat<S> s = alpha * (qb * kb.transpose());
      Mat<S> p(lq, lk);
      for (Eigen::Index i = 0; i < lq; ++i) {
        const Eigen::Index valid = causal ? (i + 1) : lk;
        const S m = s.row(i).head(valid).maxCoeff();
        p.row(i).head(valid) = (s.row(i).head(valid).array() - m).exp();
        if (valid < lk) p.row(i).tail(lk - valid).setZero();
        p.row(i) /= p.row(i).head(valid).sum();
      }
      y.block(n * lq, h * dk, lq, dk) = p * vv.block(n * lk, h * dk, lk, dk);
      probs[std::size_t(n) * n_heads + h] = std::move(p);
    }
  }
  if (probs_out) *probs_out = probs;

  const bool ng = g.needs_grad(q.id) || g.needs_grad(k.id) ||
                  g.needs_grad(v.id);
  const int qi = q.id, ki = k.id, vi = v.id, id = g.next_id();
  g.add(std::move(y), ng,
        !ng ? std::function<void(Graph<S>&)>()
            : [id, qi, ki, vi, n_blocks, n_heads, lq, lk, dk, alpha,
               probs = std::move(probs)](Graph<S>& gr) {
                const Mat<S>& dy = gr.grad(id);
                const Mat<S>&qv = gr.value(qi), &kv = gr.value(ki),
                      &vv = gr.value(vi);
                const bool nq = gr.needs_grad(qi), nk = gr.needs_grad(ki),
                           nv = gr.needs_grad(vi);
                for (int n = 0; n < n_blocks; ++n) {
                  for (int h = 0; h < n_heads; ++h) {
                    const Mat<S>& p = probs[std::size_t(n) * n_heads + h];
                    auto dout = dy.block(n * lq, h * dk, lq, dk);
                    auto vb = vv.block(n * lk, h * dk, lk, dk);
                    if (nv)
                      gr.grad(vi).block(n * lk, h * dk, lk, dk) +=
                          p.transpose() * dout;
                    if (!nq && !nk) continue;
                    Mat<S> dp = dout * vb.transpose();
                    Mat<S> ds(lq, lk);
                    for (Eigen::Index i = 0; i < lq; ++i) {
                      const S dot = dp.row(i).cwiseProduct(p.row(i)).sum();
                      ds.row(i) = p.row(i).cwiseProduct(
                          dp.row(i).array().matrix() -
                          Mat<S>::Constant(1, lk, dot));
                    }
                    if (nq)
                      gr.grad(qi).block(n * lq, h * dk, lq, dk) +=
                          alpha * (ds * kv.block(n * lk, h * dk, lk, dk));
                    if (nk)
                      gr.grad(ki).block(n * lk, h * dk, lk, dk) +=
                          alpha * (ds.transpose() *
                                   qv.block(n * lq, h * dk, lq, dk));
                  }
                }
              });
  return {&g, id};
}

template <typename S>
struct AttnVars {
  Var<S> wq, bq, wk, bk, wv, bv, wo, bo;
};

// Full multi-head attention: project, attend per block, output-project.
template <typename S>
Var<S> multi_head_attention(Var<S> q_in, Var<S> k_in, Var<S> v_in,
                            const AttnVars<S>& p, int n_blocks, int n_heads,
                            bool causal,
                            std::vector<Mat<S>>* probs_out = nullptr) {
  Var<S> q = linear(q_in, p.wq, p.bq);
  Var<S> k = linear(k_in, p.wk, p.bk);
  Var<S> v = linear(v_in, p.wv, p.bv);
  Var<S> a = block_attention(q, k, v, n_blocks, n_heads, causal, probs_out);
  return linear(a, p.wo, p.bo);
}

namespace detail {

// "Same" padding; even kernels pad one extra on the left.
inline Eigen::Index conv_left_pad(Eigen::Index k) { return k / 2; }

template <typename S>
void im2col(const Mat<S>& x, int sample, Eigen::Index c_in, Eigen::Index k,
            Mat<S>& col) {
  const Eigen::Index len = x.cols();
  const Eigen::Index left = conv_left_pad(k);
  col.setZero();
  for (Eigen::Index ci = 0; ci < c_in; ++ci) {
    const auto xrow = x.row(sample * c_in + ci);
    for (Eigen::Index j = 0; j < k; ++j) {
      const Eigen::Index t0 = std::max<Eigen::Index>(0, left - j);
      const Eigen::Index t1 = std::min<Eigen::Index>(len, len + left - j);
      if (t1 <= t0) continue;
      col.row(ci * k + j).segment(t0, t1 - t0) =
          xrow.segment(t0 + j - left, t1 - t0);
    }
  }
}

}  // namespace detail

// Temporal 1-D convolution over a block-row batch. x is (N*C_in x L),
// w is (C_out x C_in*k) with taps ordered channel-major, b is (1 x C_out).
// Output is (N*C_out x L); length is preserved by zero "same" padding.
template <typename S>
Var<S> conv1d(Var<S> x, Var<S> w, Var<S> b, int n_batch, Eigen::Index kernel) {
  Graph<S>& g = *x.g;
  const Mat<S>& xv = x.value();
  const Mat<S>& wv = w.value();
  if (xv.cols() < 1) throw ShapeError("conv1d: empty temporal axis");
  if (n_batch <= 0 || xv.rows() % n_batch != 0)
    throw ShapeError("conv1d: rows not divisible into batch");
  const Eigen::Index c_in = xv.rows() / n_batch;
  const Eigen::Index c_out = wv.rows();
  if (wv.cols() != c_in * kernel)
    throw ShapeError("conv1d: weight " + shape_str(wv) + " does not match " +
                     std::to_string(c_in) + " channels x kernel " +
                     std::to_string(kernel));
  if (b.value().rows() != 1 || b.value().cols() != c_out)
    throw ShapeError("conv1d: bias must be (1 x C_out)");
  const Eigen::Index len = xv.cols();

  Mat<S> y(Eigen::Index(n_batch) * c_out, len);
  Mat<S> col(c_in * kernel, len);
  for (int n = 0; n < n_batch; ++n) {
    detail::im2col(xv, n, c_in, kernel, col);
    y.middleRows(Eigen::Index(n) * c_out, c_out) = wv * col;
    y.middleRows(Eigen::Index(n) * c_out, c_out).colwise() +=
        b.value().row(0).transpose();
  }
  const bool ng = g.needs_grad(x.id) || g.needs_grad(w.id) ||
                  g.needs_grad(b.id);
  const int xi = x.id, wi = w.id, bi = b.id, id = g.next_id();
  g.add(std::move(y), ng,
        !ng ? std::function<void(Graph<S>&)>()
            : [id, xi, wi, bi, n_batch, kernel, c_in, c_out,
               len](Graph<S>& gr) {
                const Mat<S>& dy = gr.grad(id);
                const Mat<S>& xv = gr.value(xi);
                const Mat<S>& wv = gr.value(wi);
                const bool nx = gr.needs_grad(xi), nw = gr.needs_grad(wi),
                           nb = gr.needs_grad(bi);
                const Eigen::Index left = detail::conv_left_pad(kernel);
                Mat<S> col(c_in * kernel, len);
                for (int n = 0; n < n_batch; ++n) {
                  auto dyb = dy.middleRows(Eigen::Index(n) * c_out, c_out);
                  if (nw) {
                    detail::im2col(xv, n, c_in, kernel, col);
                    gr.grad(wi) += dyb * col.transpose();
                  }
                  if (nb)
                    gr.grad(bi).row(0) += dyb.rowwise().sum().transpose();
                  if (nx) {
                    Mat<S> dcol = wv.transpose() * dyb;
                    Mat<S>& gx = gr.grad(xi);
                    for (Eigen::Index ci = 0; ci < c_in; ++ci) {
                      for (Eigen::Index j = 0; j < kernel; ++j) {
                        const Eigen::Index t0 =
                            std::max<Eigen::Index>(0, left - j);
                        const Eigen::Index t1 =
                            std::min<Eigen::Index>(len, len + left - j);
                        if (t1 <= t0) continue;
                        gx.row(Eigen::Index(n) * c_in + ci)
                            .segment(t0 + j - left, t1 - t0) +=
                            dcol.row(ci * kernel + j).segment(t0, t1 - t0);
                      }
                    }
                  }
                }
              });
  return {&g, id};
}

enum class BnMode {
  train,         // batch statistics, update running stats
  train_frozen,  // batch statistics, running stats untouched (grad checks)
  eval           // running statistics
};

// Batch norm over channels of a block-row batch. x is (N*C x L); statistics
// are taken over the N*L entries of each channel. gamma/beta are (1 x C);
// running_mean/running_var are non-trainable (1 x C) params updated in train
// mode with the given momentum.
template <typename S>
Var<S> batch_norm1d(Var<S> x, Var<S> gamma, Var<S> beta,
                    Param<S>& running_mean, Param<S>& running_var,
                    int n_batch, BnMode mode, S momentum = S(0.1),
                    S eps = S(1e-5)) {
  Graph<S>& g = *x.g;
  const Mat<S>& xv = x.value();
  if (n_batch <= 0 || xv.rows() % n_batch != 0)
    throw ShapeError("batch_norm1d: rows not divisible into batch");
  const Eigen::Index c = xv.rows() / n_batch;
  const Eigen::Index len = xv.cols();
  if (gamma.value().cols() != c || beta.value().cols() != c)
    throw ShapeError("batch_norm1d: gamma/beta must be (1 x C)");
  const S m_count = S(n_batch) * S(len);

  Mat<S> mean(1, c), inv(1, c);
  if (mode == BnMode::eval) {
    mean = running_mean.value;
    for (Eigen::Index ch = 0; ch < c; ++ch)
      inv(0, ch) = S(1) / std::sqrt(running_var.value(0, ch) + eps);
  } else {
    for (Eigen::Index ch = 0; ch < c; ++ch) {
      S mu = 0;
      for (int n = 0; n < n_batch; ++n)
        mu += xv.row(Eigen::Index(n) * c + ch).sum();
      mu /= m_count;
      S var = 0;
      for (int n = 0; n < n_batch; ++n)
        var += (xv.row(Eigen::Index(n) * c + ch).array() - mu).square().sum();
      var /= m_count;
      mean(0, ch) = mu;
      inv(0, ch) = S(1) / std::sqrt(var + eps);
      if (mode == BnMode::train) {
        running_mean.value(0, ch) =
            (S(1) - momentum) * running_mean.value(0, ch) + momentum * mu;
        running_var.value(0, ch) =
            (S(1) - momentum) * running_var.value(0, ch) + momentum * var;
      }
    }
  }

  Mat<S> xhat(xv.rows(), len);
  Mat<S> y(xv.rows(), len);
  for (int n = 0; n < n_batch; ++n) {
    for (Eigen::Index ch = 0; ch < c; ++ch) {
      const Eigen::Index r = Eigen::Index(n) * c + ch;
      xhat.row(r) = (xv.row(r).array() - mean(0, ch)) * inv(0, ch);
      y.row(r) = gamma.value()(0, ch) * xhat.row(r).array() +
                 beta.value()(0, ch);
    }
  }
  const bool batch_stats = mode != BnMode::eval;
  const bool ng = g.needs_grad(x.id) || g.needs_grad(gamma.id) ||
                  g.needs_grad(beta.id);
  const int xi = x.id, gi = gamma.id, bi = beta.id, id = g.next_id();
  g.add(std::move(y), ng,
        !ng ? std::function<void(Graph<S>&)>()
            : [id, xi, gi, bi, n_batch, c, m_count, batch_stats,
               xhat = std::move(xhat), inv = std::move(inv)](Graph<S>& gr) {
                const Mat<S>& dy = gr.grad(id);
                const bool nx = gr.needs_grad(xi);
                for (Eigen::Index ch = 0; ch < c; ++ch) {
                  S sum_dy = 0, sum_dyx = 0;
                  for (int n = 0; n < n_batch; ++n) {
                    const Eigen::Index r = Eigen::Index(n) * c + ch;
                    sum_dy += dy.row(r).sum();
                    sum_dyx += dy.row(r).cwiseProduct(xhat.row(r)).sum();
                  }
                  if (gr.needs_grad(gi)) gr.grad(gi)(0, ch) += sum_dyx;
                  if (gr.needs_grad(bi)) gr.grad(bi)(0, ch) += sum_dy;
                  if (!nx) continue;
                  const S gam = gr.value(gi)(0, ch);
                  for (int n = 0; n < n_batch; ++n) {
                    const Eigen::Index r = Eigen::Index(n) * c + ch;
                    if (batch_stats) {
                      gr.grad(xi).row(r) +=
                          (gam * inv(0, ch)) *
                          (dy.row(r).array() - sum_dy / m_count -
                           xhat.row(r).array() * (sum_dyx / m_count))
                              .matrix();
                    } else {
                      gr.grad(xi).row(r) += (gam * inv(0, ch)) * dy.row(r);
                    }
                  }
                }
              });
  return {&g, id};
}

// Global average pooling over time for a block-row batch: (N*C x L) -> (N x C).
template <typename S>
Var<S> global_avg_pool(Var<S> x, int n_batch) {
  Graph<S>& g = *x.g;
  const Mat<S>& xv = x.value();
  if (n_batch <= 0 || xv.rows() % n_batch != 0)
    throw ShapeError("global_avg_pool: rows not divisible into batch");
  const Eigen::Index c = xv.rows() / n_batch;
  const Eigen::Index len = xv.cols();
  Mat<S> y(n_batch, c);
  for (int n = 0; n < n_batch; ++n)
    for (Eigen::Index ch = 0; ch < c; ++ch)
      y(n, ch) = xv.row(Eigen::Index(n) * c + ch).mean();
  const bool ng = g.needs_grad(x.id);
  const int xi = x.id, id = g.next_id();
  g.add(std::move(y), ng,
        !ng ? std::function<void(Graph<S>&)>()
            : [id, xi, c, len](Graph<S>& gr) {
                if (!gr.needs_grad(xi)) return;
                const Mat<S>& dy = gr.grad(id);
                for (Eigen::Index n = 0; n < dy.rows(); ++n)
                  for (Eigen::Index ch = 0; ch < c; ++ch)
                    gr.grad(xi).row(n * c + ch).array() +=
                        dy(n, ch) / S(len);
              });
  return {&g, id};
}

// Mean squared error over all elements (scalar node).
template <typename S>
Var<S> mse_loss(Var<S> pred, Var<S> target) {
  Graph<S>& g = *pred.g;
  require_same_shape(pred.value(), target.value(), "mse_loss");
  const double n = double(pred.value().size());
  Mat<S> y(1, 1);
  y(0, 0) = S((pred.value() - target.value())
                  .template cast<double>()
                  .squaredNorm() /
              n);
  const bool ng = g.needs_grad(pred.id) || g.needs_grad(target.id);
  const int pi = pred.id, ti = target.id, id = g.next_id();
  g.add(std::move(y), ng,
        !ng ? std::function<void(Graph<S>&)>()
            : [id, pi, ti, n](Graph<S>& gr) {
                const S go = gr.grad(id)(0, 0);
                Mat<S> d = (gr.value(pi) - gr.value(ti)) * (S(2.0 / n) * go);
                gr.accumulate(pi, d);
                gr.accumulate(ti, Mat<S>(-d));
              });
  return {&g, id};
}

// Binary cross-entropy on probabilities, clamped to [1e-7, 1-1e-7] before the
// log; gradients are zero where the clamp is active.
template <typename S>
Var<S> bce_loss(Var<S> p, Var<S> labels) {
  Graph<S>& g = *p.g;
  require_same_shape(p.value(), labels.value(), "bce_loss");
  const double lo = 1e-7, hi = 1.0 - 1e-7;
  const double n = double(p.value().size());
  double acc = 0;
  const Mat<S>& pv = p.value();
  const Mat<S>& yv = labels.value();
  for (Eigen::Index i = 0; i < pv.rows(); ++i)
    for (Eigen::Index j = 0; j < pv.cols(); ++j) {
      const double pc = std::min(hi, std::max(lo, double(pv(i, j))));
      const double lab = double(yv(i, j));
      acc -= lab * std::log(pc) + (1.0 - lab) * std::log(1.0 - pc);
    }
  Mat<S> y(1, 1);
  y(0, 0) = S(acc / n);
  const bool ng = g.needs_grad(p.id);
  const int pi = p.id, li = labels.id, id = g.next_id();
  g.add(std::move(y), ng,
        !ng ? std::function<void(Graph<S>&)>()
            : [id, pi, li, lo, hi, n](Graph<S>& gr) {
                if (!gr.needs_grad(pi)) return;
                const S go = gr.grad(id)(0, 0);
                const Mat<S>& pv = gr.value(pi);
                const Mat<S>& yv = gr.value(li);
                Mat<S> d = Mat<S>::Zero(pv.rows(), pv.cols());
                for (Eigen::Index i = 0; i < pv.rows(); ++i)
                  for (Eigen::Index j = 0; j < pv.cols(); ++j) {
                    const double pc = double(pv(i, j));
                    if (pc <= lo || pc >= hi) continue;
                    d(i, j) = S((pc - double(yv(i, j))) / (pc * (1.0 - pc)) /
                                n) *
                              go;
                  }
                gr.grad(pi) += d;
              });
  return {&g, id};
}

}  // namespace motionauth::nn
