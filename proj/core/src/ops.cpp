// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "zeroswot/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "zeroswot/error.hpp"

namespace zeroswot::ops {
namespace {

void Require(bool ok, const char* op, const std::string& detail) {
  if (!ok) throw Error(ErrorCode::kShapeMismatch, std::string(op) + ": " + detail);
}

std::string Shapes(const Tensor& a, const Tensor& b) {
  return a.ShapeString() + " vs " + b.ShapeString();
}

// c (m x n) += a (m x k) * b (k x n)
void GemmNN(const Tensor& a, const Tensor& b, Tensor& c) {
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c.row(i).data();
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a(i, p);
      if (av == 0.0) continue;
      const double* bp = b.row(p).data();
      for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

// c (m x n) += a (m x k) * b^T, b is n x k
void GemmNT(const Tensor& a, const Tensor& b, Tensor& c) {
  const std::size_t n = b.rows(), k = b.cols();
  Tensor bt(k, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t p = 0; p < k; ++p) bt(p, j) = b(j, p);
  }
  GemmNN(a, bt, c);
}

// c (k x n) += a^T * b, a is m x k, b is m x n
void GemmTN(const Tensor& a, const Tensor& b, Tensor& c) {
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  for (std::size_t i = 0; i < m; ++i) {
    const double* bi = b.row(i).data();
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a(i, p);
      if (av == 0.0) continue;
      double* cp = c.row(p).data();
      for (std::size_t j = 0; j < n; ++j) cp[j] += av * bi[j];
    }
  }
}

double NormalCdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double NormalPdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

double LogSumExp(std::span<const double> v) {
  if (v.empty()) return -std::numeric_limits<double>::infinity();
  const double mx = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

Tensor SinusoidalPositions(std::size_t length, std::size_t d) {
  Tensor pos(length, d);
  for (std::size_t t = 0; t < length; ++t) {
    for (std::size_t c = 0; c < d; c += 2) {
      const double freq = std::pow(10000.0, static_cast<double>(c) / d);
      pos(t, c) = std::sin(static_cast<double>(t) / freq);
      if (c + 1 < d) pos(t, c + 1) = std::cos(static_cast<double>(t) / freq);
    }
  }
  return pos;
}

Var MatMul(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  Require(av.cols() == bv.rows(), "MatMul", Shapes(av, bv));
  Tensor out(av.rows(), bv.cols());
  GemmNN(av, bv, out);
  return a.graph->Make(std::move(out), {a, b}, [](const BackwardContext& c) {
    if (c.din[0]) GemmNT(c.dout, *c.in[1], *c.din[0]);
    if (c.din[1]) GemmTN(*c.in[0], c.dout, *c.din[1]);
  });
}

Var MatMulNT(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  Require(av.cols() == bv.cols(), "MatMulNT", Shapes(av, bv));
  Tensor out(av.rows(), bv.rows());
  GemmNT(av, bv, out);
  return a.graph->Make(std::move(out), {a, b}, [](const BackwardContext& c) {
    if (c.din[0]) GemmNN(c.dout, *c.in[1], *c.din[0]);
    if (c.din[1]) GemmTN(c.dout, *c.in[0], *c.din[1]);
  });
}

Var Add(Var a, Var b) {
  Require(a.value().SameShape(b.value()), "Add", Shapes(a.value(), b.value()));
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  return a.graph->Make(std::move(out), {a, b}, [](const BackwardContext& c) {
    for (Tensor* d : c.din) {
      if (!d) continue;
      for (std::size_t i = 0; i < c.dout.size(); ++i) (*d)[i] += c.dout[i];
    }
  });
}

Var Sub(Var a, Var b) {
  Require(a.value().SameShape(b.value()), "Sub", Shapes(a.value(), b.value()));
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  return a.graph->Make(std::move(out), {a, b}, [](const BackwardContext& c) {
    if (c.din[0]) {
      for (std::size_t i = 0; i < c.dout.size(); ++i) (*c.din[0])[i] += c.dout[i];
    }
    if (c.din[1]) {
      for (std::size_t i = 0; i < c.dout.size(); ++i) (*c.din[1])[i] -= c.dout[i];
    }
  });
}

Var Mul(Var a, Var b) {
  Require(a.value().SameShape(b.value()), "Mul", Shapes(a.value(), b.value()));
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  return a.graph->Make(std::move(out), {a, b}, [](const BackwardContext& c) {
    if (c.din[0]) {
      for (std::size_t i = 0; i < c.dout.size(); ++i)
        (*c.din[0])[i] += c.dout[i] * (*c.in[1])[i];
    }
    if (c.din[1]) {
      for (std::size_t i = 0; i < c.dout.size(); ++i)
        (*c.din[1])[i] += c.dout[i] * (*c.in[0])[i];
    }
  });
}

Var Scale(Var a, double s) {
  Tensor out = a.value();
  for (double& v : out.values()) v *= s;
  return a.graph->Make(std::move(out), {a}, [s](const BackwardContext& c) {
    for (std::size_t i = 0; i < c.dout.size(); ++i) (*c.din[0])[i] += s * c.dout[i];
  });
}

Var AddRowVector(Var a, Var row) {
  const Tensor& rv = row.value();
  Require(rv.rows() == 1 && rv.cols() == a.cols(), "AddRowVector",
          Shapes(a.value(), rv));
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += rv[j];
  }
  return a.graph->Make(std::move(out), {a, row}, [](const BackwardContext& c) {
    if (c.din[0]) {
      for (std::size_t i = 0; i < c.dout.size(); ++i) (*c.din[0])[i] += c.dout[i];
    }
    if (c.din[1]) {
      for (std::size_t i = 0; i < c.dout.rows(); ++i) {
        for (std::size_t j = 0; j < c.dout.cols(); ++j)
          (*c.din[1])[j] += c.dout(i, j);
      }
    }
  });
}

Var Relu(Var a) {
  Tensor out = a.value();
  for (double& v : out.values()) v = std::max(v, 0.0);
  return a.graph->Make(std::move(out), {a}, [](const BackwardContext& c) {
    for (std::size_t i = 0; i < c.dout.size(); ++i) {
      if ((*c.in[0])[i] > 0.0) (*c.din[0])[i] += c.dout[i];
    }
  });
}

Var Gelu(Var a) {
  Tensor out = a.value();
  for (double& v : out.values()) v = v * NormalCdf(v);
  return a.graph->Make(std::move(out), {a}, [](const BackwardContext& c) {
    for (std::size_t i = 0; i < c.dout.size(); ++i) {
      const double x = (*c.in[0])[i];
      (*c.din[0])[i] += c.dout[i] * (NormalCdf(x) + x * NormalPdf(x));
    }
  });
}

Var SoftmaxRows(Var a, bool causal) {
  const Tensor& x = a.value();
  Tensor out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const std::size_t width = causal ? std::min(i + 1, x.cols()) : x.cols();
    auto row = x.row(i).first(width);
    const double mx = *std::max_element(row.begin(), row.end());
    double s = 0.0;
    for (std::size_t j = 0; j < width; ++j) {
      out(i, j) = std::exp(row[j] - mx);
      s += out(i, j);
    }
    for (std::size_t j = 0; j < width; ++j) out(i, j) /= s;
  }
  return a.graph->Make(std::move(out), {a}, [](const BackwardContext& c) {
    for (std::size_t i = 0; i < c.out.rows(); ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < c.out.cols(); ++j) dot += c.dout(i, j) * c.out(i, j);
      for (std::size_t j = 0; j < c.out.cols(); ++j)
        (*c.din[0])(i, j) += c.out(i, j) * (c.dout(i, j) - dot);
    }
  });
}

Var LogSoftmaxRows(Var a) {
  const Tensor& x = a.value();
  Tensor out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double lse = LogSumExp(x.row(i));
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = x(i, j) - lse;
  }
  return a.graph->Make(std::move(out), {a}, [](const BackwardContext& c) {
    for (std::size_t i = 0; i < c.out.rows(); ++i) {
      double total = 0.0;
      for (std::size_t j = 0; j < c.out.cols(); ++j) total += c.dout(i, j);
      for (std::size_t j = 0; j < c.out.cols(); ++j)
        (*c.din[0])(i, j) += c.dout(i, j) - std::exp(c.out(i, j)) * total;
    }
  });
}

Var LogSumExp(Var a) {
  const double lse = LogSumExp(a.value().values());
  return a.graph->Make(Tensor::Scalar(lse), {a}, [](const BackwardContext& c) {
    const double lse = c.out[0];
    const double g = c.dout[0];
    for (std::size_t i = 0; i < c.in[0]->size(); ++i)
      (*c.din[0])[i] += g * std::exp((*c.in[0])[i] - lse);
  });
}

Var LayerNormRows(Var x, Var gamma, Var beta, double eps) {
  const Tensor& xv = x.value();
  const std::size_t n = xv.cols();
  Require(gamma.value().size() == n && beta.value().size() == n, "LayerNormRows",
          Shapes(xv, gamma.value()));
  Tensor out(xv.rows(), n);
  // Normalised values and inverse std are kept for the backward pass.
  Tensor xhat(xv.rows(), n);
  std::vector<double> rstd(xv.rows());
  const Tensor& g = gamma.value();
  const Tensor& b = beta.value();
  for (std::size_t i = 0; i < xv.rows(); ++i) {
    double mean = 0.0;
    for (double v : xv.row(i)) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : xv.row(i)) var += (v - mean) * (v - mean);
    var /= n;
    rstd[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < n; ++j) {
      xhat(i, j) = (xv(i, j) - mean) * rstd[i];
      out(i, j) = g[j] * xhat(i, j) + b[j];
    }
  }
  return x.graph->Make(
      std::move(out), {x, gamma, beta},
      [xhat = std::move(xhat), rstd = std::move(rstd)](const BackwardContext& c) {
        const std::size_t n = c.dout.cols();
        const Tensor& g = *c.in[1];
        for (std::size_t i = 0; i < c.dout.rows(); ++i) {
          if (c.din[1] || c.din[2]) {
            for (std::size_t j = 0; j < n; ++j) {
              if (c.din[1]) (*c.din[1])[j] += c.dout(i, j) * xhat(i, j);
              if (c.din[2]) (*c.din[2])[j] += c.dout(i, j);
            }
          }
          if (!c.din[0]) continue;
          double mean_d = 0.0, mean_dx = 0.0;
          for (std::size_t j = 0; j < n; ++j) {
            const double dxh = c.dout(i, j) * g[j];
            mean_d += dxh;
            mean_dx += dxh * xhat(i, j);
          }
          mean_d /= n;
          mean_dx /= n;
          for (std::size_t j = 0; j < n; ++j) {
            const double dxh = c.dout(i, j) * g[j];
            (*c.din[0])(i, j) += rstd[i] * (dxh - mean_d - xhat(i, j) * mean_dx);
          }
        }
      });
}

Var ConcatRows(std::span<const Var> parts) {
  Require(!parts.empty(), "ConcatRows", "no inputs");
  const std::size_t cols = parts[0].cols();
  std::size_t rows = 0;
  for (const Var& p : parts) {
    Require(p.cols() == cols, "ConcatRows", Shapes(parts[0].value(), p.value()));
    rows += p.rows();
  }
  Tensor out(rows, cols);
  std::size_t r = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    std::copy(v.values().begin(), v.values().end(), out.values().begin() + r * cols);
    r += v.rows();
  }
  return parts[0].graph->Make(std::move(out), parts, [](const BackwardContext& c) {
    std::size_t offset = 0;
    for (std::size_t k = 0; k < c.in.size(); ++k) {
      const std::size_t count = c.in[k]->size();
      if (c.din[k]) {
        for (std::size_t i = 0; i < count; ++i) (*c.din[k])[i] += c.dout[offset + i];
      }
      offset += count;
    }
  });
}

Var ConcatCols(std::span<const Var> parts) {
  Require(!parts.empty(), "ConcatCols", "no inputs");
  const std::size_t rows = parts[0].rows();
  std::size_t cols = 0;
  for (const Var& p : parts) {
    Require(p.rows() == rows, "ConcatCols", Shapes(parts[0].value(), p.value()));
    cols += p.cols();
  }
  Tensor out(rows, cols);
  std::size_t c0 = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < v.cols(); ++j) out(i, c0 + j) = v(i, j);
    }
    c0 += v.cols();
  }
  return parts[0].graph->Make(std::move(out), parts, [](const BackwardContext& c) {
    std::size_t c0 = 0;
    for (std::size_t k = 0; k < c.in.size(); ++k) {
      const std::size_t w = c.in[k]->cols();
      if (c.din[k]) {
        for (std::size_t i = 0; i < c.dout.rows(); ++i) {
          for (std::size_t j = 0; j < w; ++j) (*c.din[k])(i, j) += c.dout(i, c0 + j);
        }
      }
      c0 += w;
    }
  });
}

Var SliceRows(Var a, std::size_t start, std::size_t count) {
  const Tensor& v = a.value();
  Require(start + count <= v.rows(), "SliceRows", "range exceeds " + v.ShapeString());
  const std::size_t cols = v.cols();
  Tensor out(count, cols);
  std::copy_n(v.values().begin() + start * cols, count * cols, out.values().begin());
  return a.graph->Make(std::move(out), {a}, [start](const BackwardContext& c) {
    const std::size_t cols = c.dout.cols();
    for (std::size_t i = 0; i < c.dout.size(); ++i)
      (*c.din[0])[start * cols + i] += c.dout[i];
  });
}

Var SliceCols(Var a, std::size_t start, std::size_t count) {
  const Tensor& v = a.value();
  Require(start + count <= v.cols(), "SliceCols", "range exceeds " + v.ShapeString());
  Tensor out(v.rows(), count);
  for (std::size_t i = 0; i < v.rows(); ++i) {
    for (std::size_t j = 0; j < count; ++j) out(i, j) = v(i, start + j);
  }
  return a.graph->Make(std::move(out), {a}, [start](const BackwardContext& c) {
    for (std::size_t i = 0; i < c.dout.rows(); ++i) {
      for (std::size_t j = 0; j < c.dout.cols(); ++j)
        (*c.din[0])(i, start + j) += c.dout(i, j);
    }
  });
}

Var GatherRows(Var table, std::span<const int> ids) {
  const Tensor& t = table.value();
  const std::size_t cols = t.cols();
  Tensor out(ids.size(), cols);
  std::vector<int> idx(ids.begin(), ids.end());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    Require(idx[i] >= 0 && static_cast<std::size_t>(idx[i]) < t.rows(), "GatherRows",
            "row id " + std::to_string(idx[i]) + " out of " + t.ShapeString());
    auto src = t.row(static_cast<std::size_t>(idx[i]));
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return table.graph->Make(std::move(out), {table},
                           [idx = std::move(idx)](const BackwardContext& c) {
                             for (std::size_t i = 0; i < idx.size(); ++i) {
                               auto dst = c.din[0]->row(static_cast<std::size_t>(idx[i]));
                               auto src = c.dout.row(i);
                               for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
                             }
                           });
}

Var MeanRows(Var a) {
  const Tensor& v = a.value();
  Require(v.rows() > 0, "MeanRows", "empty input");
  Tensor out(1, v.cols());
  for (std::size_t i = 0; i < v.rows(); ++i) {
    for (std::size_t j = 0; j < v.cols(); ++j) out[j] += v(i, j);
  }
  for (double& x : out.values()) x /= static_cast<double>(v.rows());
  return a.graph->Make(std::move(out), {a}, [](const BackwardContext& c) {
    const double inv = 1.0 / static_cast<double>(c.in[0]->rows());
    for (std::size_t i = 0; i < c.in[0]->rows(); ++i) {
      for (std::size_t j = 0; j < c.dout.cols(); ++j) (*c.din[0])(i, j) += inv * c.dout[j];
    }
  });
}

Var GroupMeanRows(Var a, const std::vector<std::vector<std::size_t>>& groups) {
  const Tensor& v = a.value();
  Tensor out(groups.size(), v.cols());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    Require(!groups[g].empty(), "GroupMeanRows", "empty group");
    for (std::size_t r : groups[g]) {
      Require(r < v.rows(), "GroupMeanRows", "row index out of range");
      for (std::size_t j = 0; j < v.cols(); ++j) out(g, j) += v(r, j);
    }
    for (std::size_t j = 0; j < v.cols(); ++j)
      out(g, j) /= static_cast<double>(groups[g].size());
  }
  return a.graph->Make(std::move(out), {a}, [groups](const BackwardContext& c) {
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const double inv = 1.0 / static_cast<double>(groups[g].size());
      for (std::size_t r : groups[g]) {
        for (std::size_t j = 0; j < c.dout.cols(); ++j)
          (*c.din[0])(r, j) += inv * c.dout(g, j);
      }
    }
  });
}

Var Sum(Var a) {
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  return a.graph->Make(Tensor::Scalar(s), {a}, [](const BackwardContext& c) {
    for (double& v : c.din[0]->values()) v += c.dout[0];
  });
}

Var SquaredDistances(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.cols() != bv.cols()) {
    throw Error(ErrorCode::kWidthMismatch, "SquaredDistances: " + Shapes(av, bv));
  }
  Tensor out(av.rows(), bv.rows());
  for (std::size_t i = 0; i < av.rows(); ++i) {
    for (std::size_t j = 0; j < bv.rows(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < av.cols(); ++k) {
        const double diff = av(i, k) - bv(j, k);
        s += diff * diff;
      }
      out(i, j) = s;
    }
  }
  return a.graph->Make(std::move(out), {a, b}, [](const BackwardContext& c) {
    const Tensor& av = *c.in[0];
    const Tensor& bv = *c.in[1];
    for (std::size_t i = 0; i < av.rows(); ++i) {
      for (std::size_t j = 0; j < bv.rows(); ++j) {
        const double g = 2.0 * c.dout(i, j);
        if (g == 0.0) continue;
        for (std::size_t k = 0; k < av.cols(); ++k) {
          const double diff = av(i, k) - bv(j, k);
          if (c.din[0]) (*c.din[0])(i, k) += g * diff;
          if (c.din[1]) (*c.din[1])(j, k) -= g * diff;
        }
      }
    }
  });
}

Var SmoothedNll(Var log_probs, std::span<const int> targets, double smoothing) {
  const Tensor& lp = log_probs.value();
  Require(lp.rows() == targets.size(), "SmoothedNll",
          lp.ShapeString() + " vs " + std::to_string(targets.size()) + " targets");
  std::vector<int> tgt(targets.begin(), targets.end());
  const double v = static_cast<double>(lp.cols());
  double loss = 0.0;
  for (std::size_t t = 0; t < tgt.size(); ++t) {
    double mean = 0.0;
    for (double x : lp.row(t)) mean += x;
    mean /= v;
    loss += -(1.0 - smoothing) * lp(t, static_cast<std::size_t>(tgt[t])) - smoothing * mean;
  }
  return log_probs.graph->Make(
      Tensor::Scalar(loss), {log_probs},
      [tgt = std::move(tgt), smoothing](const BackwardContext& c) {
        const double g = c.dout[0];
        const std::size_t cols = c.din[0]->cols();
        const double uniform = smoothing / static_cast<double>(cols);
        for (std::size_t t = 0; t < tgt.size(); ++t) {
          for (std::size_t j = 0; j < cols; ++j) (*c.din[0])(t, j) -= g * uniform;
          (*c.din[0])(t, static_cast<std::size_t>(tgt[t])) -= g * (1.0 - smoothing);
        }
      });
}

}  // namespace zeroswot::ops
