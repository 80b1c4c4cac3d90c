#include "takt/autograd.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "takt/kernels.hpp"
#include "takt/rowmath.hpp"

namespace takt {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

int Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

void Tape::check(int id) const {
  if (id < 0 || id >= static_cast<int>(nodes_.size()))
    throw std::invalid_argument("Tape: bad node id");
}

const Array& Tape::val(int id) const {
  check(id);
  const Node& n = nodes_[static_cast<size_t>(id)];
  if (n.store) return n.store->value(n.pname);
  return n.value;
}

bool Tape::needs_grad(int id) const {
  check(id);
  return nodes_[static_cast<size_t>(id)].needs_grad;
}

Array& Tape::grad_ref(int id) {
  Node& n = nodes_[static_cast<size_t>(id)];
  if (!n.grad_live) {
    n.grad_buf = Array::zeros(val(id).shape);
    n.grad_live = true;
  }
  return n.grad_buf;
}

const Array& Tape::grad(int id) {
  check(id);
  return grad_ref(id);
}

int Tape::leaf(Array v, bool needs_grad) {
  Node n;
  n.value = std::move(v);
  n.needs_grad = needs_grad;
  return push(std::move(n));
}

int Tape::param(ParamStore& store, const std::string& name) {
  store.value(name);  // validates the name
  Node n;
  n.store = &store;
  n.pname = name;
  n.needs_grad = true;
  return push(std::move(n));
}

void Tape::flush_param_grads() {
  for (auto& n : nodes_) {
    if (n.store && n.grad_live) {
      Array& g = n.store->grad(n.pname);
      kern::axpy(g.data.data(), 1.0, n.grad_buf.data.data(), g.size());
    }
  }
}

void Tape::backward(int loss) {
  check(loss);
  require(val(loss).is_scalar(), "backward: loss must be scalar");
  for (auto& n : nodes_) n.grad_live = false;
  grad_ref(loss).data[0] = 1.0;
  for (int id = loss; id >= 0; --id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (n.grad_live && n.needs_grad && n.backprop) n.backprop(*this, id);
  }
}

// ---------------------------------------------------------------------------
// elementwise / structural
// ---------------------------------------------------------------------------

int Tape::add(int a, int b) {
  const Array& va = val(a);
  const Array& vb = val(b);
  require(va.same_shape(vb), "add: shape mismatch");
  Node n;
  n.value = Array::zeros(va.shape);
  kern::add(n.value.data.data(), va.data.data(), vb.data.data(), va.size());
  n.needs_grad = needs_grad(a) || needs_grad(b);
  if (n.needs_grad) {
    n.backprop = [a, b](Tape& t, int self) {
      const Array& g = t.grad_ref(self);
      if (t.needs_grad(a))
        kern::axpy(t.grad_ref(a).data.data(), 1.0, g.data.data(), g.size());
      if (t.needs_grad(b))
        kern::axpy(t.grad_ref(b).data.data(), 1.0, g.data.data(), g.size());
    };
  }
  return push(std::move(n));
}

int Tape::sub(int a, int b) {
  const Array& va = val(a);
  const Array& vb = val(b);
  require(va.same_shape(vb), "sub: shape mismatch");
  Node n;
  n.value = Array::zeros(va.shape);
  kern::sub(n.value.data.data(), va.data.data(), vb.data.data(), va.size());
  n.needs_grad = needs_grad(a) || needs_grad(b);
  if (n.needs_grad) {
    n.backprop = [a, b](Tape& t, int self) {
      const Array& g = t.grad_ref(self);
      if (t.needs_grad(a))
        kern::axpy(t.grad_ref(a).data.data(), 1.0, g.data.data(), g.size());
      if (t.needs_grad(b))
        kern::axpy(t.grad_ref(b).data.data(), -1.0, g.data.data(), g.size());
    };
  }
  return push(std::move(n));
}

int Tape::mul(int a, int b) {
  const Array& va = val(a);
  const Array& vb = val(b);
  require(va.same_shape(vb), "mul: shape mismatch");
  Node n;
  n.value = Array::zeros(va.shape);
  kern::mul(n.value.data.data(), va.data.data(), vb.data.data(), va.size());
  n.needs_grad = needs_grad(a) || needs_grad(b);
  if (n.needs_grad) {
    n.backprop = [a, b](Tape& t, int self) {
      const Array& g = t.grad_ref(self);
      const int64_t sz = g.size();
      if (t.needs_grad(a)) {
        const double* vb_ = t.val(b).data.data();
        double* ga = t.grad_ref(a).data.data();
        const double* gp = g.data.data();
        for (int64_t i = 0; i < sz; ++i) ga[i] += gp[i] * vb_[i];
      }
      if (t.needs_grad(b)) {
        const double* va_ = t.val(a).data.data();
        double* gb = t.grad_ref(b).data.data();
        const double* gp = g.data.data();
        for (int64_t i = 0; i < sz; ++i) gb[i] += gp[i] * va_[i];
      }
    };
  }
  return push(std::move(n));
}

int Tape::scale(int a, double s) {
  const Array& va = val(a);
  Node n;
  n.value = Array::zeros(va.shape);
  kern::scale(n.value.data.data(), va.data.data(), s, va.size());
  n.needs_grad = needs_grad(a);
  if (n.needs_grad) {
    n.backprop = [a, s](Tape& t, int self) {
      const Array& g = t.grad_ref(self);
      kern::axpy(t.grad_ref(a).data.data(), s, g.data.data(), g.size());
    };
  }
  return push(std::move(n));
}

int Tape::add_const(int a, double c) {
  const Array& va = val(a);
  Node n;
  n.value = va;
  for (double& v : n.value.data) v += c;
  n.needs_grad = needs_grad(a);
  if (n.needs_grad) {
    n.backprop = [a](Tape& t, int self) {
      const Array& g = t.grad_ref(self);
      kern::axpy(t.grad_ref(a).data.data(), 1.0, g.data.data(), g.size());
    };
  }
  return push(std::move(n));
}

int Tape::exp_op(int a) {
  const Array& va = val(a);
  Node n;
  n.value = Array::zeros(va.shape);
  for (int64_t i = 0; i < va.size(); ++i) n.value.data[static_cast<size_t>(i)] =
      std::exp(va.data[static_cast<size_t>(i)]);
  n.needs_grad = needs_grad(a);
  if (n.needs_grad) {
    n.backprop = [a](Tape& t, int self) {
      const Array& g = t.grad_ref(self);
      const Array& y = t.val(self);
      double* ga = t.grad_ref(a).data.data();
      for (int64_t i = 0; i < g.size(); ++i)
        ga[i] += g.data[static_cast<size_t>(i)] * y.data[static_cast<size_t>(i)];
    };
  }
  return push(std::move(n));
}

int Tape::tanh_op(int a) {
  const Array& va = val(a);
  Node n;
  n.value = Array::zeros(va.shape);
  row::tanh_vec(n.value.data.data(), va.data.data(), va.size());
  n.needs_grad = needs_grad(a);
  if (n.needs_grad) {
    n.backprop = [a](Tape& t, int self) {
      const Array& g = t.grad_ref(self);
      const Array& y = t.val(self);
      double* ga = t.grad_ref(a).data.data();
      for (int64_t i = 0; i < g.size(); ++i) {
        const double yi = y.data[static_cast<size_t>(i)];
        ga[i] += g.data[static_cast<size_t>(i)] * (1.0 - yi * yi);
      }
    };
  }
  return push(std::move(n));
}

int Tape::add_row_broadcast(int a, int bias) {
  const Array& va = val(a);
  const Array& vb = val(bias);
  require(vb.rows() == 1 && vb.cols() == va.cols(),
          "add_row_broadcast: bias must be [1,C]");
  Node n;
  n.value = Array::zeros(va.shape);
  const int64_t c = va.cols();
  for (int64_t r = 0; r < va.rows(); ++r)
    kern::add(n.value.data.data() + r * c, va.data.data() + r * c,
              vb.data.data(), c);
  n.needs_grad = needs_grad(a) || needs_grad(bias);
  if (n.needs_grad) {
    n.backprop = [a, bias](Tape& t, int self) {
      const Array& g = t.grad_ref(self);
      const int64_t c = g.cols();
      if (t.needs_grad(a))
        kern::axpy(t.grad_ref(a).data.data(), 1.0, g.data.data(), g.size());
      if (t.needs_grad(bias)) {
        double* gb = t.grad_ref(bias).data.data();
        for (int64_t r = 0; r < g.rows(); ++r)
          kern::axpy(gb, 1.0, g.data.data() + r * c, c);
      }
    };
  }
  return push(std::move(n));
}

int Tape::concat_rows(int a, int b) {
  const Array& va = val(a);
  const Array& vb = val(b);
  require(va.cols() == vb.cols(), "concat_rows: column mismatch");
  Node n;
  n.value = Array::zeros({va.rows() + vb.rows(), va.cols()});
  std::memcpy(n.value.data.data(), va.data.data(),
              sizeof(double) * va.data.size());
  std::memcpy(n.value.data.data() + va.size(), vb.data.data(),
              sizeof(double) * vb.data.size());
  n.needs_grad = needs_grad(a) || needs_grad(b);
  if (n.needs_grad) {
    const int64_t na = va.size();
    n.backprop = [a, b, na](Tape& t, int self) {
      const Array& g = t.grad_ref(self);
      if (t.needs_grad(a))
        kern::axpy(t.grad_ref(a).data.data(), 1.0, g.data.data(), na);
      if (t.needs_grad(b))
        kern::axpy(t.grad_ref(b).data.data(), 1.0, g.data.data() + na,
                   g.size() - na);
    };
  }
  return push(std::move(n));
}

int Tape::concat_cols(int a, int b) {
  const Array& va = val(a);
  const Array& vb = val(b);
  require(va.rows() == vb.rows(), "concat_cols: row mismatch");
  const int64_t r = va.rows(), ca = va.cols(), cb = vb.cols();
  Node n;
  n.value = Array::zeros({r, ca + cb});
  for (int64_t i = 0; i < r; ++i) {
    std::memcpy(n.value.data.data() + i * (ca + cb), va.data.data() + i * ca,
                sizeof(double) * static_cast<size_t>(ca));
    std::memcpy(n.value.data.data() + i * (ca + cb) + ca,
                vb.data.data() + i * cb, sizeof(double) * static_cast<size_t>(cb));
  }
  n.needs_grad = needs_grad(a) || needs_grad(b);
  if (n.needs_grad) {
    n.backprop = [a, b, r, ca, cb](Tape& t, int self) {
      const Array& g = t.grad_ref(self);
      for (int64_t i = 0; i < r; ++i) {
        const double* gr = g.data.data() + i * (ca + cb);
        if (t.needs_grad(a))
          kern::axpy(t.grad_ref(a).data.data() + i * ca, 1.0, gr, ca);
        if (t.needs_grad(b))
          kern::axpy(t.grad_ref(b).data.data() + i * cb, 1.0, gr + ca, cb);
      }
    };
  }
  return push(std::move(n));
}

int Tape::slice_rows(int a, int64_t r0, int64_t r1) {
  const Array& va = val(a);
  require(0 <= r0 && r0 < r1 && r1 <= va.rows(), "slice_rows: bad range");
  const int64_t c = va.cols();
  Node n;
  n.value = Array::zeros({r1 - r0, c});
  std::memcpy(n.value.data.data(), va.data.data() + r0 * c,
              sizeof(double) * static_cast<size_t>((r1 - r0) * c));
  n.needs_grad = needs_grad(a);
  if (n.needs_grad) {
    n.backprop = [a, r0, c](Tape& t, int self) {
      const Array& g = t.grad_ref(self);
      kern::axpy(t.grad_ref(a).data.data() + r0 * c, 1.0, g.data.data(),
                 g.size());
    };
  }
  return push(std::move(n));
}

int Tape::slice_cols(int a, int64_t c0, int64_t c1) {
  const Array& va = val(a);
  require(0 <= c0 && c0 < c1 && c1 <= va.cols(), "slice_cols: bad range");
  const int64_t r = va.rows(), c = va.cols(), w = c1 - c0;
  Node n;
  n.value = Array::zeros({r, w});
  for (int64_t i = 0; i < r; ++i)
    std::memcpy(n.value.data.data() + i * w, va.data.data() + i * c + c0,
                sizeof(double) * static_cast<size_t>(w));
  n.needs_grad = needs_grad(a);
  if (n.needs_grad) {
    n.backprop = [a, c0, c, w, r](Tape& t, int self) {
      const Array& g = t.grad_ref(self);
      double* ga = t.grad_ref(a).data.data();
      for (int64_t i = 0; i < r; ++i)
        kern::axpy(ga + i * c + c0, 1.0, g.data.data() + i * w, w);
    };
  }
  return push(std::move(n));
}

// ---------------------------------------------------------------------------
// linear algebra
// ---------------------------------------------------------------------------

int Tape::matmul(int a, int b) {
  const Array& va = val(a);
  const Array& vb = val(b);
  require(va.cols() == vb.rows(), "matmul: inner dimension mismatch");
  const int64_t m = va.rows(), k = va.cols(), nn = vb.cols();
  Node n;
  n.value = Array::zeros({m, nn});
  kern::matmul(n.value.data.data(), va.data.data(), vb.data.data(), m, k, nn);
  n.needs_grad = needs_grad(a) || needs_grad(b);
  if (n.needs_grad) {
    n.backprop = [a, b, m, k, nn](Tape& t, int self) {
      const Array& g = t.grad_ref(self);
      if (t.needs_grad(a)) {
        Array bt = Array::zeros({nn, k});
        kern::transpose(bt.data.data(), t.val(b).data.data(), k, nn);
        kern::matmul_acc(t.grad_ref(a).data.data(), g.data.data(),
                         bt.data.data(), m, nn, k);
      }
      if (t.needs_grad(b)) {
        Array at = Array::zeros({k, m});
        kern::transpose(at.data.data(), t.val(a).data.data(), m, k);
        kern::matmul_acc(t.grad_ref(b).data.data(), at.data.data(),
                         g.data.data(), k, m, nn);
      }
    };
  }
  return push(std::move(n));
}

int Tape::matmul_nt(int a, int b) {
  const Array& va = val(a);
  const Array& vb = val(b);
  require(va.cols() == vb.cols(), "matmul_nt: inner dimension mismatch");
  const int64_t m = va.rows(), k = va.cols(), nn = vb.rows();
  Node n;
  n.value = Array::zeros({m, nn});
  Array bt = Array::zeros({k, nn});
  kern::transpose(bt.data.data(), vb.data.data(), nn, k);
  kern::matmul(n.value.data.data(), va.data.data(), bt.data.data(), m, k, nn);
  n.needs_grad = needs_grad(a) || needs_grad(b);
  if (n.needs_grad) {
    n.backprop = [a, b, m, k, nn](Tape& t, int self) {
      const Array& g = t.grad_ref(self);
      if (t.needs_grad(a))
        kern::matmul_acc(t.grad_ref(a).data.data(), g.data.data(),
                         t.val(b).data.data(), m, nn, k);
      if (t.needs_grad(b)) {
        Array gt = Array::zeros({nn, m});
        kern::transpose(gt.data.data(), g.data.data(), m, nn);
        kern::matmul_acc(t.grad_ref(b).data.data(), gt.data.data(),
                         t.val(a).data.data(), nn, m, k);
      }
    };
  }
  return push(std::move(n));
}

// ---------------------------------------------------------------------------
// row ops
// ---------------------------------------------------------------------------

int Tape::softmax_rows(int a) {
  const Array& va = val(a);
  const int64_t r = va.rows(), c = va.cols();
  Node n;
  n.value = Array::zeros(va.shape);
  for (int64_t i = 0; i < r; ++i)
    row::softmax(n.value.data.data() + i * c, va.data.data() + i * c, c);
  n.needs_grad = needs_grad(a);
  if (n.needs_grad) {
    n.backprop = [a, r, c](Tape& t, int self) {
      const Array& g = t.grad_ref(self);
      const Array& y = t.val(self);
      double* ga = t.grad_ref(a).data.data();
      for (int64_t i = 0; i < r; ++i) {
        const double* gi = g.data.data() + i * c;
        const double* yi = y.data.data() + i * c;
        double dot = 0.0;
        for (int64_t j = 0; j < c; ++j) dot += gi[j] * yi[j];
        for (int64_t j = 0; j < c; ++j) ga[i * c + j] += yi[j] * (gi[j] - dot);
      }
    };
  }
  return push(std::move(n));
}

int Tape::log_softmax_rows(int a) {
  const Array& va = val(a);
  const int64_t r = va.rows(), c = va.cols();
  Node n;
  n.value = Array::zeros(va.shape);
  for (int64_t i = 0; i < r; ++i)
    row::log_softmax(n.value.data.data() + i * c, va.data.data() + i * c, c);
  n.needs_grad = needs_grad(a);
  if (n.needs_grad) {
    n.backprop = [a, r, c](Tape& t, int self) {
      const Array& g = t.grad_ref(self);
      const Array& y = t.val(self);
      double* ga = t.grad_ref(a).data.data();
      for (int64_t i = 0; i < r; ++i) {
        const double* gi = g.data.data() + i * c;
        const double* yi = y.data.data() + i * c;
        double sumg = 0.0;
        for (int64_t j = 0; j < c; ++j) sumg += gi[j];
        for (int64_t j = 0; j < c; ++j)
          ga[i * c + j] += gi[j] - std::exp(yi[j]) * sumg;
      }
    };
  }
  return push(std::move(n));
}

int Tape::layer_norm_rows(int a, int gain, int bias, double eps) {
  const Array& va = val(a);
  const Array& vg = val(gain);
  const Array& vb = val(bias);
  const int64_t r = va.rows(), c = va.cols();
  require(vg.rows() == 1 && vg.cols() == c && vb.rows() == 1 && vb.cols() == c,
          "layer_norm_rows: gain/bias must be [1,C]");
  Node n;
  n.value = Array::zeros(va.shape);
  for (int64_t i = 0; i < r; ++i)
    row::layer_norm(n.value.data.data() + i * c, va.data.data() + i * c,
                    vg.data.data(), vb.data.data(), c, eps);
  n.needs_grad = needs_grad(a) || needs_grad(gain) || needs_grad(bias);
  if (n.needs_grad) {
    n.backprop = [a, gain, bias, eps, r, c](Tape& t, int self) {
      const Array& g = t.grad_ref(self);
      const Array& x = t.val(a);
      const Array& vgain = t.val(gain);
      std::vector<double> xhat(static_cast<size_t>(c));
      std::vector<double> gxhat(static_cast<size_t>(c));
      for (int64_t i = 0; i < r; ++i) {
        const double* xi = x.data.data() + i * c;
        const double* gi = g.data.data() + i * c;
        double mean = 0.0;
        for (int64_t j = 0; j < c; ++j) mean += xi[j];
        mean /= static_cast<double>(c);
        double var = 0.0;
        for (int64_t j = 0; j < c; ++j) {
          const double d = xi[j] - mean;
          var += d * d;
        }
        var /= static_cast<double>(c);
        const double inv = 1.0 / std::sqrt(var + eps);
        double m1 = 0.0, m2 = 0.0;
        for (int64_t j = 0; j < c; ++j) {
          xhat[static_cast<size_t>(j)] = (xi[j] - mean) * inv;
          gxhat[static_cast<size_t>(j)] = gi[j] * vgain.data[static_cast<size_t>(j)];
          m1 += gxhat[static_cast<size_t>(j)];
          m2 += gxhat[static_cast<size_t>(j)] * xhat[static_cast<size_t>(j)];
        }
        m1 /= static_cast<double>(c);
        m2 /= static_cast<double>(c);
        if (t.needs_grad(a)) {
          double* ga = t.grad_ref(a).data.data() + i * c;
          for (int64_t j = 0; j < c; ++j)
            ga[j] += inv * (gxhat[static_cast<size_t>(j)] - m1 -
                            xhat[static_cast<size_t>(j)] * m2);
        }
        if (t.needs_grad(gain)) {
          double* gg = t.grad_ref(gain).data.data();
          for (int64_t j = 0; j < c; ++j)
            gg[j] += gi[j] * xhat[static_cast<size_t>(j)];
        }
        if (t.needs_grad(bias)) {
          double* gb = t.grad_ref(bias).data.data();
          for (int64_t j = 0; j < c; ++j) gb[j] += gi[j];
        }
      }
    };
  }
  return push(std::move(n));
}

int Tape::pick_rows(int a, std::vector<int64_t> ids) {
  const Array& va = val(a);
  require(static_cast<int64_t>(ids.size()) == va.rows(),
          "pick_rows: one index per row required");
  const int64_t c = va.cols();
  for (int64_t idx : ids) require(0 <= idx && idx < c, "pick_rows: index out of range");
  Node n;
  n.value = Array::zeros({va.rows(), 1});
  for (int64_t i = 0; i < va.rows(); ++i)
    n.value.data[static_cast<size_t>(i)] = va.at(i, ids[static_cast<size_t>(i)]);
  n.needs_grad = needs_grad(a);
  if (n.needs_grad) {
    n.backprop = [a, ids = std::move(ids), c](Tape& t, int self) {
      const Array& g = t.grad_ref(self);
      double* ga = t.grad_ref(a).data.data();
      for (int64_t i = 0; i < g.rows(); ++i)
        ga[i * c + ids[static_cast<size_t>(i)]] += g.data[static_cast<size_t>(i)];
    };
  }
  return push(std::move(n));
}

int Tape::embed(int table, std::vector<int64_t> ids) {
  const Array& vt = val(table);
  const int64_t c = vt.cols();
  for (int64_t idx : ids)
    require(0 <= idx && idx < vt.rows(), "embed: index out of range");
  Node n;
  const int64_t l = static_cast<int64_t>(ids.size());
  require(l > 0, "embed: empty index list");
  n.value = Array::zeros({l, c});
  for (int64_t i = 0; i < l; ++i)
    std::memcpy(n.value.data.data() + i * c,
                vt.data.data() + ids[static_cast<size_t>(i)] * c,
                sizeof(double) * static_cast<size_t>(c));
  n.needs_grad = needs_grad(table);
  if (n.needs_grad) {
    n.backprop = [table, ids = std::move(ids), c](Tape& t, int self) {
      const Array& g = t.grad_ref(self);
      double* gt = t.grad_ref(table).data.data();
      for (size_t i = 0; i < ids.size(); ++i)
        kern::axpy(gt + ids[i] * c, 1.0,
                   g.data.data() + static_cast<int64_t>(i) * c, c);
    };
  }
  return push(std::move(n));
}

// ---------------------------------------------------------------------------
// reductions
// ---------------------------------------------------------------------------

int Tape::sum(int a) {
  const Array& va = val(a);
  double s = 0.0;
  for (double v : va.data) s += v;
  Node n;
  n.value = Array::scalar(s);
  n.needs_grad = needs_grad(a);
  if (n.needs_grad) {
    n.backprop = [a](Tape& t, int self) {
      const double g = t.grad_ref(self).data[0];
      Array& ga = t.grad_ref(a);
      for (double& v : ga.data) v += g;
    };
  }
  return push(std::move(n));
}

int Tape::mean(int a) {
  const Array& va = val(a);
  double s = 0.0;
  for (double v : va.data) s += v;
  const double inv = 1.0 / static_cast<double>(va.size());
  Node n;
  n.value = Array::scalar(s * inv);
  n.needs_grad = needs_grad(a);
  if (n.needs_grad) {
    n.backprop = [a, inv](Tape& t, int self) {
      const double g = t.grad_ref(self).data[0] * inv;
      Array& ga = t.grad_ref(a);
      for (double& v : ga.data) v += g;
    };
  }
  return push(std::move(n));
}

int Tape::mse(int pred, int target) {
  const Array& vp = val(pred);
  const Array& vt = val(target);
  require(vp.same_shape(vt), "mse: shape mismatch");
  const int64_t sz = vp.size();
  double s = 0.0;
  for (int64_t i = 0; i < sz; ++i) {
    const double d = vp.data[static_cast<size_t>(i)] - vt.data[static_cast<size_t>(i)];
    s += d * d;
  }
  Node n;
  n.value = Array::scalar(s / static_cast<double>(sz));
  n.needs_grad = needs_grad(pred) || needs_grad(target);
  if (n.needs_grad) {
    n.backprop = [pred, target, sz](Tape& t, int self) {
      const double g = t.grad_ref(self).data[0];
      const double c = 2.0 * g / static_cast<double>(sz);
      const Array& vp_ = t.val(pred);
      const Array& vt_ = t.val(target);
      if (t.needs_grad(pred)) {
        double* gp = t.grad_ref(pred).data.data();
        for (int64_t i = 0; i < sz; ++i)
          gp[i] += c * (vp_.data[static_cast<size_t>(i)] -
                        vt_.data[static_cast<size_t>(i)]);
      }
      if (t.needs_grad(target)) {
        double* gt = t.grad_ref(target).data.data();
        for (int64_t i = 0; i < sz; ++i)
          gt[i] -= c * (vp_.data[static_cast<size_t>(i)] -
                        vt_.data[static_cast<size_t>(i)]);
      }
    };
  }
  return push(std::move(n));
}

}  // namespace takt
