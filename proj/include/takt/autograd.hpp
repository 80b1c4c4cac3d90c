// Reverse-mode autodiff over 2-D Arrays. Nodes are appended in topological
// order; backward() walks them in reverse. Parameter leaves reference the
// ParamStore by pointer, so the store must outlive the tape and stay
// unmodified until gradients are flushed.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "takt/array.hpp"
#include "takt/optim.hpp"

namespace takt {

class Tape {
 public:
  // --- graph inputs ---
  int leaf(Array v, bool needs_grad = false);
  int param(ParamStore& store, const std::string& name);

  // --- elementwise / structural ops ---
  int add(int a, int b);                 // same shape
  int sub(int a, int b);
  int mul(int a, int b);                 // Hadamard
  int scale(int a, double s);
  int add_const(int a, double c);
  int exp_op(int a);
  int tanh_op(int a);
  int add_row_broadcast(int a, int bias);  // a[R,C] + bias[1,C]
  int concat_rows(int a, int b);
  int concat_cols(int a, int b);
  int slice_rows(int a, int64_t r0, int64_t r1);  // [r0, r1)
  int slice_cols(int a, int64_t c0, int64_t c1);  // [c0, c1)

  // --- linear algebra ---
  int matmul(int a, int b);     // a[M,K] @ b[K,N]
  int matmul_nt(int a, int b);  // a[M,K] @ b[N,K]^T

  // --- rows ---
  int softmax_rows(int a);
  int log_softmax_rows(int a);
  int layer_norm_rows(int a, int gain, int bias, double eps = 1e-5);
  int pick_rows(int a, std::vector<int64_t> ids);  // a[r, ids[r]] -> [R,1]
  int embed(int table, std::vector<int64_t> ids);  // rows of table -> [L,C]

  // --- reductions ---
  int sum(int a);   // -> [1,1]
  int mean(int a);  // -> [1,1]
  int mse(int pred, int target);  // mean squared error -> [1,1]

  // Runs reverse accumulation from a scalar loss node.
  void backward(int loss);

  const Array& val(int id) const;
  // Gradient of the last backward() w.r.t. node id (zeros if unreached).
  const Array& grad(int id);
  bool needs_grad(int id) const;

  // Adds the gradients of all param leaves into their store slots.
  void flush_param_grads();

  int64_t node_count() const { return static_cast<int64_t>(nodes_.size()); }

 private:
  struct Node {
    Array value;
    Array grad_buf;
    bool grad_live = false;
    bool needs_grad = false;
    std::function<void(Tape&, int)> backprop;  // may be empty
    ParamStore* store = nullptr;               // param leaves only
    std::string pname;
  };

  int push(Node n);
  Array& grad_ref(int id);  // allocate on demand
  void check(int id) const;

  std::vector<Node> nodes_;
};

}  // namespace takt
