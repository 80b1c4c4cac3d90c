// Decoder-only autoregressive planner over the symbolic prompt encoding,
// with nucleus sampling, teacher-forced logprobs, a query-based latent
// projector and supervised cold-start training.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "takt/autograd.hpp"
#include "takt/optim.hpp"
#include "takt/rng.hpp"
#include "takt/vocab.hpp"

namespace takt {

struct PlannerConfig {
  int d_model = 64;
  int n_blocks = 2;
  int n_heads = 4;
  int d_ffn = 256;
  int max_len = 1024;   // positional capacity
  int n_queries = 32;   // latent projector queries
  int k_points = 8;     // trajectory arity K
  double init_scale = 0.02;
};

struct DecodeConfig {
  double temperature = 1.0;
  double top_p = 0.99;
  int max_len = 1024;  // response token cap
  bool greedy = false;

  void validate() const;
};

// Fixed-size plan embedding [n_queries, d_model].
using LatentPlan = Array;

struct SampleResult {
  std::vector<int> tokens;        // response tokens, EOS included when emitted
  std::vector<double> logprobs;   // log-softmax of the untempered logits
  Array hidden;                   // [|tokens|, d] final-layer states
};

struct SftItem {
  std::vector<int> prompt;
  std::vector<int> response;  // target tokens, terminated by EOS
};

struct SftConfig {
  double lr = 1e-5;  // paper-scale default; configs override for toy runs
  int steps = 400;
  int batch = 8;
};

class Planner {
 public:
  Planner(PlannerConfig cfg, const TokenVocab* vocab, uint64_t seed);

  const PlannerConfig& config() const { return cfg_; }
  const TokenVocab& vocab() const { return *vocab_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  // --- training graph ---
  struct TapeOut {
    int logits;  // [L, V]
    int hidden;  // [L, d] post-final-norm states
  };
  TapeOut forward_tape(Tape& tape, const std::vector<int>& tokens) const;

  // Mean cross-entropy (nats/token) over response positions; adds the node
  // to the tape.
  int sft_loss_tape(Tape& tape, const SftItem& item) const;

  // Differentiable projector over a hidden-state node.
  int project_latent_tape(Tape& tape, int hidden_node) const;

  // --- incremental inference (no gradients) ---
  struct KvCache {
    int len = 0;
    std::vector<Array> k, v;  // per block, [capacity, d]
    int capacity = 0;
  };
  KvCache make_cache(int capacity) const;

  // Feeds one token at position cache.len. Optional outputs: final hidden
  // row [1,d] and next-token logits [1,V].
  void feed(KvCache& cache, int token, Array* hidden_out,
            Array* logits_out) const;

  // Nucleus sampling after the prompt. Stored logprobs are under the model
  // distribution (untempered); temperature and top-p shape only the draw.
  SampleResult sample(const std::vector<int>& prompt, const DecodeConfig& dec,
                      Rng& rng) const;

  // Teacher-forced per-token logprobs of a given response.
  std::vector<double> sequence_logprobs(const std::vector<int>& prompt,
                                        const std::vector<int>& response) const;

  // Final-layer states for the response positions of prompt+response.
  Array response_hidden(const std::vector<int>& prompt,
                        const std::vector<int>& response) const;

  // Cross-attention pooling of response hidden states with the learned
  // queries -> [n_queries, d]. Throws on an empty hidden sequence.
  LatentPlan project_latent(const Array& hidden) const;

  static Array pool_plan(const LatentPlan& plan);  // mean over queries [1,d]

 private:
  void init_params(uint64_t seed);
  Array causal_mask(int64_t len) const;

  PlannerConfig cfg_;
  const TokenVocab* vocab_;
  ParamStore params_;
};

struct SftLogEntry {
  int step;
  double loss;
};

// Teacher-forced cold start; returns the per-step loss curve.
std::vector<SftLogEntry> sft_cold_start(Planner& planner,
                                        const std::vector<SftItem>& data,
                                        const SftConfig& cfg);

}  // namespace takt
