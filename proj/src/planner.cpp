#include "takt/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "takt/kernels.hpp"
#include "takt/rowmath.hpp"

namespace takt {

namespace {
constexpr double kMaskValue = -1e30;
}

void DecodeConfig::validate() const {
  if (temperature <= 0.0 && !greedy)
    throw std::invalid_argument("DecodeConfig: temperature must be > 0");
  if (top_p <= 0.0 || top_p > 1.0)
    throw std::invalid_argument("DecodeConfig: top_p must be in (0, 1]");
  if (max_len < 8) throw std::invalid_argument("DecodeConfig: max_len must be >= 8");
}

Planner::Planner(PlannerConfig cfg, const TokenVocab* vocab, uint64_t seed)
    : cfg_(cfg), vocab_(vocab) {
  if (cfg_.d_model % cfg_.n_heads != 0)
    throw std::invalid_argument("Planner: d_model must be divisible by n_heads");
  init_params(seed);
}

void Planner::init_params(uint64_t seed) {
  Rng rng(mix_seed(seed, 0x706c616e6e65ULL));
  const int d = cfg_.d_model;
  const int v = vocab_->size();
  const double s = cfg_.init_scale;
  auto randn = [&rng, s](std::vector<int64_t> shape) {
    return ParamStore::randn(std::move(shape), s, rng);
  };
  params_.add("tok_emb", randn({v, d}));
  params_.add("pos_emb", randn({cfg_.max_len, d}));
  for (int b = 0; b < cfg_.n_blocks; ++b) {
    const std::string p = "blk" + std::to_string(b) + ".";
    params_.add(p + "ln1.g", Array::full({1, d}, 1.0));
    params_.add(p + "ln1.b", Array::zeros({1, d}));
    params_.add(p + "wqkv", randn({d, 3 * d}));
    params_.add(p + "bqkv", Array::zeros({1, 3 * d}));
    params_.add(p + "wproj", randn({d, d}));
    params_.add(p + "bproj", Array::zeros({1, d}));
    params_.add(p + "ln2.g", Array::full({1, d}, 1.0));
    params_.add(p + "ln2.b", Array::zeros({1, d}));
    params_.add(p + "wff1", randn({d, cfg_.d_ffn}));
    params_.add(p + "bff1", Array::zeros({1, cfg_.d_ffn}));
    params_.add(p + "wff2", randn({cfg_.d_ffn, d}));
    params_.add(p + "bff2", Array::zeros({1, d}));
  }
  params_.add("lnf.g", Array::full({1, d}, 1.0));
  params_.add("lnf.b", Array::zeros({1, d}));
  params_.add("wout", randn({d, v}));
  params_.add("bout", Array::zeros({1, v}));
  params_.add("proj.queries", randn({cfg_.n_queries, d}));
  params_.add("proj.wk", randn({d, d}));
  params_.add("proj.wv", randn({d, d}));
}

Array Planner::causal_mask(int64_t len) const {
  Array m = Array::zeros({len, len});
  for (int64_t i = 0; i < len; ++i)
    for (int64_t j = i + 1; j < len; ++j) m.at(i, j) = kMaskValue;
  return m;
}

Planner::TapeOut Planner::forward_tape(Tape& tape,
                                       const std::vector<int>& tokens) const {
  if (tokens.empty()) throw std::invalid_argument("forward_tape: empty sequence");
  const int64_t l = static_cast<int64_t>(tokens.size());
  if (l > cfg_.max_len)
    throw std::invalid_argument("forward_tape: sequence exceeds max_len");
  const int d = cfg_.d_model;
  const int heads = cfg_.n_heads;
  const int dk = d / heads;
  const double att_scale = 1.0 / std::sqrt(static_cast<double>(dk));
  auto& ps = const_cast<ParamStore&>(params_);

  std::vector<int64_t> tok_ids(tokens.begin(), tokens.end());
  std::vector<int64_t> pos_ids(static_cast<size_t>(l));
  std::iota(pos_ids.begin(), pos_ids.end(), 0);

  int x = tape.add(tape.embed(tape.param(ps, "tok_emb"), tok_ids),
                   tape.embed(tape.param(ps, "pos_emb"), pos_ids));
  const int mask = tape.leaf(causal_mask(l));

  for (int b = 0; b < cfg_.n_blocks; ++b) {
    const std::string p = "blk" + std::to_string(b) + ".";
    int a_in = tape.layer_norm_rows(x, tape.param(ps, p + "ln1.g"),
                                    tape.param(ps, p + "ln1.b"));
    int qkv = tape.add_row_broadcast(
        tape.matmul(a_in, tape.param(ps, p + "wqkv")),
        tape.param(ps, p + "bqkv"));
    int q = tape.slice_cols(qkv, 0, d);
    int k = tape.slice_cols(qkv, d, 2 * d);
    int v = tape.slice_cols(qkv, 2 * d, 3 * d);
    int ctx = -1;
    for (int h = 0; h < heads; ++h) {
      int qh = tape.slice_cols(q, h * dk, (h + 1) * dk);
      int kh = tape.slice_cols(k, h * dk, (h + 1) * dk);
      int vh = tape.slice_cols(v, h * dk, (h + 1) * dk);
      int scores = tape.add(tape.scale(tape.matmul_nt(qh, kh), att_scale), mask);
      int attn = tape.softmax_rows(scores);
      int ctx_h = tape.matmul(attn, vh);
      ctx = (h == 0) ? ctx_h : tape.concat_cols(ctx, ctx_h);
    }
    int attn_out = tape.add_row_broadcast(
        tape.matmul(ctx, tape.param(ps, p + "wproj")),
        tape.param(ps, p + "bproj"));
    x = tape.add(x, attn_out);
    int f_in = tape.layer_norm_rows(x, tape.param(ps, p + "ln2.g"),
                                    tape.param(ps, p + "ln2.b"));
    int ff = tape.add_row_broadcast(
        tape.matmul(tape.tanh_op(tape.add_row_broadcast(
                        tape.matmul(f_in, tape.param(ps, p + "wff1")),
                        tape.param(ps, p + "bff1"))),
                    tape.param(ps, p + "wff2")),
        tape.param(ps, p + "bff2"));
    x = tape.add(x, ff);
  }
  int hidden = tape.layer_norm_rows(x, tape.param(ps, "lnf.g"),
                                    tape.param(ps, "lnf.b"));
  int logits = tape.add_row_broadcast(
      tape.matmul(hidden, tape.param(ps, "wout")), tape.param(ps, "bout"));
  return {logits, hidden};
}

int Planner::sft_loss_tape(Tape& tape, const SftItem& item) const {
  if (item.response.empty())
    throw std::invalid_argument("sft_loss_tape: empty response");
  std::vector<int> seq = item.prompt;
  seq.insert(seq.end(), item.response.begin(), item.response.end());
  TapeOut out = forward_tape(tape, seq);
  const int64_t p0 = static_cast<int64_t>(item.prompt.size());
  const int64_t l = static_cast<int64_t>(seq.size());
  // Row p predicts token p+1: response tokens live at rows [p0-1, l-1).
  int lp = tape.log_softmax_rows(tape.slice_rows(out.logits, p0 - 1, l - 1));
  std::vector<int64_t> targets(item.response.begin(), item.response.end());
  int picked = tape.pick_rows(lp, std::move(targets));
  return tape.scale(tape.mean(picked), -1.0);
}

int Planner::project_latent_tape(Tape& tape, int hidden_node) const {
  if (tape.val(hidden_node).rows() < 1)
    throw std::invalid_argument("project_latent: empty hidden sequence");
  auto& ps = const_cast<ParamStore&>(params_);
  const double s = 1.0 / std::sqrt(static_cast<double>(cfg_.d_model));
  int keys = tape.matmul(hidden_node, tape.param(ps, "proj.wk"));
  int vals = tape.matmul(hidden_node, tape.param(ps, "proj.wv"));
  int scores = tape.scale(tape.matmul_nt(tape.param(ps, "proj.queries"), keys), s);
  return tape.matmul(tape.softmax_rows(scores), vals);
}

// ---------------------------------------------------------------------------
// incremental inference
// ---------------------------------------------------------------------------

Planner::KvCache Planner::make_cache(int capacity) const {
  KvCache c;
  c.capacity = std::min<int>(capacity, cfg_.max_len);
  c.k.resize(static_cast<size_t>(cfg_.n_blocks));
  c.v.resize(static_cast<size_t>(cfg_.n_blocks));
  for (int b = 0; b < cfg_.n_blocks; ++b) {
    c.k[static_cast<size_t>(b)] = Array::zeros({c.capacity, cfg_.d_model});
    c.v[static_cast<size_t>(b)] = Array::zeros({c.capacity, cfg_.d_model});
  }
  return c;
}

void Planner::feed(KvCache& cache, int token, Array* hidden_out,
                   Array* logits_out) const {
  if (cache.len >= cache.capacity)
    throw std::invalid_argument("feed: cache capacity exceeded");
  if (token < 0 || token >= vocab_->size())
    throw std::invalid_argument("feed: token id out of vocab");
  const int d = cfg_.d_model;
  const int heads = cfg_.n_heads;
  const int dk = d / heads;
  const double att_scale = 1.0 / std::sqrt(static_cast<double>(dk));
  const int64_t pos = cache.len;

  std::vector<double> x(static_cast<size_t>(d));
  kern::add(x.data(), params_.value("tok_emb").data.data() + token * d,
            params_.value("pos_emb").data.data() + pos * d, d);

  std::vector<double> a(static_cast<size_t>(d));
  std::vector<double> qkv(static_cast<size_t>(3 * d));
  std::vector<double> ctx(static_cast<size_t>(d));
  std::vector<double> tmp(static_cast<size_t>(d));
  std::vector<double> scores(static_cast<size_t>(pos + 1));
  std::vector<double> ffn(static_cast<size_t>(cfg_.d_ffn));

  for (int b = 0; b < cfg_.n_blocks; ++b) {
    const std::string p = "blk" + std::to_string(b) + ".";
    const Array& ln1g = params_.value(p + "ln1.g");
    const Array& ln1b = params_.value(p + "ln1.b");
    row::layer_norm(a.data(), x.data(), ln1g.data.data(), ln1b.data.data(), d,
                    1e-5);
    kern::matmul(qkv.data(), a.data(), params_.value(p + "wqkv").data.data(), 1,
                 d, 3 * d);
    kern::add(qkv.data(), qkv.data(), params_.value(p + "bqkv").data.data(),
              3 * d);

    Array& kc = cache.k[static_cast<size_t>(b)];
    Array& vc = cache.v[static_cast<size_t>(b)];
    std::copy(qkv.begin() + d, qkv.begin() + 2 * d,
              kc.data.begin() + pos * d);
    std::copy(qkv.begin() + 2 * d, qkv.end(), vc.data.begin() + pos * d);

    for (int h = 0; h < heads; ++h) {
      const double* qh = qkv.data() + h * dk;
      for (int64_t j = 0; j <= pos; ++j) {
        const double* kj = kc.data.data() + j * d + h * dk;
        double dot = 0.0;
        for (int t = 0; t < dk; ++t) dot = dot + qh[t] * kj[t];
        scores[static_cast<size_t>(j)] = dot * att_scale;
      }
      row::softmax(scores.data(), scores.data(), pos + 1);
      double* ch = ctx.data() + h * dk;
      for (int t = 0; t < dk; ++t) ch[t] = 0.0;
      for (int64_t j = 0; j <= pos; ++j) {
        const double w = scores[static_cast<size_t>(j)];
        const double* vj = vc.data.data() + j * d + h * dk;
        for (int t = 0; t < dk; ++t) ch[t] = ch[t] + w * vj[t];
      }
    }
    kern::matmul(tmp.data(), ctx.data(), params_.value(p + "wproj").data.data(),
                 1, d, d);
    kern::add(tmp.data(), tmp.data(), params_.value(p + "bproj").data.data(), d);
    kern::add(x.data(), x.data(), tmp.data(), d);

    row::layer_norm(a.data(), x.data(), params_.value(p + "ln2.g").data.data(),
                    params_.value(p + "ln2.b").data.data(), d, 1e-5);
    kern::matmul(ffn.data(), a.data(), params_.value(p + "wff1").data.data(), 1,
                 d, cfg_.d_ffn);
    kern::add(ffn.data(), ffn.data(), params_.value(p + "bff1").data.data(),
              cfg_.d_ffn);
    row::tanh_vec(ffn.data(), ffn.data(), cfg_.d_ffn);
    kern::matmul(tmp.data(), ffn.data(), params_.value(p + "wff2").data.data(),
                 1, cfg_.d_ffn, d);
    kern::add(tmp.data(), tmp.data(), params_.value(p + "bff2").data.data(), d);
    kern::add(x.data(), x.data(), tmp.data(), d);
  }

  std::vector<double> h(static_cast<size_t>(d));
  row::layer_norm(h.data(), x.data(), params_.value("lnf.g").data.data(),
                  params_.value("lnf.b").data.data(), d, 1e-5);
  if (hidden_out) {
    *hidden_out = Array::zeros({1, d});
    std::copy(h.begin(), h.end(), hidden_out->data.begin());
  }
  if (logits_out) {
    const int v = vocab_->size();
    *logits_out = Array::zeros({1, v});
    kern::matmul(logits_out->data.data(), h.data(),
                 params_.value("wout").data.data(), 1, d, v);
    kern::add(logits_out->data.data(), logits_out->data.data(),
              params_.value("bout").data.data(), v);
  }
  ++cache.len;
}

namespace {

int argmax_row(const Array& logits) {
  int best = 0;
  for (int64_t i = 1; i < logits.size(); ++i)
    if (logits.data[static_cast<size_t>(i)] > logits.data[static_cast<size_t>(best)])
      best = static_cast<int>(i);
  return best;
}

// Nucleus draw: smallest probability prefix (sorted descending, ties by id)
// whose mass reaches top_p, renormalized.
int nucleus_draw(const Array& logits, double temperature, double top_p,
                 Rng& rng) {
  const int64_t v = logits.size();
  std::vector<double> probs(static_cast<size_t>(v));
  std::vector<double> scaled(static_cast<size_t>(v));
  const double inv_t = 1.0 / temperature;
  for (int64_t i = 0; i < v; ++i)
    scaled[static_cast<size_t>(i)] = logits.data[static_cast<size_t>(i)] * inv_t;
  row::softmax(probs.data(), scaled.data(), v);

  std::vector<int> order(static_cast<size_t>(v));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&probs](int a, int b) {
    if (probs[static_cast<size_t>(a)] != probs[static_cast<size_t>(b)])
      return probs[static_cast<size_t>(a)] > probs[static_cast<size_t>(b)];
    return a < b;
  });

  double mass = 0.0;
  size_t keep = 0;
  while (keep < order.size()) {
    mass += probs[static_cast<size_t>(order[keep])];
    ++keep;
    if (mass >= top_p) break;
  }
  const double u = rng.uniform() * mass;
  double acc = 0.0;
  for (size_t i = 0; i < keep; ++i) {
    acc += probs[static_cast<size_t>(order[i])];
    if (u < acc) return order[i];
  }
  return order[keep - 1];
}

}  // namespace

SampleResult Planner::sample(const std::vector<int>& prompt,
                             const DecodeConfig& dec, Rng& rng) const {
  if (prompt.empty()) throw std::invalid_argument("sample: empty prompt");
  dec.validate();
  const int cap = std::min<int>(dec.max_len,
                                cfg_.max_len - static_cast<int>(prompt.size()));
  if (cap <= 0) throw std::invalid_argument("sample: prompt leaves no room");

  KvCache cache = make_cache(static_cast<int>(prompt.size()) + cap);
  Array logits;
  for (size_t i = 0; i + 1 < prompt.size(); ++i)
    feed(cache, prompt[i], nullptr, nullptr);
  feed(cache, prompt.back(), nullptr, &logits);

  SampleResult out;
  const int d = cfg_.d_model;
  std::vector<Array> rows;
  std::vector<double> lp_row(static_cast<size_t>(vocab_->size()));
  while (static_cast<int>(out.tokens.size()) < cap) {
    row::log_softmax(lp_row.data(), logits.data.data(), vocab_->size());
    const int tok = dec.greedy ? argmax_row(logits)
                               : nucleus_draw(logits, dec.temperature,
                                              dec.top_p, rng);
    out.tokens.push_back(tok);
    out.logprobs.push_back(lp_row[static_cast<size_t>(tok)]);
    Array hidden;
    const bool last =
        (tok == vocab_->eos()) || (static_cast<int>(out.tokens.size()) == cap);
    feed(cache, tok, &hidden, last ? nullptr : &logits);
    rows.push_back(std::move(hidden));
    if (tok == vocab_->eos()) break;
  }

  out.hidden = Array::zeros({static_cast<int64_t>(rows.size()), d});
  for (size_t i = 0; i < rows.size(); ++i)
    std::copy(rows[i].data.begin(), rows[i].data.end(),
              out.hidden.data.begin() + static_cast<int64_t>(i) * d);
  return out;
}

std::vector<double> Planner::sequence_logprobs(
    const std::vector<int>& prompt, const std::vector<int>& response) const {
  if (prompt.empty() || response.empty())
    throw std::invalid_argument("sequence_logprobs: empty input");
  KvCache cache =
      make_cache(static_cast<int>(prompt.size() + response.size()));
  Array logits;
  for (size_t i = 0; i + 1 < prompt.size(); ++i)
    feed(cache, prompt[i], nullptr, nullptr);
  feed(cache, prompt.back(), nullptr, &logits);

  std::vector<double> out;
  std::vector<double> lp_row(static_cast<size_t>(vocab_->size()));
  for (size_t i = 0; i < response.size(); ++i) {
    row::log_softmax(lp_row.data(), logits.data.data(), vocab_->size());
    const int tok = response[i];
    if (tok < 0 || tok >= vocab_->size())
      throw std::invalid_argument("sequence_logprobs: token id out of vocab");
    out.push_back(lp_row[static_cast<size_t>(tok)]);
    const bool last = (i + 1 == response.size());
    feed(cache, tok, nullptr, last ? nullptr : &logits);
  }
  return out;
}

Array Planner::response_hidden(const std::vector<int>& prompt,
                               const std::vector<int>& response) const {
  if (prompt.empty() || response.empty())
    throw std::invalid_argument("response_hidden: empty input");
  KvCache cache =
      make_cache(static_cast<int>(prompt.size() + response.size()));
  for (int tok : prompt) feed(cache, tok, nullptr, nullptr);
  const int d = cfg_.d_model;
  Array out = Array::zeros({static_cast<int64_t>(response.size()), d});
  Array hidden;
  for (size_t i = 0; i < response.size(); ++i) {
    feed(cache, response[i], &hidden, nullptr);
    std::copy(hidden.data.begin(), hidden.data.end(),
              out.data.begin() + static_cast<int64_t>(i) * d);
  }
  return out;
}

LatentPlan Planner::project_latent(const Array& hidden) const {
  if (hidden.rows() < 1)
    throw std::invalid_argument("project_latent: empty hidden sequence");
  const int d = cfg_.d_model;
  const int q = cfg_.n_queries;
  const int64_t r = hidden.rows();
  const double s = 1.0 / std::sqrt(static_cast<double>(d));

  Array keys = Array::zeros({r, d});
  Array vals = Array::zeros({r, d});
  kern::matmul(keys.data.data(), hidden.data.data(),
               params_.value("proj.wk").data.data(), r, d, d);
  kern::matmul(vals.data.data(), hidden.data.data(),
               params_.value("proj.wv").data.data(), r, d, d);

  Array keys_t = Array::zeros({d, r});
  kern::transpose(keys_t.data.data(), keys.data.data(), r, d);
  Array scores = Array::zeros({q, r});
  kern::matmul(scores.data.data(), params_.value("proj.queries").data.data(),
               keys_t.data.data(), q, d, r);
  kern::scale(scores.data.data(), scores.data.data(), s, scores.size());
  for (int i = 0; i < q; ++i)
    row::softmax(scores.data.data() + static_cast<int64_t>(i) * r,
                 scores.data.data() + static_cast<int64_t>(i) * r, r);

  Array plan = Array::zeros({q, d});
  kern::matmul(plan.data.data(), scores.data.data(), vals.data.data(), q, r, d);
  return plan;
}

Array Planner::pool_plan(const LatentPlan& plan) {
  const int64_t q = plan.rows();
  const int64_t d = plan.cols();
  Array out = Array::zeros({1, d});
  for (int64_t i = 0; i < q; ++i)
    kern::axpy(out.data.data(), 1.0, plan.data.data() + i * d, d);
  kern::scale(out.data.data(), out.data.data(), 1.0 / static_cast<double>(q), d);
  return out;
}

std::vector<SftLogEntry> sft_cold_start(Planner& planner,
                                        const std::vector<SftItem>& data,
                                        const SftConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("sft_cold_start: empty dataset");
  std::vector<SftLogEntry> log;
  ParamStore& ps = planner.params();
  size_t cursor = 0;
  for (int step = 0; step < cfg.steps; ++step) {
    double loss_sum = 0.0;
    const int batch = std::max(1, cfg.batch);
    for (int b = 0; b < batch; ++b) {
      const SftItem& item = data[cursor];
      cursor = (cursor + 1) % data.size();
      Tape tape;
      const int loss = planner.sft_loss_tape(tape, item);
      const int scaled = tape.scale(loss, 1.0 / batch);
      tape.backward(scaled);
      tape.flush_param_grads();
      loss_sum += tape.val(loss).data[0];
    }
    ps.adam_step(cfg.lr);
    log.push_back({step, loss_sum / batch});
  }
  return log;
}

}  // namespace takt
