#include "takt/vocab.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <stdexcept>

namespace takt {

namespace {

// Bare word list; rendered with a leading space. Covers instructions, prompt
// structure markers and enough filler for templated reasoning text.
const char* kWords[] = {
    "move",    "the",     "red",     "blue",    "block",   "to",
    "tray",    "goal",    "object",  "gripper", "target",  "scene",
    "then",    "now",     "holding", "free",    "plan",    "task",
    "reach",   "grasp",   "carry",   "release", "place",   "pick",
    "go",      "approach", "open",   "close",   "drop",    "dropped",
    "recover", "retry",   "again",   "adjust",  "check",   "first",
    "next",    "done",    "start",   "end",     "path",    "step",
    "point",   "line",    "left",    "right",   "up",      "down",
    "near",    "far",     "wait",    "see",     "let",     "us",
    "break",   "it",      "hmm",     "okay",    "so",      "route",
    "toward",  "from",    "back",    "lift",
};

}  // namespace

TokenVocab::TokenVocab(int bins) : bins_(bins) {
  if (bins < 2 || bins > 512)
    throw std::invalid_argument("TokenVocab: bins out of range");
  surfaces_ = {"", "", "", "<think>", "</think>", "<answer>", "</answer>",
               "[(", "),(", ")]", ","};
  bin0_ = static_cast<int>(surfaces_.size());
  char buf[16];
  for (int i = 0; i < bins_; ++i) {
    std::snprintf(buf, sizeof(buf), "%.3f", bin_center(i));
    surfaces_.emplace_back(buf);
  }
  letter0_ = static_cast<int>(surfaces_.size());
  for (char c = 'A'; c <= 'D'; ++c) surfaces_.push_back(std::string(" ") + c);
  word0_ = static_cast<int>(surfaces_.size());
  for (const char* w : kWords) {
    word_list_.emplace_back(w);
    surfaces_.push_back(std::string(" ") + w);
  }
  // Three-decimal bin surfaces must stay distinct or detokenization would be
  // ambiguous.
  std::set<std::string> uniq(surfaces_.begin() + bin0_,
                             surfaces_.begin() + bin0_ + bins_);
  if (static_cast<int>(uniq.size()) != bins_)
    throw std::invalid_argument("TokenVocab: bin surfaces collide at 3 decimals");
}

int TokenVocab::bin_token(int bin) const {
  if (bin < 0 || bin >= bins_) throw std::invalid_argument("bin_token: out of range");
  return bin0_ + bin;
}

int TokenVocab::letter_token(char letter) const {
  if (letter < 'A' || letter > 'D')
    throw std::invalid_argument("letter_token: out of range");
  return letter0_ + (letter - 'A');
}

int TokenVocab::word(const std::string& w) const {
  for (size_t i = 0; i < word_list_.size(); ++i)
    if (word_list_[i] == w) return word0_ + static_cast<int>(i);
  throw std::invalid_argument("TokenVocab: unknown word '" + w + "'");
}

bool TokenVocab::has_word(const std::string& w) const {
  return std::find(word_list_.begin(), word_list_.end(), w) != word_list_.end();
}

int TokenVocab::quantize(double x) const {
  int b = static_cast<int>(std::floor(x * bins_));
  if (b < 0) b = 0;
  if (b >= bins_) b = bins_ - 1;
  return b;
}

double TokenVocab::bin_center(int bin) const {
  return (static_cast<double>(bin) + 0.5) / static_cast<double>(bins_);
}

const std::string& TokenVocab::surface(int id) const {
  if (id < 0 || id >= size()) throw std::invalid_argument("surface: bad token id");
  return surfaces_[static_cast<size_t>(id)];
}

std::string TokenVocab::detokenize(const std::vector<int>& ids) const {
  std::string out;
  for (int id : ids) out += surface(id);
  return out;
}

bool TokenVocab::tokenize(const std::string& text, std::vector<int>& out) const {
  out.clear();
  size_t pos = 0;
  while (pos < text.size()) {
    int best = -1;
    size_t best_len = 0;
    for (int id = 3; id < size(); ++id) {  // structural ids have empty surfaces
      const std::string& s = surfaces_[static_cast<size_t>(id)];
      if (s.size() > best_len && text.compare(pos, s.size(), s) == 0) {
        best = id;
        best_len = s.size();
      }
    }
    if (best < 0) return false;
    out.push_back(best);
    pos += best_len;
  }
  return true;
}

std::vector<int> TokenVocab::render_trajectory(const Trajectory& t) const {
  std::vector<int> out;
  out.push_back(traj_open());
  for (int64_t i = 0; i < t.size(); ++i) {
    if (i) out.push_back(point_sep());
    out.push_back(bin_token(quantize(t.points[static_cast<size_t>(i)].x)));
    out.push_back(comma());
    out.push_back(bin_token(quantize(t.points[static_cast<size_t>(i)].y)));
  }
  out.push_back(traj_close());
  return out;
}

namespace {

// Decodes an answer span as a trajectory token pattern; returns point count
// or -1 when the pattern does not match.
int decode_trajectory(const TokenVocab& v, const std::vector<int>& span,
                      Trajectory& out) {
  out.points.clear();
  size_t i = 0;
  if (i >= span.size() || span[i] != v.traj_open()) return -1;
  ++i;
  bool first = true;
  while (i < span.size() && span[i] != v.traj_close()) {
    if (!first) {
      if (span[i] != v.point_sep()) return -1;
      ++i;
    }
    if (i + 2 >= span.size()) return -1;
    if (!v.is_bin(span[i]) || span[i + 1] != v.comma() || !v.is_bin(span[i + 2]))
      return -1;
    Point2 p{v.bin_center(v.bin_of_token(span[i])),
             v.bin_center(v.bin_of_token(span[i + 2]))};
    out.points.push_back(p);
    i += 3;
    first = false;
  }
  if (i >= span.size() || span[i] != v.traj_close()) return -1;
  if (i + 1 != span.size()) return -1;
  return static_cast<int>(out.points.size());
}

}  // namespace

ParsedResponse parse_response(const TokenVocab& vocab,
                              const std::vector<int>& tokens, int k_points) {
  ParsedResponse out;

  // Strip one trailing EOS and any PAD after it.
  std::vector<int> body;
  body.reserve(tokens.size());
  size_t end = tokens.size();
  while (end > 0 && tokens[end - 1] == vocab.pad()) --end;
  if (end > 0 && tokens[end - 1] == vocab.eos()) --end;
  for (size_t i = 0; i < end; ++i) body.push_back(tokens[i]);

  // Grammar: <think> content* </think> <answer> content* </answer>, where
  // content excludes tags and structural tokens.
  size_t i = 0;
  auto content_ok = [&vocab](int id) {
    return !vocab.is_tag(id) && !vocab.is_structural(id);
  };
  std::vector<int> think_span, answer_span;
  bool ok = i < body.size() && body[i] == vocab.think_open();
  if (ok) {
    ++i;
    while (i < body.size() && content_ok(body[i])) think_span.push_back(body[i++]);
    ok = i < body.size() && body[i] == vocab.think_close();
  }
  if (ok) {
    ++i;
    ok = i < body.size() && body[i] == vocab.answer_open();
  }
  if (ok) {
    ++i;
    while (i < body.size() && content_ok(body[i])) answer_span.push_back(body[i++]);
    ok = i < body.size() && body[i] == vocab.answer_close();
  }
  if (ok) {
    ++i;
    ok = i == body.size();
  }
  out.format_ok = ok;
  if (!ok) return out;

  out.think_text = vocab.detokenize(think_span);
  out.answer_text = vocab.detokenize(answer_span);

  Trajectory traj;
  const int n = decode_trajectory(vocab, answer_span, traj);
  if (n == k_points) {
    out.kind = ParsedResponse::Kind::kTrajectory;
    out.trajectory = std::move(traj);
  } else if (answer_span.size() == 1 && vocab.is_letter(answer_span[0])) {
    out.kind = ParsedResponse::Kind::kOption;
    out.option = vocab.letter_of_token(answer_span[0]);
  }
  return out;
}

}  // namespace takt
