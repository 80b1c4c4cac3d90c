// Token vocabulary for the planner: structural tags, trajectory punctuation,
// coordinate-bin tokens with three-decimal surfaces, option letters and a
// small word list. Ids are dense and stable across save/load (layout is a
// pure function of the bin count).
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "takt/geometry.hpp"

namespace takt {

class TokenVocab {
 public:
  explicit TokenVocab(int bins = 64);

  int size() const { return static_cast<int>(surfaces_.size()); }
  int bins() const { return bins_; }

  // structural ids
  int pad() const { return 0; }
  int bos() const { return 1; }
  int eos() const { return 2; }
  int think_open() const { return 3; }
  int think_close() const { return 4; }
  int answer_open() const { return 5; }
  int answer_close() const { return 6; }
  // trajectory punctuation
  int traj_open() const { return 7; }   // "[("
  int point_sep() const { return 8; }   // "),("
  int traj_close() const { return 9; }  // ")]"
  int comma() const { return 10; }      // ","

  bool is_tag(int id) const {
    return id >= think_open() && id <= answer_close();
  }
  bool is_structural(int id) const { return id <= eos(); }

  int bin_token(int bin) const;
  bool is_bin(int id) const { return id >= bin0_ && id < bin0_ + bins_; }
  int bin_of_token(int id) const { return id - bin0_; }

  int letter_token(char letter) const;  // 'A'..'D'
  bool is_letter(int id) const { return id >= letter0_ && id < letter0_ + 4; }
  char letter_of_token(int id) const { return static_cast<char>('A' + id - letter0_); }

  // Word lookup by bare text ("grasp"); throws for unknown words.
  int word(const std::string& w) const;
  bool has_word(const std::string& w) const;

  // Coordinate quantization: floor(x * bins) clamped to [0, bins-1], decoded
  // at the bin center (i + 0.5) / bins.
  int quantize(double x) const;
  double bin_center(int bin) const;

  const std::string& surface(int id) const;

  // Concatenates surfaces; PAD/BOS/EOS render as empty strings.
  std::string detokenize(const std::vector<int>& ids) const;

  // Greedy longest-match over token surfaces. Returns false if the text is
  // not exactly a concatenation of surfaces (canonical renderings always are).
  bool tokenize(const std::string& text, std::vector<int>& out) const;

  // Answer-span tokens for a trajectory quantized to bins:
  // [( x , y ),( x , y ) ... )]
  std::vector<int> render_trajectory(const Trajectory& t) const;

 private:
  int bins_;
  int bin0_;
  int letter0_;
  int word0_;
  std::vector<std::string> surfaces_;
  std::vector<std::string> word_list_;
};

// Payload of a parsed planner response.
struct ParsedResponse {
  bool format_ok = false;
  enum class Kind { kInvalid, kTrajectory, kOption } kind = Kind::kInvalid;
  Trajectory trajectory;  // exactly K in-range points when kind == kTrajectory
  char option = '?';
  std::string think_text;
  std::string answer_text;
};

// Token-level grammar check plus payload decoding. A trajectory payload is
// valid iff it has exactly k_points points (bin centers are in range by
// construction). Invalid input never throws; it yields an invalid payload.
ParsedResponse parse_response(const TokenVocab& vocab,
                              const std::vector<int>& tokens, int k_points);

}  // namespace takt
