#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "twolink/integer.hpp"

namespace twolink {

// Letters are signed 1-based generator indices: +k is g_k, -k is g_k^-1.
using Word = std::vector<int>;

Word free_reduce(const Word& w);
Word cyclic_reduce(const Word& w);
Word inverse(const Word& w);
Word concat(const Word& a, const Word& b);
Word commutator(const Word& u, const Word& v);
Word power(const Word& w, int k);
// Least word among all rotations of w and of w^-1 (w cyclically reduced).
Word canonical_cyclic(const Word& w);

struct GroupPresentation {
  std::vector<std::string> generators;
  std::vector<Word> relators;

  std::size_t rank() const { return generators.size(); }
  friend bool operator==(const GroupPresentation&, const GroupPresentation&) = default;
};

// "gens: x,y; rels: [x,y], x*y^-1" (see README for the full grammar).
GroupPresentation parse_presentation(std::string_view text);
std::string to_string(const GroupPresentation& p);
std::string word_to_string(const Word& w, const std::vector<std::string>& names);
Word parse_word(std::string_view text, const std::vector<std::string>& names);

void validate(const GroupPresentation& p);

struct AbelianInvariants {
  std::size_t free_rank = 0;
  std::vector<Integer> torsion;  // invariant factors > 1
  friend bool operator==(const AbelianInvariants&, const AbelianInvariants&) = default;
};

// Relator exponent-sum matrix, one row per relator.
IntMatrix exponent_sum_matrix(const GroupPresentation& p);
AbelianInvariants abelianization(const GroupPresentation& p);

GroupPresentation quotient_by_normal_closure(const GroupPresentation& p, const std::vector<Word>& words);

struct TietzeMove {
  enum class Kind { replace_relator, remove_relator, eliminate_generator };
  Kind kind;
  std::size_t relator = 0;    // index into the relator list at the time of the move
  std::size_t generator = 0;  // 0-based, eliminate_generator only
  Word word;                  // new relator (replace) or defining word (eliminate)
  friend bool operator==(const TietzeMove&, const TietzeMove&) = default;
};

struct TietzeLog {
  std::vector<TietzeMove> moves;
  bool budget_exhausted = false;
};

struct TietzeOptions {
  std::size_t move_budget = 10000;
  std::size_t max_relator_length = 16;
};

struct TietzeResult {
  GroupPresentation presentation;
  TietzeLog log;
};

TietzeResult tietze_simplify(const GroupPresentation& p, const TietzeOptions& opts = {});
// Applies a single move, validating that it is a legal Tietze step on p.
GroupPresentation apply_move(const GroupPresentation& p, const TietzeMove& m);
GroupPresentation replay(const GroupPresentation& source, const TietzeLog& log);

std::optional<std::size_t> recognize_free(const GroupPresentation& p, const TietzeOptions& opts = {});

struct SurfaceRecognition {
  bool recognized = false;
  // Generator index (0-based) assigned to a_1, b_1, ..., a_g, b_g and the orientation sign.
  std::vector<std::pair<std::size_t, int>> assignment;
  bool inverted = false;
  std::size_t rotation = 0;
};

SurfaceRecognition recognize_surface(const GroupPresentation& p, std::size_t g,
                                     const TietzeOptions& opts = {}, std::size_t max_genus = 4);

// Product of commutators [a_1,b_1]...[a_g,b_g] in generators numbered first_index...
Word surface_relator(std::size_t g, int first_index = 1);

GroupPresentation pi1_Ng(std::size_t g);

// First unused variant of name: a trailing number is bumped (a1 -> a2), otherwise a prime is appended.
std::string fresh_name(const std::string& name, const std::set<std::string>& taken);

GroupPresentation free_product(const GroupPresentation& a, const GroupPresentation& b);
GroupPresentation svk_glue(const GroupPresentation& p1, const GroupPresentation& p2,
                           const std::vector<std::pair<Word, Word>>& peripheral_pairs);

// Renumber the letters of a word from P2 into free_product(P1, P2).
Word shift_word(const Word& w, int offset);

}  // namespace twolink
