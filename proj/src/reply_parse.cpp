#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <string>

#include "emogame/prompts.hpp"

namespace emogame {

namespace {

char fold(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

struct Token {
  std::string text;  // case-folded
  std::size_t pos;
};

// Maximal alphanumeric runs, lower-cased.
std::vector<Token> tokenize(std::string_view reply) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < reply.size()) {
    if (!is_word_char(reply[i])) {
      ++i;
      continue;
    }
    Token token{{}, i};
    while (i < reply.size() && is_word_char(reply[i])) token.text.push_back(fold(reply[i++]));
    tokens.push_back(std::move(token));
  }
  return tokens;
}

std::string excerpt(std::string_view reply) {
  constexpr std::size_t kMax = 60;
  std::string out(reply.substr(0, kMax));
  if (reply.size() > kMax) out += "...";
  return out;
}

}  // namespace

Option parse_move(std::string_view reply, const MoveLabels& labels) {
  const char first = fold(labels.first);
  const char second = fold(labels.second);
  // A label only counts as a standalone token, so "I refuse" never reads as F.
  for (const auto& token : tokenize(reply)) {
    if (token.text == "option") continue;
    if (token.text.size() != 1) continue;
    if (token.text[0] == first) return Option::First;
    if (token.text[0] == second) return Option::Second;
  }
  throw Error(ErrorCode::UnparseableMove, "no move label in reply '" + excerpt(reply) + "'");
}

Split parse_split(std::string_view reply, long long total_sum) {
  // First two integers separated by a comma, whitespace tolerated.
  auto read_int = [&](std::size_t& pos, long long& value) -> bool {
    std::size_t start = pos;
    if (start < reply.size() && (reply[start] == '-' || reply[start] == '+')) ++start;
    std::size_t end = start;
    while (end < reply.size() && std::isdigit(static_cast<unsigned char>(reply[end]))) ++end;
    if (end == start) return false;
    const char* begin = reply.data() + pos + (reply[pos] == '+' ? 1 : 0);
    auto [ptr, ec] = std::from_chars(begin, reply.data() + end, value);
    if (ec != std::errc{} || ptr != reply.data() + end) {
      throw Error(ErrorCode::UnparseableSplit, "number out of range in '" + excerpt(reply) + "'");
    }
    pos = end;
    return true;
  };
  auto skip_space = [&](std::size_t& pos) {
    while (pos < reply.size() && std::isspace(static_cast<unsigned char>(reply[pos]))) ++pos;
  };

  for (std::size_t i = 0; i < reply.size(); ++i) {
    const bool sign = (reply[i] == '-' || reply[i] == '+') && i + 1 < reply.size() &&
                      std::isdigit(static_cast<unsigned char>(reply[i + 1]));
    if (!sign && !std::isdigit(static_cast<unsigned char>(reply[i]))) continue;
    if (i > 0 && std::isdigit(static_cast<unsigned char>(reply[i - 1]))) continue;
    std::size_t pos = i;
    long long keep = 0;
    if (!read_int(pos, keep)) continue;
    std::size_t after_first = pos;
    skip_space(pos);
    if (pos < reply.size() && reply[pos] == ',') {
      ++pos;
      skip_space(pos);
      long long give = 0;
      if (pos < reply.size() && read_int(pos, give)) {
        Split split{keep, give};
        validate_split(split, total_sum);
        return split;
      }
    }
    i = after_first - 1;
  }
  throw Error(ErrorCode::UnparseableSplit, "no 'number,number' pair in '" + excerpt(reply) + "'");
}

Decision parse_accept(std::string_view reply) {
  bool accept = false;
  bool reject = false;
  for (const auto& token : tokenize(reply)) {
    if (token.text == "accept" || token.text == "accepted" || token.text == "accepts") accept = true;
    if (token.text == "reject" || token.text == "rejected" || token.text == "rejects") reject = true;
  }
  if (accept == reject) {
    throw Error(ErrorCode::UnparseableDecision,
                std::string(accept ? "both ACCEPT and REJECT" : "neither ACCEPT nor REJECT") +
                    " in '" + excerpt(reply) + "'");
  }
  return accept ? Decision::Accepted : Decision::Rejected;
}

EmotionWord parse_emotion(std::string_view reply, std::span<const std::string_view> allowed_words) {
  for (const auto& token : tokenize(reply)) {
    for (auto word : allowed_words) {
      if (token.text.size() != word.size()) continue;
      if (std::equal(word.begin(), word.end(), token.text.begin(),
                     [](char a, char b) { return fold(a) == b; })) {
        return {std::string(word), false};
      }
    }
  }
  return {"neutral", true};
}

std::string format_split(const Split& split) {
  return std::to_string(split.keep) + "," + std::to_string(split.give);
}

}  // namespace emogame
