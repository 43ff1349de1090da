#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

namespace scs {

class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::size_t count(std::string_view text) const = 0;
};

// Deterministic approximation of a subword tokenizer: each maximal run of
// identifier characters [A-Za-z0-9_] is one token, each maximal run of other
// non-whitespace bytes is ceil(len / 2) tokens.
class DefaultTokenizer final : public Tokenizer {
 public:
  std::size_t count(std::string_view text) const override;
};

// Runs `command` with the text on stdin and reads a token count from its
// stdout. On any failure it logs a warning once and falls back to the
// default counter.
class ExternalTokenizer final : public Tokenizer {
 public:
  explicit ExternalTokenizer(std::string command);
  std::size_t count(std::string_view text) const override;

  // Throws AdapterFailure instead of falling back.
  std::size_t count_strict(std::string_view text) const;

 private:
  std::string command_;
  DefaultTokenizer fallback_;
  mutable bool warned_ = false;
};

std::size_t count_tokens(std::string_view text, const Tokenizer& tokenizer);

// Tokenizer for an optional external command; empty -> DefaultTokenizer.
std::unique_ptr<Tokenizer> make_tokenizer(const std::string& external_command);

}  // namespace scs
