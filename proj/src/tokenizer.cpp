#include "scs/tokenizer.hpp"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <atomic>

#include <unistd.h>

#include <spdlog/spdlog.h>

#include "scs/error.hpp"
#include "scs/text.hpp"

namespace scs {

std::size_t DefaultTokenizer::count(std::string_view text) const {
  std::size_t tokens = 0;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (is_space(c)) {
      ++i;
    } else if (is_ident_char(c)) {
      while (i < n && is_ident_char(static_cast<unsigned char>(text[i]))) ++i;
      ++tokens;
    } else {
      std::size_t run = 0;
      while (i < n && !is_space(static_cast<unsigned char>(text[i])) &&
             !is_ident_char(static_cast<unsigned char>(text[i]))) {
        ++i;
        ++run;
      }
      tokens += (run + 1) / 2;
    }
  }
  return tokens;
}

ExternalTokenizer::ExternalTokenizer(std::string command) : command_(std::move(command)) {}

std::size_t ExternalTokenizer::count_strict(std::string_view text) const {
  static std::atomic<unsigned> serial{0};
  const auto input = std::filesystem::temp_directory_path() /
                     ("scs-tok-" + std::to_string(::getpid()) + "-" + std::to_string(serial++));
  {
    std::ofstream out(input, std::ios::binary);
    if (!out) throw AdapterFailure("cannot stage tokenizer input");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
  }
  const std::string cmd = command_ + " < '" + input.string() + "'";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) {
    std::filesystem::remove(input);
    throw AdapterFailure("cannot run tokenizer command: " + command_);
  }
  std::string output;
  std::array<char, 256> buf{};
  while (auto got = std::fread(buf.data(), 1, buf.size(), pipe)) output.append(buf.data(), got);
  const int status = ::pclose(pipe);
  std::filesystem::remove(input);
  if (status != 0) throw AdapterFailure("tokenizer command failed: " + command_);
  std::size_t pos = 0;
  unsigned long long value = 0;
  try {
    value = std::stoull(output, &pos);
  } catch (const std::exception&) {
    throw AdapterFailure("tokenizer command printed no count: " + command_);
  }
  return static_cast<std::size_t>(value);
}

std::size_t ExternalTokenizer::count(std::string_view text) const {
  try {
    return count_strict(text);
  } catch (const AdapterFailure& e) {
    static std::mutex mu;
    std::lock_guard lock(mu);
    if (!warned_) {
      spdlog::warn("{}; falling back to the default token counter", e.what());
      warned_ = true;
    }
    return fallback_.count(text);
  }
}

std::size_t count_tokens(std::string_view text, const Tokenizer& tokenizer) {
  return tokenizer.count(text);
}

std::unique_ptr<Tokenizer> make_tokenizer(const std::string& external_command) {
  if (external_command.empty()) return std::make_unique<DefaultTokenizer>();
  return std::make_unique<ExternalTokenizer>(external_command);
}

}  // namespace scs
