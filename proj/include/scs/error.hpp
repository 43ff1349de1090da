#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace scs {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DuplicatePath : public Error {
 public:
  explicit DuplicatePath(const std::string& path)
      : Error("duplicate path in shard: " + path) {}
};

class EmptyIdentity : public Error {
 public:
  EmptyIdentity() : Error("shard repo_id and revision_id must be non-empty") {}
};

class UnsupportedLanguage : public Error {
 public:
  using Error::Error;
};

class CorruptShard : public Error {
 public:
  using Error::Error;
};

class VersionMismatch : public Error {
 public:
  explicit VersionMismatch(std::uint32_t found)
      : Error("unsupported shard format version " + std::to_string(found)),
        found_(found) {}
  std::uint32_t found() const { return found_; }

 private:
  std::uint32_t found_;
};

// Query syntax error; position is a byte offset into the query text.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& message)
      : Error(message + " (at byte " + std::to_string(position) + ")"),
        position_(position),
        detail_(message) {}
  std::size_t position() const { return position_; }
  const std::string& detail() const { return detail_; }

 private:
  std::size_t position_;
  std::string detail_;
};

class MissingFile : public Error {
 public:
  using Error::Error;
};

class ClientUnreachable : public Error {
 public:
  using Error::Error;
};

// The server refused a query as malformed; indicates a generator bug.
class QueryRejected : public Error {
 public:
  using Error::Error;
};

class AdapterFailure : public Error {
 public:
  using Error::Error;
};

// A repo: filter names a repository with no loaded shard.
class UnknownRepo : public Error {
 public:
  explicit UnknownRepo(const std::string& repo) : Error("unknown repo: " + repo), repo_(repo) {}
  const std::string& repo() const { return repo_; }

 private:
  std::string repo_;
};

}  // namespace scs
