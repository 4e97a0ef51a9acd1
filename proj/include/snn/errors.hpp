#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace snn {

// One knowledge-base invariant violation. Zero fields in the location mean
// "not applicable".
struct Violation {
  std::string code;
  int disease = 0;
  int symptom = 0;
  int indicator = 0;
  int line = 0;
  std::string message;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

// Every agreement is zero; there is no meaningful argmax.
class NoSignal : public Error {
 public:
  NoSignal() : Error("no signal") {}
};

class VersionConflict : public Error {
 public:
  VersionConflict(unsigned long long expected, unsigned long long current)
      : Error("version conflict: expected " + std::to_string(expected) + ", current " +
              std::to_string(current)),
        current_(current) {}
  unsigned long long current() const { return current_; }

 private:
  unsigned long long current_;
};

class StorageError : public Error {
 public:
  using Error::Error;
};

}  // namespace snn
