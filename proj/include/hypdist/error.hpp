// Exception types shared by every hypdist module.

#ifndef HYPDIST_ERROR_HPP_
#define HYPDIST_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace hypdist {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A symbol that is not a letter of the generating set in use.
class UnknownLetter : public Error {
 public:
  explicit UnknownLetter(const std::string& symbol)
      : Error("unknown letter '" + symbol + "'"), symbol_(symbol) {}
  const std::string& symbol() const noexcept { return symbol_; }

 private:
  std::string symbol_;
};

// Malformed group data: bad table, bad relator, bad generating set.
class InvalidPresentation : public Error {
 public:
  using Error::Error;
};

// Parse failure in a group or automaton file; carries the 1-based line.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

// No word of length <= cap represents the element.
class CapExceeded : public Error {
 public:
  explicit CapExceeded(int cap)
      : Error("word length exceeds cap " + std::to_string(cap)), cap_(cap) {}
  int cap() const noexcept { return cap_; }

 private:
  int cap_;
};

// An enumeration or search outgrew its configured element budget.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

class StabilizationFailure : public Error {
 public:
  StabilizationFailure(const std::string& what, int first_mismatch)
      : Error(what), first_mismatch_(first_mismatch) {}
  // Sphere radius of the first path-count mismatch, or -1 if the failure
  // was a transition conflict found before validation.
  int first_mismatch() const noexcept { return first_mismatch_; }

 private:
  int first_mismatch_;
};

class EmptySphere : public Error {
 public:
  explicit EmptySphere(int n)
      : Error("sphere of radius " + std::to_string(n) + " is empty") {}
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace hypdist

#endif  // HYPDIST_ERROR_HPP_
