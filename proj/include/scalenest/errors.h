#ifndef SCALENEST_ERRORS_H_
#define SCALENEST_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scalenest {

// Base of every error raised by the library. The CLI maps subclasses onto
// its documented exit statuses.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A level, index or scale outside the range its owner declares.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Missing or empty input (no records, unreadable stream).
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DuplicateError : public Error {
 public:
  using Error::Error;
};

// Inputs for which a measure is undefined: an all-zero map, a matrix that
// prunes below 2x2, a fill outside the isocline solver's range.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// A null ensemble that needed more redraws than it kept samples.
class PathologicalError : public Error {
 public:
  using Error::Error;
};

}  // namespace scalenest

#endif  // SCALENEST_ERRORS_H_
