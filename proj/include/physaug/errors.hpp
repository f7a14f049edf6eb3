#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace physaug {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InvalidQuaternion : public Error {
 public:
  using Error::Error;
};

/// A structured document is missing a field or holds a value of the wrong type.
class SchemaError : public Error {
 public:
  SchemaError(std::string field, const std::string& what)
      : Error("schema error at '" + field + "': " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Array lengths inside a document or between arguments disagree.
class LengthError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class FrameErrorKind { BadMagic, BadVersion, BadCrc, BadDtype, Truncated, Oversized };

/// Binary frame rejected by a decoder.
class FrameError : public Error {
 public:
  FrameError(FrameErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}
  FrameErrorKind kind() const { return kind_; }

 private:
  FrameErrorKind kind_;
};

}  // namespace physaug
