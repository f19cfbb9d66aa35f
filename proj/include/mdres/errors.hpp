#pragma once

#include <stdexcept>
#include <string>

namespace mdres {

/// Base class of every error raised by the library. Each concrete error maps
/// to one failure mode of a public operation; callers that only care about
/// "something went wrong" can catch this.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidGeometry : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  ParseError(const std::string& what, int line)
    : Error("line " + std::to_string(line) + ": " + what), line_(line)
  {
  }
  [[nodiscard]] int line() const { return line_; }

private:
  int line_;
};

class DegenerateCell : public Error {
public:
  explicit DegenerateCell(int cell)
    : Error("degenerate cell " + std::to_string(cell)), cell_(cell)
  {
  }
  [[nodiscard]] int cell() const { return cell_; }

private:
  int cell_;
};

class NonConformingLiner : public Error {
public:
  using Error::Error;
};

class UnmappedElectrode : public Error {
public:
  UnmappedElectrode(const std::string& what, double residual_length)
    : Error(what), residual_(residual_length)
  {
  }
  [[nodiscard]] double residual_length() const { return residual_; }

private:
  double residual_;
};

class SingularInteractionRegion : public Error {
public:
  explicit SingularInteractionRegion(int vertex)
    : Error("singular MPFA interaction region at vertex " + std::to_string(vertex)), vertex_(vertex)
  {
  }
  [[nodiscard]] int vertex() const { return vertex_; }

private:
  int vertex_;
};

class UnknownBoundaryTag : public Error {
public:
  explicit UnknownBoundaryTag(int tag)
    : Error("no boundary face carries tag " + std::to_string(tag)), tag_(tag)
  {
  }
  [[nodiscard]] int tag() const { return tag_; }

private:
  int tag_;
};

class NonpositiveDenominator : public Error {
public:
  using Error::Error;
};

class BrokenMortar : public Error {
public:
  explicit BrokenMortar(int face)
    : Error("liner mortar has no bulk pair for face " + std::to_string(face)), face_(face)
  {
  }
  [[nodiscard]] int face() const { return face_; }

private:
  int face_;
};

class AssemblyMismatch : public Error {
public:
  using Error::Error;
};

class IncompatibleSource : public Error {
public:
  using Error::Error;
};

class SolveFailure : public Error {
public:
  SolveFailure(const std::string& what, double residual)
    : Error(what), residual_(residual)
  {
  }
  [[nodiscard]] double residual() const { return residual_; }

private:
  double residual_;
};

class InvalidSurvey : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

} // namespace mdres
