#pragma once

#include <stdexcept>
#include <string>

namespace lglrr {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A violated precondition: bad dimensions, non-finite values, out-of-range
/// parameters and the like.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/// small_inverse: smallest singular value below 1e-12 times the largest.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// from_basis: the input columns do not span a p-dimensional subspace.
class RankDeficientError : public Error {
 public:
  using Error::Error;
};

/// log_map: the target subspace lies (numerically) at the cut locus of the
/// base point, where the logarithm is undefined.
class CutLocusError : public Error {
 public:
  using Error::Error;
};

/// CutLocusError raised while processing the dataset pair (i, j).
class PairAtCutLocusError : public CutLocusError {
 public:
  PairAtCutLocusError(int i, int j, const std::string& what)
      : CutLocusError(what), i(i), j(j) {}
  int i;
  int j;
};

/// Malformed text input. `line` is 1-based within `path`.
class ParseError : public Error {
 public:
  ParseError(std::string path, int line, const std::string& detail)
      : Error(path + ":" + std::to_string(line) + ": " + detail),
        path(std::move(path)),
        line(line) {}
  std::string path;
  int line;
};

/// Structurally valid input that breaks a dataset rule (duplicate entries,
/// label gaps, missing files, mismatched ids).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Filesystem-level failure while reading or writing.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lglrr
