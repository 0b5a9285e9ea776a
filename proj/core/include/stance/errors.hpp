#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stance {

/// Root of every error the harness raises on purpose.
class StanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- corpus ---------------------------------------------------------------

class MalformedRecord : public StanceError {
 public:
  MalformedRecord(std::size_t line_no, const std::string& why)
      : StanceError("malformed record at line " + std::to_string(line_no) + ": " + why),
        line_no_(line_no) {}
  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::size_t line_no_;
};

class UnknownRawLabel : public StanceError {
 public:
  explicit UnknownRawLabel(std::string raw)
      : StanceError("raw label has no canonical mapping: \"" + raw + "\""), raw_(std::move(raw)) {}
  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

class InsufficientExemplars : public StanceError {
 public:
  InsufficientExemplars(std::size_t wanted, std::size_t available)
      : StanceError("requested " + std::to_string(wanted) + " exemplars, " +
                    std::to_string(available) + " available") {}
};

/// Bad or unreadable configuration (dataset config, vocab, manifest, CLI input).
class ConfigError : public StanceError {
 public:
  using StanceError::StanceError;
};

// --- prompting ------------------------------------------------------------

class MissingExemplars : public StanceError {
 public:
  MissingExemplars() : StanceError("few-shot scheme requires at least one exemplar") {}
};

class UnboundPlaceholder : public StanceError {
 public:
  explicit UnboundPlaceholder(std::string name)
      : StanceError("unbound placeholder {" + name + "}"), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class UnknownStage : public StanceError {
 public:
  explicit UnknownStage(std::size_t index)
      : StanceError("no stage with index " + std::to_string(index)), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// --- backend --------------------------------------------------------------

class BackendError : public StanceError {
 public:
  using StanceError::StanceError;
};

/// Retries exhausted on transport failures or 5xx/429 responses.
class BackendUnavailable : public BackendError {
 public:
  using BackendError::BackendError;
};

/// The server rejected the prompt as too long; never retried.
class ContextLengthExceeded : public BackendError {
 public:
  using BackendError::BackendError;
};

// --- evaluation / analysis ------------------------------------------------

class EmptyEvaluation : public StanceError {
 public:
  EmptyEvaluation() : StanceError("nothing to evaluate") {}
};

class DegenerateVariance : public StanceError {
 public:
  DegenerateVariance() : StanceError("correlation undefined: a variable has zero variance") {}
  explicit DegenerateVariance(const std::string& why) : StanceError("correlation undefined: " + why) {}
};

class LengthMismatch : public StanceError {
 public:
  LengthMismatch(std::size_t a, std::size_t b)
      : StanceError("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

class EmptyTrainingSet : public StanceError {
 public:
  EmptyTrainingSet() : StanceError("decision tree needs at least two samples") {}
};

}  // namespace stance
