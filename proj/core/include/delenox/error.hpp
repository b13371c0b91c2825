#pragma once

#include <stdexcept>
#include <string>

namespace delenox {

/// Raised when a caller breaks an operation's precondition (dimension
/// mismatch, empty dataset, malformed genome, ...).
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

/// Raised by the pipeline when too many exploration runs end without
/// feasible elites for the iteration to continue.
class ExperimentAborted : public std::runtime_error {
 public:
  explicit ExperimentAborted(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed files (genomes, encoder models, images, CSVs).
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// An experiment directory lacks the CSVs a report is derived from.
class MissingReportData : public std::runtime_error {
 public:
  explicit MissingReportData(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace delenox
