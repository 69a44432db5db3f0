#pragma once

#include <stdexcept>
#include <string>

namespace qoptics {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Operands live on different mode sets, cutoffs or matrix sizes.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// A mode label that is not part of the state or space.
class UnknownModeError : public Error {
  public:
    using Error::Error;
};

/// Invalid physical parameter (T outside (0,1], negative nbar, ...).
class ParameterError : public Error {
  public:
    using Error::Error;
};

/// Conditioning on an outcome whose probability is exactly zero.
class ZeroProbabilityError : public Error {
  public:
    using Error::Error;
};

/// Population at the top retained Fock level exceeded the leak budget.
class LeakBudgetError : public Error {
  public:
    LeakBudgetError(const std::string &what, double leak, double budget,
                    int cutoff)
        : Error(what), leak_(leak), budget_(budget), cutoff_(cutoff) {}

    double leak() const noexcept { return leak_; }
    double budget() const noexcept { return budget_; }
    int cutoff() const noexcept { return cutoff_; }

  private:
    double leak_;
    double budget_;
    int cutoff_;
};

} // namespace qoptics
