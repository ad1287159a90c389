#ifndef DOPT_ERRORS_HPP
#define DOPT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dopt {

// The instance admits no rank-p design (too few feasible experiments or a
// deficient span), or a requested object is empty.
class DegenerateInstance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A solver stopped on a configured cap (node limit, enumeration cap,
// iteration cap) before it could prove its answer.
class SolverLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Internal numerical state is inconsistent (e.g. a downdate went
// indefinite beyond the clamp threshold).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dopt

#endif  // DOPT_ERRORS_HPP
