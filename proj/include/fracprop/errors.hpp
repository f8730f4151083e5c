#ifndef FRACPROP_ERRORS_HPP
#define FRACPROP_ERRORS_HPP

#include <stdexcept>

namespace fracprop {

// Argument lies outside every region the evaluator can certify.
struct unsupported_region : std::domain_error {
  using std::domain_error::domain_error;
};

// An iterative scheme hit its hard cap before meeting its tolerance.
struct no_convergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fracprop

#endif
