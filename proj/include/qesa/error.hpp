#ifndef QESA_ERROR_HPP
#define QESA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace qesa {

// Bad input or violated precondition. The CLI maps this to exit code 2.
class invalid_input : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// A configured resource bound (simulator size, search budget) was hit.
// The CLI maps this to exit code 3.
class resource_limit : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Numerical failure inside an algorithm (e.g. integrator drift).
class numerical_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string &msg) {
  if (!cond)
    throw invalid_input(msg);
}

} // namespace qesa

#endif // QESA_ERROR_HPP
