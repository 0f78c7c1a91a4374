#pragma once

#include <stdexcept>
#include <string>

namespace umsa {

/// Invalid configuration or law parameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameter outside the domain where a density or gradient is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Gradient requested at a latent state with zero target density.
class UndefinedGradientError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Failure while running a chain, an estimator or an experiment.
class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace umsa
