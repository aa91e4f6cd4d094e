#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace conevex {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr const char* kVersion = "0.1.0";

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: maps to CLI exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Iteration cap reached or divergence: maps to CLI exit code 3.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

enum class Exec { Serial, Parallel };

// Reads CONEVEX_THREADS and applies it to OpenMP; returns the active count.
int configure_threads_from_env();
int active_threads();

// Order-independent summation used for every reduction that feeds an output.
double pairwise_sum(const double* x, std::size_t n);
inline double pairwise_sum(const std::vector<double>& x) { return pairwise_sum(x.data(), x.size()); }

// Smooth scalar field on (part of) R^d with first and second derivatives.
class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual double value(const Vec& y) const = 0;
  virtual Vec gradient(const Vec& y) const = 0;
  virtual Mat hessian(const Vec& y) const = 0;
};

}  // namespace conevex
