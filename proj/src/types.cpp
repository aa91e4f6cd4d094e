#include "conevex/types.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace conevex {

int configure_threads_from_env() {
  const char* env = std::getenv("CONEVEX_THREADS");
  if (env != nullptr && *env != '\0') {
    int n = std::atoi(env);
    if (n < 1) throw ValidationError("CONEVEX_THREADS must be a positive integer");
#ifdef _OPENMP
    omp_set_num_threads(n);
#endif
  }
  return active_threads();
}

int active_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  std::size_t m = n / 2;
  return pairwise_sum(x, m) + pairwise_sum(x + m, n - m);
}

}  // namespace conevex
