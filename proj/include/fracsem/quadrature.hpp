#pragma once

#include <vector>

namespace fracsem {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1], nodes by Newton iteration on P_n.
GaussRule gauss_legendre(int n);

}  // namespace fracsem
