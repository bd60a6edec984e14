#pragma once

#include <span>
#include <string>
#include <vector>

#include "fracsem/fraclap.hpp"
#include "fracsem/solver.hpp"

namespace fracsem {

/// c h^n sum over interior nodes of (u(x) - u_j) |x - x_j|^{-n-2s}, at each exterior x.
std::vector<double> neumann_derivative(const NonlocalOperator& op, const Field& u,
                                       std::span<const std::size_t> x_indices);

/// Kernel mass of the domain seen from an exterior node, midpoint rule on an
/// exact tiling of the domain (interior cells plus boundary sub-cells).
double mass_m(const NonlocalOperator& op, std::size_t x_index);
std::vector<double> mass_m(const NonlocalOperator& op, std::span<const std::size_t> x_indices);

struct IdentityCheck {
  std::vector<double> lhs;   // lattice (-Delta)^s u on the window
  std::vector<double> rhs;   // N u - m u + lattice (-Delta)^s (E_0 g)
  double max_residual = 0.0;
};

/// Compares (-Delta)^s u with N u - m u + (-Delta)^s(E_0 g) on the window,
/// where E_0 g is g extended by zero into the domain.
IdentityCheck exterior_identity(const NonlocalOperator& op, const Field& u, const Field& g,
                                const Window& window);
double exterior_identity_check(const NonlocalOperator& op, const Field& u, const Field& g,
                               const Window& window);

struct CauchyDatum {
  std::vector<std::size_t> window;
  std::vector<double> trace;
  std::vector<double> neumann;
  std::string provenance;
};

CauchyDatum make_cauchy_datum(const NonlocalOperator& op, const Nonlinearity& nl, const Field& g,
                              const Window& window, const NewtonConfig& cfg,
                              std::string provenance = "g");

struct Probe {
  std::string id;
  Field g;
};

struct CauchyBank {
  std::vector<std::size_t> window;
  std::vector<CauchyDatum> data;
};

/// One datum per probe, solved in parallel.
CauchyBank make_cauchy_bank(const NonlocalOperator& op, const Nonlinearity& nl,
                            std::span<const Probe> probes, const Window& window,
                            const NewtonConfig& cfg);

/// {window: [...], data: [{g_id, trace: [...], neumann: [...]}]}.
std::string bank_to_json(const CauchyBank& bank);

}  // namespace fracsem
