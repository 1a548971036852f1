#pragma once

#include <stdexcept>
#include <string>

namespace isac {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// No contour element has line of sight to the BS.
struct EmptyLoS : Error {
  using Error::Error;
};

// The Schur-reduced information for d_o / varphi vanished (all X_k equal).
struct DegenerateFim : Error {
  using Error::Error;
};

// Some subsection receives no transmit energy, a_k^H R_x a_k <= 0.
struct ZeroIllumination : Error {
  using Error::Error;
};

struct NotPSD : Error {
  using Error::Error;
};

struct SingularEfim : Error {
  SingularEfim(const std::string& msg, double eig) : Error(msg), eigenvalue(eig) {}
  double eigenvalue;
};

struct RankDeficient : Error {
  using Error::Error;
};

struct SolverFailure : Error {
  using Error::Error;
};

struct Infeasible : Error {
  using Error::Error;
};

struct ExtractionFailed : Error {
  using Error::Error;
};

struct AllInfeasible : Error {
  using Error::Error;
};

struct BadScenario : Error {
  using Error::Error;
};

}  // namespace isac
