#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gibbstv/models.hpp"

namespace gibbstv {

enum class IsingCondition { spectral, ferromagnetic, antiferro_uniqueness };

const char* to_string(IsingCondition c);

struct IsingConditionReport {
  IsingCondition tag;
  // spectral: eigenvalue spread; ferromagnetic: min parameter;
  // antiferro: exp(2 beta) - (Delta-2)/Delta.
  double witness;
};

struct RegimeReport {
  std::optional<double> uniqueness_gap;
  std::optional<IsingConditionReport> ising_condition;
  double marginal_bound = 1.0;
};

// (Delta-1)^(Delta-1) / (Delta-2)^Delta; requires Delta >= 3.
double lambda_critical(std::size_t delta);

// Largest eta with lambda_v <= (1-eta) lambda_c(Delta) for all v, or nullopt.
// Graphs with Delta <= 2 report eta = 1.
std::optional<double> check_uniqueness(const HardcoreModel& m);

// Uniqueness against lambda_c(max(Delta, 3)); this is the form under which the
// 1/5000 lower bound constant holds on every graph.
bool uniqueness_for_lower_bound(const HardcoreModel& m);

// Tolerance of the eigenvalue spread check.
inline constexpr double kSpectralTolerance = 1e-9;

// First satisfied tractability condition. eta is the gap required in the
// spectral condition (spread <= 1 - eta).
std::optional<IsingConditionReport> check_ising_condition(const IsingModel& m,
                                                          double eta = 0.0);

struct MarginalBound {
  double b = 1.0;
  // Vertex attaining the minimum and its spin, or -1 when b comes from the
  // isolated-vertex bound 1/(1+max lambda).
  long long witness_vertex = -1;
  int witness_spin = 0;
};

inline constexpr std::size_t kDefaultFreeDegreeCap = 24;

// Hardcore zero-field vertices are stripped first; Ising infinite fields are
// contracted first.
MarginalBound marginal_lower_bound(const SpinSystem& s,
                                   std::size_t free_degree_cap = kDefaultFreeDegreeCap);

RegimeReport regime_report(const SpinSystem& s, double eta = 0.0);

// Requires soft pair of the same kind on the same graph.
double parameter_distance(const SpinSystem& mu, const SpinSystem& nu);

struct LowerBoundCase {
  bool hardcore_uniqueness = false;
  std::optional<double> marginal_bound;
};

// Largest applicable constant; throws GateError when none applies.
double tv_lower_bound_constant(ModelKind kind, const LowerBoundCase& c);

struct PreprocessOutcome {
  enum class Kind { resolved, big_gap, soft };
  Kind kind = Kind::soft;
  double tv = 0.0;        // resolved
  double big_gap_b = 0.0; // big_gap: TV >= b
  std::optional<SpinSystem> mu;  // soft: reduced pair
  std::optional<SpinSystem> nu;
  std::vector<Vertex> to_old;
};

PreprocessOutcome preprocess(const SpinSystem& mu, const SpinSystem& nu);

}  // namespace gibbstv
