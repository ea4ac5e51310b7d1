#pragma once

#include "entlayer/oracle.hpp"
#include "entlayer/scm.hpp"

namespace entlayer {

inline constexpr double kDependenceThreshold = 1e-9;

/// Conditional independence in the observed joint must coincide with
/// d-separation in the causal graph. `exhaustive` visits every disjoint
/// (X, Y, S) with X, Y non-empty; `singleton` restricts X and Y to single
/// nodes. `oracle` must cover the observed variables.
AssumptionReport check_faithfulness(const Scm& m, const EntropyOracle& oracle,
                                    FaithfulnessScope scope);
AssumptionReport check_faithfulness(const Scm& m, FaithfulnessScope scope);

/// I(N_v; v') > kDependenceThreshold for every v and v' in Des(v).
/// `noise_oracle` must cover the noise nodes (joint_distribution with
/// include_noise).
AssumptionReport check_directed_faithfulness(const Scm& m, const EntropyOracle& noise_oracle);
AssumptionReport check_directed_faithfulness(const Scm& m);

}  // namespace entlayer
