#pragma once

#include <vector>

#include "adpo/advantage.hpp"
#include "adpo/policy.hpp"

namespace adpo {

enum class AdvMode { Decoupled, Entangled };

std::string to_string(AdvMode m);
AdvMode adv_mode_from_string(const std::string& s);

struct ObjectiveConfig {
    double clip_eps = 0.2;
    double kl_coeff = 0.01;
    AdvMode mode = AdvMode::Decoupled;
    VerifMode verif = VerifMode::Preference;

    void validate() const;
};

struct ObjectiveTerms {
    double surrogate = 0.0;
    double kl = 0.0;
    double total = 0.0;  // surrogate - kl_coeff * kl
    std::vector<std::vector<double>> ratios;  // per rollout, per token
};

double clipped_term(double ratio, double adv, double eps);

// Exact full-vocabulary KL(pi || ref) for one context at T=1.
double kl_exact(std::span<const double> logits, std::span<const double> ref_logits);

// Objective over a batch of groups. Advantages are computed here from the
// groups' reward bundles according to cfg.mode. Ratios use the stored
// behavior log-probabilities as the denominator.
ObjectiveTerms adpo_objective(const std::vector<Group>& groups,
                              const PolicyParams& params, const PolicyParams& ref,
                              const TaskSpec& spec, const ObjectiveConfig& cfg);

// Analytic gradient of the objective with respect to every logit entry.
// Clipping uses the min-selected subgradient (zero through an active clipped
// branch). Optional zeroing flags support gradient-isolation checks.
PolicyParams adpo_gradient(const std::vector<Group>& groups,
                           const PolicyParams& params, const PolicyParams& ref,
                           const TaskSpec& spec, const ObjectiveConfig& cfg,
                           bool zero_answer_adv = false, bool zero_pref_adv = false);

}  // namespace adpo
