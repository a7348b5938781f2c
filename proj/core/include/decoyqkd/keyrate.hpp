#pragma once

// Secure key length and rate certificate:
//
//   L = -N_mu f_ec H2(eps_mu) + N_1 (1 - H2(eps_1U)),   R = L / t
//
// N_mu counts signal sifted bits, N_1 = floor(Q1L n_signal / 2) and t is the
// simulated session time.

#include "decoyqkd/model.hpp"
#include "decoyqkd/reconciliation.hpp"

namespace decoyqkd {

/// leaked / (n H2(eps)). Throws std::invalid_argument for n = 0 or eps outside
/// (0, 0.5), where the Shannon cost is zero or the ratio meaningless.
double fec_efficiency(Count leaked_bits, Count n, double eps);

/// floor(q1_lower * n_signal_sent / 2).
Count n1_sift_lower(double q1_lower, Count n_signal_sent);

/// max(0, floor(-n_mu_sift f_ec H2(eps_mu) + n_1_sift_lower (1 - H2(eps1_upper)))).
Count secure_length(Count n_mu_sift, Count n_1_sift_lower, double eps_mu, double eps1_upper, double f_ec);

/// Same bound with the error-correction term given directly as disclosed bits.
/// Coincides with secure_length when f_ec = fec_efficiency(leaked, n, eps).
Count secure_length_from_leak(Count leaked_bits, Count n_1_sift_lower, double eps1_upper);

/// Assembles the report of one session. The certificate (secure_length,
/// rate_bps) is always filled in from the measured leak; the report is
/// aborted (key_length = 0) when the bounds are unusable, the ratio alarm
/// fires or reconciliation failed verification.
KeyReport certify(const SessionConfig& cfg, const SessionTally& tally, Count pulses_emitted,
                  const DecoyBounds& bounds, const ReconciliationResult& reconciliation);

}  // namespace decoyqkd
