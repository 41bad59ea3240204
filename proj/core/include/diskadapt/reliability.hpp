#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace diskadapt {

/// A k-of-n erasure code.
struct Scheme {
  int k = 6;
  int n = 9;

  int f() const { return n - k; }
  double overhead() const { return static_cast<double>(n) / k; }
  std::string name() const;  // "6-of-9"
  void validate() const;

  friend bool operator==(const Scheme&, const Scheme&) = default;
  friend auto operator<=>(const Scheme&, const Scheme&) = default;
};

/// Parses "K-of-N".
Scheme parse_scheme(std::string_view text);

struct ReliabilityConfig {
  double mttr_days = 0.2;
  double afr0 = 16.0;
  Scheme scheme0{6, 9};
  int max_k = 50;
  int min_f = 2;
  // Longest tolerated rebuild of one disk. Rebuild time scales with k and
  // scheme0 rebuilds in exactly mttr_days.
  double max_repair_days = 1.0;

  /// mttdl(scheme0, afr0, mttr_days); derived, never configured.
  double target_mttdl() const;
  /// Rebuild time of a width-k stripe.
  double repair_days(const Scheme& s) const { return mttr_days * s.k / scheme0.k; }
  void validate() const;
};

/// Markov MTTDL in years: MTTF^(f+1) / (n(n-1)...k * MTTR^f).
double mttdl(const Scheme& s, double afr_pct, double mttr_days);

/// AFR (%/yr) at which `s` exactly meets the target MTTDL. Throws
/// std::domain_error if the root lies outside [1e-4, 1e4].
double tolerated_afr(const Scheme& s, const ReliabilityConfig& rc);

/// Largest AFR the scheme may serve: the lesser of its tolerated AFR and the
/// reconstruction-IO bound afr0 * k0 / k.
double afr_ceiling(const Scheme& s, const ReliabilityConfig& rc);

/// Candidate grid: k in [k_min, k_max], f in [f_min, f_max].
std::vector<Scheme> scheme_grid(int k_min = 3, int k_max = 50, int f_min = 2, int f_max = 4);

/// Candidates satisfying all viability criteria at `afr_pct`, in input order.
/// Throws std::invalid_argument for an empty candidate list.
std::vector<Scheme> viable_schemes(double afr_pct, const ReliabilityConfig& rc,
                                   const std::vector<Scheme>& candidates);

/// Caches tolerated AFR per scheme; construct once per configuration.
class SchemeTable {
public:
  SchemeTable(ReliabilityConfig rc, std::vector<Scheme> candidates);

  const ReliabilityConfig& config() const { return rc_; }
  const std::vector<Scheme>& candidates() const { return candidates_; }
  double tolerated(const Scheme& s) const;
  double ceiling(const Scheme& s) const;
  bool viable(const Scheme& s, double afr_pct) const;
  std::vector<Scheme> viable_at(double afr_pct) const;
  /// Lowest-overhead viable scheme, or scheme0 when none is.
  Scheme best_at(double afr_pct) const;

private:
  struct Entry {
    Scheme scheme;
    double tolerated;
  };
  const Entry* find(const Scheme& s) const;

  ReliabilityConfig rc_;
  std::vector<Scheme> candidates_;
  std::vector<Entry> entries_;
};

}  // namespace diskadapt
