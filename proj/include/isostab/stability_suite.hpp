#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "isostab/graph_geometry.hpp"

namespace isostab {

struct InequalityRecord {
  std::string estimate_id;
  double lhs = 0.0;
  /// The delta-side quantity without the unknown constant.
  double rhs_raw = 0.0;
  /// lhs / rhs_raw; 0 when degenerate, +inf when only rhs_raw vanishes.
  double ratio = 0.0;
  /// Both sides vanish to rounding.
  bool degenerate = false;
  std::string family_tag;
  std::vector<std::pair<std::string, double>> params;
};

/// Barycenter, L1, one-sided and two-sided C0, W12 and the geometric corollaries for C1-small graphs with H <= n.
std::vector<InequalityRecord> verify_sharp_u(const NormalGraphSet& set);
/// min over centers of |Omega Delta B_1(x)| + outer inclusion gap, against delta.
InequalityRecord verify_main(const NormalGraphSet& set);
/// W12 against ||H - n||_L2, C0 against ||H - n||_Lp, C^{1,alpha} surrogate against delta_cmc.
std::vector<InequalityRecord> verify_alex(const NormalGraphSet& set, double p = 2.0, double alpha = 0.5);

/// Tolerance under which both sides of an inequality count as zero, relative to |S^n|.
constexpr double degenerate_tolerance = 1e-13;

/// Deterministic set family: scaled_ball, sharp, band_limited or ellipsoid.
struct FamilySpec {
  std::string kind;
  int n = 2;
  int count = 10;
  unsigned seed = 1;
  /// 0 selects the per-dimension default.
  int resolution = 0;
  int band_limit = 0;
  std::map<std::string, double> params;
  double get(const std::string& key, double fallback) const;
  /// Canonical "kind:n=..,count=..,..." form.
  std::string tag() const;
};

/// Parses "kind:key=value,key=value".
FamilySpec parse_family(const std::string& text);

struct FamilyMember {
  NormalGraphSet set;
  std::string tag;
  std::vector<std::pair<std::string, double>> params;
};

FamilyMember family_member(const FamilySpec& spec, int index);
std::vector<FamilyMember> generate_family(const FamilySpec& spec);

struct ConstantSweepResult {
  std::string estimate_id;
  FamilySpec family;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  std::size_t degenerate_count = 0;
  std::vector<InequalityRecord> table;
};

/// Evaluates one estimate over every member, in parallel over members.
ConstantSweepResult constant_sweep(const FamilySpec& family, const std::string& estimate_id, double p = 2.0,
                                   double alpha = 0.5);

/// All estimate ids accepted by constant_sweep.
const std::vector<std::string>& estimate_ids();

}  // namespace isostab
