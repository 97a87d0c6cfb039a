#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sosw/models.hpp"
#include "sosw/spectral.hpp"
#include "sosw/subsets.hpp"

namespace sosw {

struct WitnessParams {
  double p = 1.0;
  // alpha[0] = 1 always; alpha[1..4] are the free weights.
  std::array<double, 5> alpha{1.0, 0.0, 0.0, 0.0, 0.0};
  std::optional<double> kappa;

  double a(int size) const { return alpha.at(static_cast<std::size_t>(size)); }
  // Every weight lies in [0, 1] (needed for the range constraint).
  bool in_unit_range() const;
};

// alpha = (kappa, 2 kappa^2/p, kappa^3/p^3, 8 kappa^4/p^6).
WitnessParams derive_alphas(double kappa, double p);
WitnessParams explicit_alphas(double p, double a1, double a2, double a3, double a4);

// kappa = c0 * n^{-2/3} / log n.
double theorem_kappa(int n, double c0 = 1.0);

enum class MatrixKind { M, N, H };
std::string to_string(MatrixKind k);

class MomentMatrix {
 public:
  MomentMatrix(SubsetIndexer indexer, MatrixKind kind, Eigen::MatrixXd values);

  const SubsetIndexer& indexer() const { return indexer_; }
  MatrixKind kind() const { return kind_; }
  const Eigen::MatrixXd& values() const { return values_; }
  Eigen::Index size() const { return values_.rows(); }

  // Row/column of S (kind H has no row for the empty set).
  Eigen::Index position(const Subset& s) const;
  double at(const Subset& a, const Subset& b) const;

 private:
  SubsetIndexer indexer_;
  MatrixKind kind_;
  Eigen::MatrixXd values_;
};

MomentMatrix build_matrix(const GraphInstance& g, const WitnessParams& params, MatrixKind kind);

// M restricted to rows whose set is a clique of G (all other rows of M vanish),
// with the subsets kept in canonical order.
struct CliqueRestricted {
  std::vector<Subset> sets;
  Eigen::MatrixXd values;
};
CliqueRestricted build_clique_restricted_M(const GraphInstance& g, const WitnessParams& params);

struct HBlocks {
  Eigen::MatrixXd h11;  // n x n
  Eigen::MatrixXd h12;  // n x C(n,2)
  Eigen::MatrixXd h22;  // C(n,2) x C(n,2)
};

HBlocks extract_blocks(const MomentMatrix& h);

// sX + (1-s) e_0 e_0^T: every entry scaled by s, then the empty-set corner reset to 1.
MomentMatrix scale_witness(const MomentMatrix& m, double s);

struct FeasibilityReport {
  bool unit_corner = false;     // X_{0,0} = 1
  bool entries_in_range = false;
  bool clique_support = false;  // zero whenever S1 u S2 is not a clique
  bool union_symmetry = false;  // equal entries for equal unions
  PsdReport psd;
  double objective = 0.0;       // sum_i X_{{i},{i}}
  bool feasible() const {
    return unit_corner && entries_in_range && clique_support && union_symmetry && psd.verdict;
  }
};

// PSD is decided on the clique-supported rows after diagonal (Jacobi) scaling,
// which preserves inertia; tol is relative to the unit diagonal that results.
FeasibilityReport check_sos_feasibility(const MomentMatrix& m, const GraphInstance& g,
                                        double tol = 1e-8, PsdOptions psd = {});
PsdReport witness_psd(const Eigen::MatrixXd& m, const PsdOptions& psd);

enum class DumpFormat { Text, Binary };
void write_matrix(std::ostream& os, const MomentMatrix& m, DumpFormat fmt);
// Reads back the upper triangle written by write_matrix.
Eigen::MatrixXd read_matrix(std::istream& is, DumpFormat fmt);

}  // namespace sosw
