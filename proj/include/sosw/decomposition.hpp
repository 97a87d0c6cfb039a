#pragma once

#include <string>

#include <Eigen/Dense>

#include "sosw/linalg.hpp"
#include "sosw/models.hpp"
#include "sosw/witness.hpp"

namespace sosw {

// Cross edges of the face on (h(A), t(A), h(B), t(B)).
enum FaceEdge : unsigned { kHH = 1u, kHT = 2u, kTH = 4u, kTT = 8u };

// Edge subset selected by class eta (number of edges) and type nu.
// Class 1: hh, ht, th, tt.  Class 2: {hh,tt}, {hh,th}, {hh,ht}, {ht,tt},
// {th,tt}, {ht,th}.  Class 3: {hh,ht,th}, {hh,ht,tt}, {hh,th,tt},
// {ht,th,tt}.  Class 4: all four.
unsigned face_edges(int eta, int nu);
int type_count(int eta);

enum class Family { K, J, Jtilde, L };

struct ComponentKind {
  Family family = Family::K;
  int eta = 0;
  int nu = 0;

  static ComponentKind k() { return {Family::K, 0, 0}; }
  static ComponentKind j(int eta, int nu) { return {Family::J, eta, nu}; }
  static ComponentKind jtilde(int eta, int nu) { return {Family::Jtilde, eta, nu}; }
  static ComponentKind l(int eta, int nu) { return {Family::L, eta, nu}; }

  void validate() const;
  std::string name() const;
  bool operator==(const ComponentKind&) const = default;
};

double component_prefactor(const ComponentKind& kind, const WitnessParams& params);

struct ComponentMatrix {
  ComponentKind kind;
  double prefactor = 0.0;
  Eigen::MatrixXd values;  // pairs x pairs, or singletons x pairs for L
};

ComponentMatrix build_component(const GraphInstance& g, const WitnessParams& params,
                                ComponentKind kind);

// Matrix-free product with a component matrix (pair vectors in canonical order).
// K, class-1 sums, J(4,1) and L have fast paths; everything else is evaluated
// entry by entry.
LinearOperator component_operator(const GraphInstance& g, const WitnessParams& params,
                                  ComponentKind kind);
// Sum of J~(1,nu) over nu, matrix-free.
LinearOperator jtilde_class1_sum_operator(const GraphInstance& g, const WitnessParams& params);

struct ExpansionResidual {
  double residual = 0.0;
  double scale = 0.0;            // alpha4 for H22, alpha3 for H12
  bool intersecting_exact = true;  // H12 only: constant entries cancel bit-exactly
  bool ok(double rel = 1e-12) const { return intersecting_exact && residual <= rel * scale; }
};

ExpansionResidual verify_expansion_H22(const GraphInstance& g, const WitnessParams& params);
ExpansionResidual verify_expansion_H12(const GraphInstance& g, const WitnessParams& params);

struct KernelReport {
  double p2_sum_j1 = 0.0;    // ||P2 (sum_nu J~(1,nu))||
  double sum_j1_p2 = 0.0;    // ||(sum_nu J~(1,nu)) P2||
  double j22_j24_p2 = 0.0;   // ||(J~(2,2) + J~(2,4)) P2||
  double p2_j23_j25 = 0.0;   // ||P2 (J~(2,3) + J~(2,5))||
  bool transpose_pairing = false;  // J~(2,2) == J~(2,3)^T exactly
  double bound = 0.0;        // 1e-9 * alpha4 * n
  bool ok() const {
    return transpose_pairing && p2_sum_j1 <= bound && sum_j1_p2 <= bound && j22_j24_p2 <= bound &&
           p2_j23_j25 <= bound;
  }
};

KernelReport kernel_identities(const GraphInstance& g, const WitnessParams& params);

// ||P_a X P_b||_2 for X acting on pair vectors; a or b = -1 means no projector.
NormEstimate projected_norm(int a, const LinearOperator& x, int b, const LanczosOptions& opt = {});
NormEstimate projected_norm(int a, const Eigen::MatrixXd& x, int b, const LanczosOptions& opt = {});

}  // namespace sosw
