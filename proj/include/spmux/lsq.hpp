#pragma once

#include <span>
#include <vector>

#include "spmux/dictionary.hpp"

namespace spmux {

// Least squares restricted to a growing or shrinking set of dictionary
// blocks. The Gram never touches the tall operator: block (a,b) is
// channel_inner(j_a, j_b) * (P_{j_a}^H P_{j_b}), a scalar times a cached
// precoder cross product, so appending a block costs O(|Lambda| d^2) for the
// Gram and one partial Cholesky sweep for the factor.
//
// The factor L (G + ridge I = L L^H) is kept packed row-major lower
// triangular; rows are contiguous, which keeps both substitution sweeps and
// the factor updates on vector kernels. Appending refactors only the new
// rows; removing a block refactors from its row onward.
class BlockLs {
 public:
  explicit BlockLs(const BlockDictionary& D, double ridge = 0.0);

  int blocks() const { return static_cast<int>(lambda_.size()); }
  int size() const { return n_; }
  const std::vector<int>& support() const { return lambda_; }
  double ridge() const { return ridge_; }

  // False after a lost pivot: the normal equations are numerically singular
  // and solve() must not be used until a remove() restores positivity.
  bool ok() const { return ok_; }

  // Extends the set with block j. rhs_j = B_j^H y for the observation the
  // caller is fitting. Returns ok().
  bool append(int j, std::span<const cplx> rhs_j);

  // Drops the block at position pos in support() order.
  void remove(int pos);

  // c[pos*d .. pos*d+d) += delta. Used when the fitted observation changes
  // (interference cancellation) without rebuilding the factor.
  void add_to_rhs(int pos, std::span<const cplx> delta);

  // z = (G + ridge I)^{-1} c, support()-block-major, out.size() == size().
  // With ridge 0 this is the LS coefficient vector: B_Lambda z ~ y.
  void solve(std::span<cplx> out) const;

  // max/min ratio of the factor diagonal; tracks cond(B_Lambda). +inf when
  // the factorization failed.
  double cond_estimate() const;

  // Dense Gram incl. ridge, column-major size() x size(). Exposed for tests.
  const std::vector<cplx>& gram() const { return G_; }
  std::span<const cplx> rhs() const { return c_; }

 private:
  bool refactor_from(int row0);

  const BlockDictionary* D_;
  double ridge_;
  std::vector<int> lambda_;
  int n_ = 0;
  std::vector<cplx> G_;  // dense column-major, both triangles, ridge baked in
  std::vector<cplx> L_;  // packed row-major lower triangle
  std::vector<cplx> c_;
  bool ok_ = true;
};

struct RestrictedLs {
  std::vector<cplx> coeff;  // z minimizing ||y - B_Lambda z||, block-major
  bool rank_deficient = false;
  bool used_fallback = false;
};

// One-shot solve over a fixed block set. Takes the Cholesky route and falls
// back to a dense pivoted QR with min-norm completion when the estimated
// condition crosses cond_limit or a pivot is lost. ridge > 0 regularizes the
// normal equations (the MMSE filter shape) and keeps the solve on the
// Cholesky route. Requires |blocks| * d <= M*T.
RestrictedLs restricted_ls(const BlockDictionary& D, std::span<const int> blocks,
                           std::span<const cplx> y, double ridge = 0.0,
                           double cond_limit = 1e6);

}  // namespace spmux
