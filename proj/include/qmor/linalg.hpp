#pragma once
// Shared linear-algebra helpers: Hermitian functions of matrices,
// pseudo-inverses with a relative spectral cutoff, Kronecker products, and
// local (single-site) operator application on tensor-product states.

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace qmor {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr cplx I_UNIT{0.0, 1.0};

// f(H) for Hermitian H via eigendecomposition.
inline Mat hermitian_function(const Mat& H, const std::function<cplx(double)>& f) {
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  const auto& w = es.eigenvalues();
  Vec fw(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) fw(i) = f(w(i));
  return es.eigenvectors() * fw.asDiagonal() * es.eigenvectors().adjoint();
}

// Moore-Penrose pseudoinverse of a Hermitian PSD matrix; eigenvalues below
// rel_tol * max eigenvalue are treated as exact zeros (gauge null space).
struct HermPinv {
  Mat pinv;       // pseudo-inverse
  Mat half_pinv;  // pinv^(1/2), for similarity transforms
  int rank = 0;
};

inline HermPinv hermitian_pinv(const Mat& G, double rel_tol = 1e-10) {
  Eigen::SelfAdjointEigenSolver<Mat> es(G);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  const auto& w = es.eigenvalues();
  double wmax = w.size() ? w.maxCoeff() : 0.0;
  double cut = rel_tol * std::max(wmax, 0.0);
  Vec inv(w.size()), hinv(w.size());
  int rank = 0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w(i) > cut && w(i) > 0.0) {
      inv(i) = 1.0 / w(i);
      hinv(i) = 1.0 / std::sqrt(w(i));
      ++rank;
    } else {
      inv(i) = 0.0;
      hinv(i) = 0.0;
    }
  }
  HermPinv out;
  out.pinv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
  out.half_pinv = es.eigenvectors() * hinv.asDiagonal() * es.eigenvectors().adjoint();
  out.rank = rank;
  return out;
}

inline Mat kron(const Mat& A, const Mat& B) {
  Mat K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

inline Vec kron_vec(const Vec& a, const Vec& b) {
  Vec k(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) k.segment(i * b.size(), b.size()) = a(i) * b;
  return k;
}

// Apply a d_site x d_site operator to tensor factor `site` of a state on
// dims[0] (x) dims[1] (x) ... (factor 0 is the slowest index).
inline Vec apply_local(const Mat& op, const Vec& psi, const std::vector<int>& dims, int site) {
  const int d = dims[site];
  long left = 1, right = 1;
  for (int i = 0; i < site; ++i) left *= dims[i];
  for (size_t i = site + 1; i < dims.size(); ++i) right *= dims[i];
  Vec out(psi.size());
  for (long l = 0; l < left; ++l)
    for (long r = 0; r < right; ++r) {
      // gather
      Vec v(d);
      for (int k = 0; k < d; ++k) v(k) = psi((l * d + k) * right + r);
      Vec w = op * v;
      for (int k = 0; k < d; ++k) out((l * d + k) * right + r) = w(k);
    }
  return out;
}

// Partial trace of |psi><psi| keeping sites `keep` (ascending) of a qubit
// register (all dims 2); returns the reduced density matrix.
inline Mat reduced_density(const Vec& psi, const std::vector<int>& dims, const std::vector<int>& keep) {
  long dk = 1;
  for (int s : keep) dk *= dims[s];
  const int n = int(dims.size());
  std::vector<long> stride(n);
  long acc = 1;
  for (int i = n - 1; i >= 0; --i) {
    stride[i] = acc;
    acc *= dims[i];
  }
  std::vector<int> rest;
  for (int i = 0; i < n; ++i)
    if (std::find(keep.begin(), keep.end(), i) == keep.end()) rest.push_back(i);
  long dr = 1;
  for (int s : rest) dr *= dims[s];

  Mat rho = Mat::Zero(dk, dk);
  // Enumerate kept and traced indices.
  for (long a = 0; a < dk; ++a)
    for (long b = 0; b < dk; ++b) {
      // decode kept multi-indices
      long ia = 0, ib = 0;
      {
        long ta = a, tb = b;
        for (int q = int(keep.size()) - 1; q >= 0; --q) {
          int s = keep[q];
          ia += (ta % dims[s]) * stride[s];
          ib += (tb % dims[s]) * stride[s];
          ta /= dims[s];
          tb /= dims[s];
        }
      }
      cplx sum = 0.0;
      for (long t = 0; t < dr; ++t) {
        long off = 0;
        long tt = t;
        for (int q = int(rest.size()) - 1; q >= 0; --q) {
          int s = rest[q];
          off += (tt % dims[s]) * stride[s];
          tt /= dims[s];
        }
        sum += psi(ia + off) * std::conj(psi(ib + off));
      }
      rho(a, b) = sum;
    }
  return rho;
}

// von Neumann entropy in bits of a density matrix.
inline double entropy_bits(const Mat& rho) {
  Eigen::SelfAdjointEigenSolver<Mat> es(rho);
  double S = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    double p = es.eigenvalues()(i);
    if (p > 1e-14) S -= p * std::log2(p);
  }
  return S;
}

// Trace norm distance (1/2)||A - B||_1 of Hermitian matrices.
inline double trace_distance(const Mat& A, const Mat& B) {
  Eigen::SelfAdjointEigenSolver<Mat> es((A - B));
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace qmor
