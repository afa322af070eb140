#include "swiptsec/sdp.hpp"

namespace swiptsec::sdp {

RMatrix embed_hermitian(const CMatrix& m, double hermitian_tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("embed_hermitian: matrix not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > hermitian_tol * scale)
    throw std::invalid_argument("embed_hermitian: matrix not Hermitian");
  const auto n = m.rows();
  // Symmetrize so that the embedded matrix is exactly symmetric.
  const CMatrix h = 0.5 * (m + m.adjoint());
  RMatrix t(2 * n, 2 * n);
  t.topLeftCorner(n, n) = h.real();
  t.bottomRightCorner(n, n) = h.real();
  t.topRightCorner(n, n) = -h.imag();
  t.bottomLeftCorner(n, n) = h.imag();
  return t;
}

CMatrix extract_complex(const RMatrix& x, double structure_tol) {
  if (x.rows() != x.cols() || x.rows() % 2 != 0)
    throw std::invalid_argument("extract_complex: expected square matrix of even order");
  const auto n = x.rows() / 2;
  const RMatrix s = 0.5 * (x + x.transpose());
  const RMatrix a = s.topLeftCorner(n, n);
  const RMatrix d = s.bottomRightCorner(n, n);
  const RMatrix b = s.topRightCorner(n, n);
  const RMatrix c = s.bottomLeftCorner(n, n);
  const double scale = std::max(1.0, s.norm());
  const double violation = (a - d).norm() + (b + c).norm();
  if (violation > structure_tol * scale)
    throw NumericalFailure("extract_complex: matrix is not of embedded Hermitian form");
  CMatrix m(n, n);
  m.real() = 0.5 * (a + d);
  m.imag() = 0.5 * (c - b);
  return 0.5 * (m + m.adjoint()).eval();
}

}  // namespace swiptsec::sdp
