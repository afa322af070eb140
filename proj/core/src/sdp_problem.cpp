#include <numeric>

#include "swiptsec/sdp.hpp"

namespace swiptsec::sdp {

std::string to_string(BlockKind k) {
  switch (k) {
    case BlockKind::RealSym: return "RealSym";
    case BlockKind::HermitianEmbedded: return "HermitianEmbedded";
    case BlockKind::Diagonal: return "Diagonal";
  }
  return "RealSym";
}

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "Optimal";
    case SdpStatus::PrimalInfeasible: return "PrimalInfeasible";
    case SdpStatus::DualInfeasible: return "DualInfeasible";
    case SdpStatus::IllPosed: return "IllPosed";
    case SdpStatus::IterLimit: return "IterLimit";
    case SdpStatus::NumericalFailure: return "NumericalFailure";
  }
  return "NumericalFailure";
}

int SdpProblem::add_block(int dim, BlockKind kind) {
  if (dim <= 0) throw std::invalid_argument("SdpProblem: block dimension must be positive");
  if (kind == BlockKind::HermitianEmbedded && dim % 2 != 0)
    throw std::invalid_argument("SdpProblem: embedded Hermitian block needs even dimension");
  blocks_.push_back({dim, kind});
  objective_.push_back(RMatrix::Zero(dim, dim));
  return num_blocks() - 1;
}

void SdpProblem::check_data(int block, const RMatrix& m) const {
  if (block < 0 || block >= num_blocks()) throw std::invalid_argument("SdpProblem: bad block index");
  const BlockSpec& spec = blocks_[static_cast<std::size_t>(block)];
  if (m.rows() != spec.dim || m.cols() != spec.dim)
    throw std::invalid_argument("SdpProblem: data dimension does not match block");
  if (!m.allFinite()) throw std::invalid_argument("SdpProblem: non-finite data");
  if (m != m.transpose()) throw std::invalid_argument("SdpProblem: data matrix not symmetric");
  if (spec.kind == BlockKind::Diagonal) {
    RMatrix off = m;
    off.diagonal().setZero();
    if (!off.isZero(0.0)) throw std::invalid_argument("SdpProblem: Diagonal block data has off-diagonal entries");
  }
  if (spec.kind == BlockKind::HermitianEmbedded) {
    const auto n = spec.dim / 2;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double tol = 1e-14 * scale;
    const bool ok =
        (m.topLeftCorner(n, n) - m.bottomRightCorner(n, n)).cwiseAbs().maxCoeff() <= tol &&
        (m.topRightCorner(n, n) + m.bottomLeftCorner(n, n)).cwiseAbs().maxCoeff() <= tol;
    if (!ok) throw std::invalid_argument("SdpProblem: data does not commute with the complex structure");
  }
}

void SdpProblem::set_objective(int block, RMatrix c) {
  check_data(block, c);
  objective_[static_cast<std::size_t>(block)] = std::move(c);
}

int SdpProblem::add_constraint(std::vector<Term> terms, double rhs, std::string label) {
  if (!std::isfinite(rhs)) throw std::invalid_argument("SdpProblem: non-finite right-hand side");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    check_data(terms[i].block, terms[i].coeff);
    for (std::size_t j = 0; j < i; ++j)
      if (terms[j].block == terms[i].block)
        throw std::invalid_argument("SdpProblem: block repeated within one constraint");
  }
  constraints_.push_back({std::move(terms), rhs, std::move(label)});
  return num_constraints() - 1;
}

RVector SdpProblem::rhs() const {
  RVector b(num_constraints());
  for (int i = 0; i < num_constraints(); ++i) b(i) = constraints_[static_cast<std::size_t>(i)].rhs;
  return b;
}

int SdpProblem::barrier_degree() const {
  return std::accumulate(blocks_.begin(), blocks_.end(), 0,
                         [](int acc, const BlockSpec& b) { return acc + b.dim; });
}

double inner(const RMatrix& a, const RMatrix& b) { return a.cwiseProduct(b).sum(); }

RVector apply_constraints(const SdpProblem& p, const std::vector<RMatrix>& X) {
  RVector out(p.num_constraints());
  for (int i = 0; i < p.num_constraints(); ++i) {
    double acc = 0.0;
    for (const Term& t : p.constraints()[static_cast<std::size_t>(i)].terms)
      acc += inner(t.coeff, X[static_cast<std::size_t>(t.block)]);
    out(i) = acc;
  }
  return out;
}

std::vector<RMatrix> apply_adjoint(const SdpProblem& p, const RVector& y) {
  std::vector<RMatrix> out;
  out.reserve(static_cast<std::size_t>(p.num_blocks()));
  for (const BlockSpec& b : p.blocks()) out.push_back(RMatrix::Zero(b.dim, b.dim));
  for (int i = 0; i < p.num_constraints(); ++i) {
    if (y(i) == 0.0) continue;
    for (const Term& t : p.constraints()[static_cast<std::size_t>(i)].terms)
      out[static_cast<std::size_t>(t.block)] += y(i) * t.coeff;
  }
  return out;
}

double objective_value(const SdpProblem& p, const std::vector<RMatrix>& X) {
  double acc = 0.0;
  for (int j = 0; j < p.num_blocks(); ++j) acc += inner(p.objective(j), X[static_cast<std::size_t>(j)]);
  return acc;
}

}  // namespace swiptsec::sdp
