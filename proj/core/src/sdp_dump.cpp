// Plain-text sparse triplet format, one record per line:
//
//   swiptsec-sdp 1
//   blocks <n>
//   block <j> <dim> <kind>
//   objective
//   <block> <i> <j> <value>        (upper triangle, 0-based)
//   end
//   constraint <row> <rhs> <label>
//   <block> <i> <j> <value>
//   end
//
// Lines starting with '#' are comments.

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "swiptsec/sdp.hpp"

namespace swiptsec::sdp {

namespace {

void write_triplets(std::ostream& os, int block, const RMatrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i; j < m.cols(); ++j)
      if (m(i, j) != 0.0) os << block << ' ' << i << ' ' << j << ' ' << m(i, j) << '\n';
}

BlockKind kind_from_string(const std::string& s) {
  if (s == "RealSym") return BlockKind::RealSym;
  if (s == "HermitianEmbedded") return BlockKind::HermitianEmbedded;
  if (s == "Diagonal") return BlockKind::Diagonal;
  throw std::invalid_argument("read_problem: unknown block kind '" + s + "'");
}

bool next_line(std::istream& is, std::string& line) {
  while (std::getline(is, line)) {
    if (!line.empty() && line[0] != '#') return true;
  }
  return false;
}

}  // namespace

void write_problem(std::ostream& os, const SdpProblem& p, const std::vector<std::string>& row_notes) {
  const auto old_flags = os.flags();
  const auto old_prec = os.precision();
  os << std::setprecision(17);
  os << "swiptsec-sdp 1\n";
  os << "blocks " << p.num_blocks() << '\n';
  for (int j = 0; j < p.num_blocks(); ++j)
    os << "block " << j << ' ' << p.block(j).dim << ' ' << to_string(p.block(j).kind) << '\n';
  os << "objective\n";
  for (int j = 0; j < p.num_blocks(); ++j) write_triplets(os, j, p.objective(j));
  os << "end\n";
  for (int i = 0; i < p.num_constraints(); ++i) {
    const Constraint& c = p.constraints()[static_cast<std::size_t>(i)];
    if (static_cast<std::size_t>(i) < row_notes.size() && !row_notes[static_cast<std::size_t>(i)].empty())
      os << "# " << row_notes[static_cast<std::size_t>(i)] << '\n';
    os << "constraint " << i << ' ' << c.rhs << ' ' << (c.label.empty() ? "-" : c.label) << '\n';
    for (const Term& t : c.terms) write_triplets(os, t.block, t.coeff);
    os << "end\n";
  }
  os.flags(old_flags);
  os.precision(old_prec);
}

SdpProblem read_problem(std::istream& is) {
  SdpProblem p;
  std::string line;
  if (!next_line(is, line) || line.rfind("swiptsec-sdp", 0) != 0)
    throw std::invalid_argument("read_problem: missing header");
  if (!next_line(is, line)) throw std::invalid_argument("read_problem: truncated");
  int nblocks = 0;
  {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag >> nblocks;
    if (tag != "blocks" || nblocks <= 0) throw std::invalid_argument("read_problem: bad blocks line");
  }
  for (int j = 0; j < nblocks; ++j) {
    if (!next_line(is, line)) throw std::invalid_argument("read_problem: truncated block list");
    std::istringstream ss(line);
    std::string tag, kind;
    int idx = 0, dim = 0;
    ss >> tag >> idx >> dim >> kind;
    if (tag != "block" || idx != j) throw std::invalid_argument("read_problem: bad block line");
    p.add_block(dim, kind_from_string(kind));
  }

  auto read_terms = [&](std::vector<RMatrix>& mats) {
    mats.clear();
    for (const BlockSpec& b : p.blocks()) mats.push_back(RMatrix::Zero(b.dim, b.dim));
    while (true) {
      if (!next_line(is, line)) throw std::invalid_argument("read_problem: missing 'end'");
      if (line == "end") return;
      std::istringstream ss(line);
      int blk = 0;
      Eigen::Index i = 0, k = 0;
      double v = 0.0;
      if (!(ss >> blk >> i >> k >> v) || blk < 0 || blk >= p.num_blocks())
        throw std::invalid_argument("read_problem: bad triplet '" + line + "'");
      auto& m = mats[static_cast<std::size_t>(blk)];
      m(i, k) = v;
      m(k, i) = v;
    }
  };

  std::vector<RMatrix> mats;
  if (!next_line(is, line) || line != "objective") throw std::invalid_argument("read_problem: expected objective");
  read_terms(mats);
  for (int j = 0; j < nblocks; ++j) p.set_objective(j, mats[static_cast<std::size_t>(j)]);

  while (next_line(is, line)) {
    std::istringstream ss(line);
    std::string tag, label;
    int row = 0;
    double rhs = 0.0;
    ss >> tag >> row >> rhs >> label;
    if (tag != "constraint") throw std::invalid_argument("read_problem: expected constraint");
    read_terms(mats);
    std::vector<Term> terms;
    for (int j = 0; j < nblocks; ++j)
      if (!mats[static_cast<std::size_t>(j)].isZero(0.0)) terms.push_back({j, mats[static_cast<std::size_t>(j)]});
    p.add_constraint(std::move(terms), rhs, label == "-" ? std::string{} : label);
  }
  return p;
}

void write_solution(std::ostream& os, const SdpProblem& p, const SdpSolution& s) {
  const auto old_prec = os.precision();
  os << std::setprecision(17);
  os << "swiptsec-sdp-solution 1\n";
  os << "status " << to_string(s.status) << '\n';
  os << "iterations " << s.iterations << '\n';
  os << "objective " << s.primal_objective << ' ' << s.dual_objective << '\n';
  os << "residuals " << s.residuals.primal << ' ' << s.residuals.dual << ' ' << s.residuals.gap << '\n';
  os << "y";
  for (Eigen::Index i = 0; i < s.y.size(); ++i) os << ' ' << s.y(i);
  os << "\nX\n";
  for (int j = 0; j < p.num_blocks() && static_cast<std::size_t>(j) < s.X.size(); ++j)
    write_triplets(os, j, s.X[static_cast<std::size_t>(j)]);
  os << "end\nS\n";
  for (int j = 0; j < p.num_blocks() && static_cast<std::size_t>(j) < s.S.size(); ++j)
    write_triplets(os, j, s.S[static_cast<std::size_t>(j)]);
  os << "end\n";
  os.precision(old_prec);
}

}  // namespace swiptsec::sdp
