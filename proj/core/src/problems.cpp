#include "swiptsec/problems.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <Eigen/QR>

namespace swiptsec {

std::string to_string(EncodingKind k) {
  switch (k) {
    case EncodingKind::Relaxed: return "Relaxed";
    case EncodingKind::Sub1: return "Sub1";
    case EncodingKind::Baseline1: return "Baseline1";
    case EncodingKind::Baseline2: return "Baseline2";
  }
  return "Relaxed";
}

const NamedRow* ProblemEncoding::find(const std::string& name) const {
  for (const auto& r : rows)
    if (r.name == name) return &r;
  return nullptr;
}

CMatrix null_space_basis(const CVector& h) {
  const auto n = h.size();
  const CMatrix proj = CMatrix::Identity(n, n) - h * h.adjoint() / h.squaredNorm();
  Eigen::ColPivHouseholderQR<CMatrix> qr(proj);
  const CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  return q.leftCols(n - 1);
}

int add_hyperbolic_block(sdp::SdpProblem& sdp, double c, const std::string& label) {
  const int blk = sdp.add_block(2, sdp::BlockKind::RealSym);
  RMatrix off = RMatrix::Zero(2, 2);
  off(0, 1) = 0.5;
  off(1, 0) = 0.5;
  sdp.add_constraint({{blk, off}}, c, label + ".offdiag");
  return blk;
}

namespace {

RMatrix unit(int dim, int i, int j) {
  RMatrix m = RMatrix::Zero(dim, dim);
  m(i, j) = 1.0;
  m(j, i) = 1.0;
  return m;
}

/// Coefficient for Re tr(A X) on an embedded block.
RMatrix complex_coeff(const CMatrix& a) { return 0.5 * sdp::embed_hermitian(a); }

struct Builder {
  const SystemParams& params;
  const ChannelRealization& chan;
  EncodingKind kind;
  std::optional<double> fixed_rho;
  bool null_space = false;
  bool c10 = false;

  Builder(const SystemParams& p, const ChannelRealization& c, EncodingKind k, std::optional<double> r)
      : params(p), chan(c), kind(k), fixed_rho(r) {}

  ProblemEncoding enc;
  struct PendingRow {
    std::vector<sdp::Term> terms;
    double rhs;
    std::string name;
    Sense sense;
    double mscale;
    bool named;
    std::string note;
    bool has_slack;
  };
  std::vector<PendingRow> pending;

  CMatrix v_coeff(const CMatrix& a) const {
    // Tr(A V) with V = B Q B^H equals Tr(B^H A B Q).
    return enc.v_basis.adjoint() * a * enc.v_basis;
  }

  double p0() const { return enc.power_scale; }

  void add_row(std::vector<sdp::Term> terms, double rhs, const std::string& name, Sense sense,
               double divisor, bool has_slack, const std::string& note) {
    const double mscale = (sense == Sense::GreaterEq ? 1.0 : -1.0) * p0() / divisor;
    pending.push_back({std::move(terms), rhs, name, sense, mscale, true, note, has_slack});
  }

  void add_structural(std::vector<sdp::Term> terms, double rhs, const std::string& name,
                      const std::string& note) {
    pending.push_back({std::move(terms), rhs, name, Sense::GreaterEq, 0.0, false, note, false});
  }

  ProblemEncoding build();
};

ProblemEncoding Builder::build() {
  params.validate();
  chan.validate(params);
  const int n = params.n_t;
  const int e = params.eavesdroppers();
  enc.kind = kind;
  enc.fixed_rho = fixed_rho;
  if (fixed_rho && !(*fixed_rho > 0.0 && *fixed_rho < 1.0))
    throw std::invalid_argument("fixed split ratio must lie in (0, 1)");

  const double hh = chan.h.squaredNorm();
  {
    double p = params.gamma_req * (params.sigma_s2 + params.sigma_ant2) / hh;
    p = std::max(p, params.p_min / (params.eta * hh));
    for (int k = 0; k < e; ++k)
      p = std::max(p, params.p_min_k[static_cast<std::size_t>(k)] /
                          (params.eta * chan.g[static_cast<std::size_t>(k)].squaredNorm()));
    enc.power_scale = p > 0.0 ? p : 1.0;
  }
  enc.channel_scale.push_back(p0() * hh);
  for (const auto& g : chan.g) enc.channel_scale.push_back(p0() * g.squaredNorm());

  enc.v_basis = null_space ? null_space_basis(chan.h) : CMatrix::Identity(n, n);
  const int nv = static_cast<int>(enc.v_basis.cols());

  auto& sdp = enc.sdp;
  enc.w_block = sdp.add_block(2 * n, sdp::BlockKind::HermitianEmbedded);
  enc.v_block = sdp.add_block(2 * nv, sdp::BlockKind::HermitianEmbedded);
  sdp.set_objective(enc.w_block, complex_coeff(CMatrix::Identity(n, n)));
  sdp.set_objective(enc.v_block, complex_coeff(CMatrix::Identity(nv, nv)));

  const double d_h = enc.channel_scale[0];
  const CVector hn = chan.h / std::sqrt(hh);
  const CMatrix Hn = hn * hn.adjoint();
  const double gsig = params.gamma_req * params.sigma_s2;
  const bool variable_rho = !fixed_rho.has_value();
  const bool with_c3 = params.p_min > 0.0;

  if (variable_rho) {
    enc.sinr_block = add_hyperbolic_block(sdp, std::sqrt(gsig / d_h), "link:C1");
    enc.row_notes.push_back("C1 epigraph: t1 * rho >= Gamma_req sigma_s^2");
    if (with_c3) {
      enc.harvest_block =
          add_hyperbolic_block(sdp, std::sqrt(params.p_min / (params.eta * d_h)), "link:C3");
      enc.row_notes.push_back("C3 epigraph: t2 * (1 - rho) >= P_min / eta");
      add_structural({{enc.sinr_block, unit(2, 1, 1)}, {enc.harvest_block, unit(2, 1, 1)}}, 1.0,
                     "link:rho", "rho + (1 - rho) = 1");
    }
  }
  // Remaining rows are buffered so the slack block can be sized first.

  // C1
  {
    std::vector<sdp::Term> t{{enc.w_block, complex_coeff(Hn)},
                             {enc.v_block, complex_coeff(-params.gamma_req * v_coeff(Hn))}};
    double rhs = params.gamma_req * params.sigma_ant2 / d_h;
    if (variable_rho) {
      RMatrix m = RMatrix::Zero(2, 2);
      m(0, 0) = -1.0;
      t.push_back({enc.sinr_block, m});
    } else {
      rhs += gsig / (*fixed_rho) / d_h;
    }
    add_row(std::move(t), rhs, "C1", Sense::GreaterEq, d_h, true, "C1: SINR of the desired receiver");
  }
  // C2
  for (int k = 0; k < e; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    const double d = enc.channel_scale[ks + 1];
    const CVector gn = chan.g[ks].normalized();
    const CMatrix G = gn * gn.adjoint();
    const double tol = params.gamma_tol[ks];
    add_row({{enc.w_block, complex_coeff(G)}, {enc.v_block, complex_coeff(-tol * v_coeff(G))}},
            tol * (params.sigma_ant2 + params.sigma_s2) / d, "C2[" + std::to_string(k + 1) + "]",
            Sense::LessEq, d, true, "C2: eavesdropper SINR cap");
  }
  // C3
  if (with_c3) {
    std::vector<sdp::Term> t{{enc.w_block, complex_coeff(Hn)}, {enc.v_block, complex_coeff(v_coeff(Hn))}};
    double rhs = -params.sigma_ant2 / d_h;
    if (variable_rho) {
      RMatrix m = RMatrix::Zero(2, 2);
      m(0, 0) = -1.0;
      t.push_back({enc.harvest_block, m});
    } else {
      rhs += params.p_min / (params.eta * (1.0 - *fixed_rho)) / d_h;
    }
    add_row(std::move(t), rhs, "C3", Sense::GreaterEq, d_h, true, "C3: desired-receiver harvest");
  }
  // C4 or C10
  for (int k = 0; k < e; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    if (!(params.p_min_k[ks] > 0.0)) continue;
    const double d = enc.channel_scale[ks + 1];
    const CVector gn = chan.g[ks].normalized();
    const CMatrix G = gn * gn.adjoint();
    std::vector<sdp::Term> t;
    if (!c10) t.push_back({enc.w_block, complex_coeff(G)});
    t.push_back({enc.v_block, complex_coeff(v_coeff(G))});
    const std::string name = (c10 ? "C10[" : "C4[") + std::to_string(k + 1) + "]";
    add_row(std::move(t), (params.p_min_k[ks] / params.eta - params.sigma_ant2) / d, name,
            Sense::GreaterEq, d, true, c10 ? "C10: idle-receiver harvest from AN" : "C4: idle-receiver harvest");
  }
  // C5, C6
  add_row({{enc.w_block, complex_coeff(CMatrix::Identity(n, n))},
           {enc.v_block, complex_coeff(CMatrix::Identity(nv, nv))}},
          params.p_max / p0(), "C5", Sense::LessEq, p0(), true, "C5: radiated power cap");
  add_row({{enc.w_block, complex_coeff(params.epsilon * CMatrix::Identity(n, n))},
           {enc.v_block, complex_coeff(params.epsilon * CMatrix::Identity(nv, nv))}},
          (params.p_pg - params.p_c) / p0(), "C6", Sense::LessEq, p0(), true, "C6: grid supply cap");
  // C7
  if (variable_rho) {
    RMatrix r = RMatrix::Zero(2, 2);
    r(1, 1) = 1.0;
    add_row({{enc.sinr_block, r}}, 0.0, "C7.lo", Sense::GreaterEq, 1.0, true, "C7: rho >= 0");
    add_row({{enc.sinr_block, r}}, 1.0, "C7.hi", Sense::LessEq, 1.0, true, "C7: rho <= 1");
  }

  int nslack = 0;
  for (const auto& r : pending)
    if (r.has_slack) ++nslack;
  if (nslack > 0) {
    enc.slack_block = sdp.add_block(nslack, sdp::BlockKind::Diagonal);
  }
  int slack = 0;
  for (auto& r : pending) {
    NamedRow nr;
    nr.name = r.name;
    nr.sense = r.sense;
    nr.multiplier_scale = r.mscale;
    if (r.has_slack) {
      RMatrix s = RMatrix::Zero(nslack, nslack);
      s(slack, slack) = r.sense == Sense::GreaterEq ? -1.0 : 1.0;
      r.terms.push_back({enc.slack_block, s});
      nr.slack_index = slack++;
    }
    nr.row = sdp.add_constraint(std::move(r.terms), r.rhs, r.name);
    enc.row_notes.push_back(r.note);
    if (r.named) enc.rows.push_back(nr);
  }
  return std::move(enc);
}

}  // namespace

ProblemEncoding build_relaxed(const SystemParams& params, const ChannelRealization& chan) {
  return Builder{params, chan, EncodingKind::Relaxed, std::nullopt}.build();
}

ProblemEncoding build_sub1(const SystemParams& params, const ChannelRealization& chan) {
  Builder b{params, chan, EncodingKind::Sub1, std::nullopt};
  b.c10 = true;
  return b.build();
}

ProblemEncoding build_baseline(const SystemParams& params, const ChannelRealization& chan,
                               std::optional<double> fixed_rho) {
  Builder b{params, chan, fixed_rho ? EncodingKind::Baseline2 : EncodingKind::Baseline1, fixed_rho};
  b.null_space = true;
  return b.build();
}

ProblemEncoding build_fixed_rho(const SystemParams& params, const ChannelRealization& chan,
                                EncodingKind kind, double rho) {
  if (kind != EncodingKind::Relaxed && kind != EncodingKind::Sub1)
    throw std::invalid_argument("build_fixed_rho: only Relaxed and Sub1 have a free split ratio");
  Builder b{params, chan, kind, rho};
  b.c10 = kind == EncodingKind::Sub1;
  return b.build();
}

DecodedSolution decode(const ProblemEncoding& enc, const sdp::SdpSolution& sol) {
  DecodedSolution d;
  const double p0 = enc.power_scale;
  d.W = p0 * sdp::extract_complex(sol.X.at(static_cast<std::size_t>(enc.w_block)));
  const CMatrix q = sdp::extract_complex(sol.X.at(static_cast<std::size_t>(enc.v_block)));
  d.V = p0 * enc.v_basis * q * enc.v_basis.adjoint();
  d.V = 0.5 * (d.V + d.V.adjoint()).eval();
  if (enc.fixed_rho) {
    d.rho = *enc.fixed_rho;
  } else {
    d.rho = std::clamp(sol.X.at(static_cast<std::size_t>(enc.sinr_block))(1, 1), 0.0, 1.0);
  }
  d.objective = d.W.trace().real() + d.V.trace().real();
  return d;
}

void write_encoding(std::ostream& os, const ProblemEncoding& enc) {
  os << "# encoding " << to_string(enc.kind);
  if (enc.fixed_rho) os << " fixed_rho=" << *enc.fixed_rho;
  os << " power_scale=" << enc.power_scale << '\n';
  std::vector<std::string> notes(static_cast<std::size_t>(enc.sdp.num_constraints()));
  for (int i = 0; i < enc.sdp.num_constraints(); ++i) {
    const auto is = static_cast<std::size_t>(i);
    std::ostringstream ss;
    ss << enc.sdp.constraints()[is].label;
    if (is < enc.row_notes.size()) ss << " | " << enc.row_notes[is];
    for (const auto& r : enc.rows)
      if (r.row == i) ss << " | multiplier_scale=" << r.multiplier_scale;
    notes[is] = ss.str();
  }
  sdp::write_problem(os, enc.sdp, notes);
}

}  // namespace swiptsec
