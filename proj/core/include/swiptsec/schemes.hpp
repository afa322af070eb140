#pragma once

#include <optional>
#include <string>

#include "swiptsec/certify.hpp"
#include "swiptsec/model.hpp"
#include "swiptsec/problems.hpp"
#include "swiptsec/sdp.hpp"

namespace swiptsec {

enum class SchemeKind { Relaxed, Sub1, Scheme2, Baseline1, Baseline2 };

std::string to_string(SchemeKind k);
/// Accepts the lowercase names used on the command line and in configs.
SchemeKind scheme_from_string(const std::string& s);

enum class Provenance { NotApplicable, GlobalOptimal, LowerBound };

std::string to_string(Provenance p);

struct SchemeOptions {
  double solver_tol = 1e-9;
  int max_iter = 200;
  double rank_tol = 1e-6;
  bool parallel_scheme2 = false;  // run the two scheme-2 solves on separate threads
};

struct SchemeResult {
  BeamformingSolution solution;
  std::optional<DualCertificate> certificate;
  Provenance provenance = Provenance::NotApplicable;
  sdp::SdpStatus sdp_status = sdp::SdpStatus::NumericalFailure;
  int iterations = 0;
};

struct RankOneExtraction {
  std::optional<CVector> w;  // set when lambda2/lambda1 <= rank_tol
  double ratio = 1.0;
  bool zero = false;         // Tr W = 0: w is the zero vector
};

/// Principal eigenvector scaled to sqrt(lambda1), phase fixed so the first
/// component of significant magnitude is real and positive.
RankOneExtraction extract_rank_one(const CMatrix& W, double rank_tol = 1e-6);

/// Solve an encoding and map the result to a BeamformingSolution. The
/// certificate is attached on Optimal solves of the relaxed-type encodings.
SchemeResult solve_encoding(const SystemParams& params, const ChannelRealization& chan,
                            const ProblemEncoding& enc, const SchemeOptions& opts = {});

SchemeResult solve_relaxed(const SystemParams& params, const ChannelRealization& chan,
                           const SchemeOptions& opts = {});

/// Throws InvariantViolation if an Optimal solve is not rank one.
SchemeResult solve_sub1(const SystemParams& params, const ChannelRealization& chan,
                        const SchemeOptions& opts = {});

/// Runs the relaxed problem and Sub1; returns the relaxed solution flagged
/// GlobalOptimal when it is rank one, else the Sub1 solution flagged
/// LowerBound.
SchemeResult solve_scheme2(const SystemParams& params, const ChannelRealization& chan,
                           const SchemeOptions& opts = {});

/// The selection step of scheme 2 on already computed results.
SchemeResult select_scheme2(SchemeResult relaxed, SchemeResult sub1);

/// which = 1: split ratio optimized; which = 2: split ratio fixed at 0.5.
SchemeResult solve_baseline(const SystemParams& params, const ChannelRealization& chan, int which,
                            const SchemeOptions& opts = {});

SchemeResult run_scheme(SchemeKind kind, const SystemParams& params, const ChannelRealization& chan,
                        const SchemeOptions& opts = {});

}  // namespace swiptsec
