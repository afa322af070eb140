#include "swiptsec/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace swiptsec {

using nlohmann::json;

namespace {

json cvec_to_json(const CVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back({v(i).real(), v(i).imag()});
  return a;
}

CVector cvec_from_json(const json& a) {
  if (!a.is_array()) throw std::invalid_argument("expected an array of [re, im] pairs");
  CVector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    const json& z = a[i];
    if (!z.is_array() || z.size() != 2) throw std::invalid_argument("complex entries must be [re, im]");
    v(static_cast<Eigen::Index>(i)) = {z[0].get<double>(), z[1].get<double>()};
  }
  return v;
}

json cmat_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(cvec_to_json(m.row(i).transpose()));
  return rows;
}

CMatrix cmat_from_json(const json& rows) {
  if (!rows.is_array()) throw std::invalid_argument("expected a matrix as an array of rows");
  const auto n = static_cast<Eigen::Index>(rows.size());
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const CVector r = cvec_from_json(rows[static_cast<std::size_t>(i)]);
    if (r.size() != n) throw std::invalid_argument("matrix must be square");
    m.row(i) = r.transpose();
  }
  return m;
}

json params_json(const SystemParams& p) {
  return {{"n_t", p.n_t},         {"k_receivers", p.k_receivers}, {"sigma_s2", p.sigma_s2},
          {"sigma_ant2", p.sigma_ant2}, {"eta", p.eta},             {"gamma_req", p.gamma_req},
          {"gamma_tol", p.gamma_tol}, {"p_min", p.p_min},           {"p_min_k", p.p_min_k},
          {"p_max", p.p_max},         {"p_pg", p.p_pg},             {"p_c", p.p_c},
          {"epsilon", p.epsilon}};
}

std::vector<double> per_receiver(const json& j, const char* key, std::vector<double> fallback, int e) {
  if (!j.contains(key)) {
    const double v = fallback.empty() ? 0.0 : fallback.front();
    return std::vector<double>(static_cast<std::size_t>(e), v);
  }
  const json& x = j.at(key);
  if (x.is_number()) return std::vector<double>(static_cast<std::size_t>(e), x.get<double>());
  return x.get<std::vector<double>>();
}

SystemParams params_parse(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("params must be a JSON object");
  const int n_t = j.value("n_t", 6);
  const int k = j.value("k_receivers", 4);
  const double gdb = j.value("gamma_req_db", 9.0);
  if (k < 1 || n_t < 1) throw std::invalid_argument("params: n_t and k_receivers must be positive");
  SystemParams d = SystemParams::defaults(n_t, std::max(k, 1), gdb);
  SystemParams p = d;
  p.sigma_s2 = j.value("sigma_s2", d.sigma_s2);
  p.sigma_ant2 = j.value("sigma_ant2", d.sigma_ant2);
  p.eta = j.value("eta", d.eta);
  p.gamma_req = j.value("gamma_req", d.gamma_req);
  p.p_min = j.value("p_min", d.p_min);
  p.p_max = j.value("p_max", d.p_max);
  p.p_pg = j.value("p_pg", d.p_pg);
  p.p_c = j.value("p_c", d.p_c);
  p.epsilon = j.value("epsilon", d.epsilon);
  p.k_receivers = k;
  p.gamma_tol = per_receiver(j, "gamma_tol", d.gamma_tol, k - 1);
  p.p_min_k = per_receiver(j, "p_min_k", d.p_min_k, k - 1);
  if (!j.contains("p_max") && (j.contains("p_pg") || j.contains("p_c") || j.contains("epsilon")))
    p.p_max = (p.p_pg - p.p_c) / p.epsilon;
  p.validate();
  return p;
}

json config_json(const ChannelConfig& c) {
  json k = std::isfinite(c.rician_k_db) ? json(c.rician_k_db) : json(nullptr);
  return {{"carrier_hz", c.carrier_hz},       {"ref_dist_m", c.ref_dist_m},
          {"max_dist_m", c.max_dist_m},       {"antenna_gain_db", c.antenna_gain_db},
          {"rician_k_db", k},                 {"breakpoint_m", c.breakpoint_m},
          {"exponent_near", c.exponent_near}, {"exponent_far", c.exponent_far}};
}

ChannelConfig config_parse(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("channel_config must be a JSON object");
  ChannelConfig c;
  c.carrier_hz = j.value("carrier_hz", c.carrier_hz);
  c.ref_dist_m = j.value("ref_dist_m", c.ref_dist_m);
  c.max_dist_m = j.value("max_dist_m", c.max_dist_m);
  c.antenna_gain_db = j.value("antenna_gain_db", c.antenna_gain_db);
  if (j.contains("rician_k_db"))
    c.rician_k_db = j["rician_k_db"].is_null() ? std::numeric_limits<double>::infinity()
                                               : j["rician_k_db"].get<double>();
  c.breakpoint_m = j.value("breakpoint_m", c.breakpoint_m);
  c.exponent_near = j.value("exponent_near", c.exponent_near);
  c.exponent_far = j.value("exponent_far", c.exponent_far);
  c.validate();
  return c;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
  }
}

template <class F>
auto guarded(F f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad JSON field: ") + e.what());
  }
}

json duals_json(const DualCertificate& c) {
  json j = {{"kind", to_string(c.kind)},
            {"lambda", c.lambda},
            {"beta", c.beta},
            {"mu", c.mu},
            {"delta", c.delta},
            {"theta", c.theta},
            {"psi", c.psi},
            {"nu_lo", c.nu_lo},
            {"nu_hi", c.nu_hi},
            {"fixed_rho", c.fixed_rho ? json(*c.fixed_rho) : json(nullptr)},
            {"primal_objective_w", c.primal_objective},
            {"dual_objective_w", c.dual_objective},
            {"ill_posed", c.ill_posed},
            {"Y", cmat_to_json(c.Y)},
            {"Z", cmat_to_json(c.Z)}};
  const KktResiduals& r = c.residuals;
  j["residuals"] = {{"stationarity_W", r.stationarity_W},
                    {"stationarity_V", r.stationarity_V},
                    {"stationarity_rho", r.stationarity_rho},
                    {"complementarity", r.complementarity},
                    {"complementarity_scaled", r.complementarity_scaled},
                    {"slackness", r.slackness},
                    {"dual_feasibility", r.dual_feasibility},
                    {"duality_gap", r.duality_gap}};
  return j;
}

EncodingKind kind_from_string(const std::string& s) {
  for (auto k : {EncodingKind::Relaxed, EncodingKind::Sub1, EncodingKind::Baseline1, EncodingKind::Baseline2})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown encoding kind '" + s + "'");
}

Provenance provenance_from_string(const std::string& s) {
  for (auto p : {Provenance::NotApplicable, Provenance::GlobalOptimal, Provenance::LowerBound})
    if (to_string(p) == s) return p;
  throw std::invalid_argument("unknown provenance '" + s + "'");
}

DualCertificate duals_parse(const json& j) {
  DualCertificate c;
  c.kind = kind_from_string(j.value("kind", std::string("Relaxed")));
  c.lambda = j.at("lambda").get<double>();
  c.beta = j.at("beta").get<std::vector<double>>();
  c.mu = j.at("mu").get<double>();
  c.delta = j.at("delta").get<std::vector<double>>();
  c.theta = j.at("theta").get<double>();
  c.psi = j.at("psi").get<double>();
  c.nu_lo = j.value("nu_lo", 0.0);
  c.nu_hi = j.value("nu_hi", 0.0);
  if (j.contains("fixed_rho") && !j["fixed_rho"].is_null()) c.fixed_rho = j["fixed_rho"].get<double>();
  c.primal_objective = j.value("primal_objective_w", 0.0);
  c.dual_objective = j.value("dual_objective_w", 0.0);
  c.ill_posed = j.value("ill_posed", false);
  if (j.contains("Y")) c.Y = cmat_from_json(j["Y"]);
  if (j.contains("Z")) c.Z = cmat_from_json(j["Z"]);
  if (c.beta.size() != c.delta.size()) throw std::invalid_argument("duals: beta and delta differ in length");
  return c;
}

}  // namespace

std::string params_to_json(const SystemParams& p) { return params_json(p).dump(2); }

SystemParams params_from_json(const std::string& text) {
  return guarded([&] { return params_parse(parse(text)); });
}

std::string channel_config_to_json(const ChannelConfig& c) { return config_json(c).dump(2); }

ChannelConfig channel_config_from_json(const std::string& text) {
  return guarded([&] { return config_parse(parse(text)); });
}

std::string instance_to_json(const Instance& inst) {
  json g = json::array();
  for (const auto& gk : inst.chan.g) g.push_back(cvec_to_json(gk));
  json j = {{"params", params_json(inst.params)},
            {"channel_config", config_json(inst.config)},
            {"seed", inst.chan.seed},
            {"h", cvec_to_json(inst.chan.h)},
            {"g", g}};
  return j.dump(2);
}

Instance instance_from_json(const std::string& text) {
  return guarded([&] {
    const json j = parse(text);
    Instance inst;
    inst.params = params_parse(j.at("params"));
    inst.config = j.contains("channel_config") ? config_parse(j["channel_config"]) : ChannelConfig{};
    inst.chan.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("h")) {
      inst.chan.h = cvec_from_json(j["h"]);
      for (const auto& gk : j.at("g")) inst.chan.g.push_back(cvec_from_json(gk));
    } else {
      inst.chan = draw_channel(inst.params, inst.config, inst.chan.seed);
    }
    inst.chan.validate(inst.params);
    return inst;
  });
}

std::string solution_to_json(SchemeKind scheme, const SchemeResult& r) {
  const BeamformingSolution& s = r.solution;
  json j = {{"scheme", to_string(scheme)},
            {"status", to_string(s.status)},
            {"provenance", to_string(r.provenance)},
            {"objective_w", s.objective},
            {"rho", s.rho},
            {"rank_ratio", s.rank_ratio},
            {"W", cmat_to_json(s.W)},
            {"V", cmat_to_json(s.V)},
            {"w", s.w_extracted ? cvec_to_json(*s.w_extracted) : json(nullptr)},
            {"detail", s.detail}};
  if (r.certificate) j["duals"] = duals_json(*r.certificate);
  return j.dump(2);
}

StoredSolution solution_from_json(const std::string& text) {
  return guarded([&] {
    const json j = parse(text);
    StoredSolution out;
    out.scheme = j.value("scheme", std::string("relaxed"));
    BeamformingSolution& s = out.solution;
    s.W = cmat_from_json(j.at("W"));
    s.V = cmat_from_json(j.at("V"));
    if (s.W.rows() != s.V.rows()) throw std::invalid_argument("W and V differ in size");
    s.rho = j.at("rho").get<double>();
    s.objective = j.value("objective_w", s.W.trace().real() + s.V.trace().real());
    s.status = solution_status_from_string(j.value("status", std::string("Optimal")));
    s.rank_ratio = j.value("rank_ratio", 1.0);
    if (j.contains("w") && !j["w"].is_null()) s.w_extracted = cvec_from_json(j["w"]);
    s.detail = j.value("detail", std::string());
    out.provenance = provenance_from_string(j.value("provenance", std::string("n/a")));
    if (j.contains("duals") && !j["duals"].is_null()) out.duals = duals_parse(j["duals"]);
    return out;
  });
}

std::string certificate_to_json(const DualCertificate& cert) { return duals_json(cert).dump(2); }

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw std::runtime_error("error reading " + path.string());
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("error writing " + path.string());
}

}  // namespace swiptsec
