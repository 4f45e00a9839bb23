// perdec: analysis, cyclic Hermite form, decoupling synthesis, simulation
// and verification for linear periodic systems given as JSON documents.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "perdec/perdec.hpp"

using namespace perdec;

namespace {

enum Exit {
  Ok = 0,
  Usage = 1,
  Unsolvable = 2,
  Unstable = 3,
  Unreachable = 4,
  Inconclusive = 5,
  Failed = 6,
  Other = 7,
};

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse:
    case ErrorKind::InvalidSystem:
    case ErrorKind::DimensionMismatch: return Usage;
    case ErrorKind::NotSolvable:
    case ErrorKind::NotFound: return Unsolvable;
    case ErrorKind::NotStable: return Unstable;
    case ErrorKind::NotOutputReachable: return Unreachable;
    case ErrorKind::BoundExceeded: return Inconclusive;
    case ErrorKind::ConstructionFailed:
    case ErrorKind::NotBlockDiagonal:
    case ErrorKind::NoConstantSolution: return Failed;
    default: return Other;
  }
}

// Collects a report once and renders it either as aligned text or as JSON
// with exact numbers.
class Report {
 public:
  void value(const std::string& key, const Json& v) {
    node()[key] = v;
    line(key + ": " + (v.is_string() ? v.get<std::string>() : v.dump()));
  }
  void matrix(const std::string& key, const QMatrix& m, int rb = 0, int cb = 0) {
    node()[key] = matrix_to_json(m);
    line(key + " (" + dims(m.rows(), m.cols()) + "):");
    block(render(m, rb, cb));
  }
  void matrix(const std::string& key, const RatMat& m, int rb = 0, int cb = 0) {
    node()[key] = ratmat_to_json(m);
    line(key + " (" + dims(m.rows(), m.cols()) + "):");
    block(render(m, rb, cb));
  }
  void lists(const std::string& key, const std::vector<IntList>& l) {
    Json a = Json::array();
    std::string t;
    for (std::size_t i = 0; i < l.size(); ++i) {
      a.push_back(l[i]);
      t += (i ? ", " : "") + to_string(l[i]);
    }
    node()[key] = a;
    line(key + ": " + t);
  }
  void polys(const std::string& key, const std::vector<std::vector<Poly>>& l) {
    Json a = Json::array();
    std::string t;
    for (std::size_t i = 0; i < l.size(); ++i) {
      Json b = Json::array();
      t += i ? "; " : "";
      for (std::size_t j = 0; j < l[i].size(); ++j) {
        b.push_back(poly_to_json(l[i][j]));
        t += (j ? ", " : "") + l[i][j].to_string();
      }
      a.push_back(b);
    }
    node()[key] = a;
    line(key + ": " + t);
  }
  void law(const std::string& key, const FeedbackLaw& law) {
    open(key);
    for (std::size_t t = 0; t < law.F.size(); ++t) {
      matrix("F[" + std::to_string(t) + "]", law.F[t]);
      matrix("G[" + std::to_string(t) + "]", law.G[t]);
    }
    node() = law_to_json(law);
    close();
  }
  void system(const std::string& key, const PeriodicSystem& s) {
    open(key);
    for (int t = 0; t < s.T; ++t) {
      matrix("A[" + std::to_string(t) + "]", s.A[t]);
      matrix("B[" + std::to_string(t) + "]", s.B[t]);
      matrix("C[" + std::to_string(t) + "]", s.C[t]);
      matrix("D[" + std::to_string(t) + "]", s.D[t]);
    }
    node() = system_to_json(s);
    close();
  }
  void open(const std::string& key) {
    line(key + ":");
    path_.push_back(key);
  }
  void close() { path_.pop_back(); }

  std::string render_as(bool machine) const { return machine ? root_.dump(2) + "\n" : text_.str(); }

 private:
  Json& node() {
    Json* j = &root_;
    for (const auto& k : path_) j = &(*j)[k];
    return *j;
  }
  std::string indent() const { return std::string(2 * path_.size(), ' '); }
  void line(const std::string& s) { text_ << indent() << s << "\n"; }
  void block(const std::string& s) {
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) text_ << indent() << l << "\n";
  }
  static std::string dims(int r, int c) { return std::to_string(r) + "x" + std::to_string(c); }

  Json root_ = Json::object();
  std::vector<std::string> path_;
  std::ostringstream text_;
};

struct Options {
  std::string system_path;
  long tau = 0;
  std::optional<int> horizon;
  std::optional<int> step10_bound;
  std::string format = "text";
  std::string output;
  std::string law_path;
  std::string input = "impulse";
  std::string signal_path;
  int steps = 8;
  long t0 = 0;
};

struct Document {
  Json json;
  PeriodicSystem system;
  std::optional<FeedbackLaw> stabilizer;
};

Document load(const Options& o) {
  Document d;
  d.json = load_json_file(o.system_path);
  d.system = system_from_json(d.json);
  if (d.json.contains("stabilizing_feedback")) d.stabilizer = law_from_json(d.json["stabilizing_feedback"], d.system);
  return d;
}

int horizon_of(const Options& o, const Document& d, const PeriodicSystem& s) {
  if (o.horizon) return *o.horizon;
  if (d.json.contains("options") && d.json["options"].contains("horizon")) return d.json["options"]["horizon"].get<int>();
  return default_horizon(s);
}

int step10_bound_of(const Options& o, const Document& d) {
  if (o.step10_bound) return *o.step10_bound;
  if (d.json.contains("options") && d.json["options"].contains("step10_bound"))
    return d.json["options"]["step10_bound"].get<int>();
  return SearchOptions{}.step10_bound;
}

void report_check(Report& r, const DecouplingReport& c, bool nilpotent_known = false, bool nilpotent = false) {
  r.open("verification");
  r.value("diagonal", c.diagonal);
  if (c.offending) {
    const auto& o = *c.offending;
    r.value("offending", Json{{"i", o.i}, {"t", o.t}, {"row", o.row}, {"col", o.col}});
  }
  r.value("stable", c.stable);
  r.value("output_reachable", c.output_reachable);
  r.value("horizon", c.horizon);
  if (nilpotent_known) r.value("nilpotent_monodromy", nilpotent);
  r.close();
}

void report_invariants(Report& r, const DecouplingInvariants& inv, int p) {
  r.open("invariants");
  r.polys("d", inv.d);
  r.lists("delta", inv.delta);
  r.polys("f", inv.f);
  r.lists("phi", inv.phi);
  r.lists("sigma", inv.sigma);
  r.lists("sigma_free", inv.sigma_free);
  r.matrix("delta_star", inv.delta_star, p, p);
  r.matrix("interactor", inv.interactor, p, p);
  r.close();
}

void report_realization(Report& r, const RealizationResult& re) {
  r.open("realization");
  r.matrix("K", re.Kbar);
  r.matrix("F", re.Fbar);
  r.matrix("G", re.Gbar);
  r.value("sign_flipped", re.flipped_sign);
  r.close();
}

int cmd_analyze(const Options& o, Report& r) {
  auto d = load(o);
  const auto& s = d.system;
  r.value("period", s.T);
  r.value("inputs", s.m);
  r.value("outputs", s.p);
  r.value("stable", is_stable(s));
  r.value("output_reachable", output_reachable(s));
  auto mono = monodromy(s, o.tau);
  r.matrix("monodromy", mono.psi);
  r.value("monodromy_charpoly", charpoly(mono.psi).to_string());
  r.value("nonzero_spectrum_polynomial", nonzero_spectrum(s, o.tau).to_string());
  r.value("nilpotent_monodromy", is_nilpotent(mono.psi));
  if (d.stabilizer) r.value("stabilized_stable", is_stable(apply_feedback(s, *d.stabilizer)));
  PeriodicSystem target = d.stabilizer ? apply_feedback(s, *d.stabilizer) : s;
  if (!is_stable(target)) {
    r.value("decoupling", "skipped: system is not stable; stabilize it first");
    return Ok;
  }
  auto b = build_cyclic(target, o.tau);
  auto h = cyclic_hermite(b);
  if (s.m == s.p) {
    r.value("square_solvable", square_solvable(h.hermite.H, s.p, s.T));
  } else if (s.m > s.p && output_reachable(target)) {
    auto sf = standard_form(target, b, h);
    report_invariants(r, decoupling_invariants(h, sf.chains, s.p, s.m, s.T), s.p);
  }
  return Ok;
}

int cmd_hermite(const Options& o, Report& r) {
  auto d = load(o);
  PeriodicSystem s = d.stabilizer ? apply_feedback(d.system, *d.stabilizer) : d.system;
  if (d.stabilizer) r.value("stabilizing_feedback_applied", true);
  if (!is_stable(s)) throw Error(ErrorKind::NotStable, "system is not stable; stabilize it first");
  auto b = build_cyclic(s, o.tau);
  auto h = cyclic_hermite(b);
  r.value("tau", static_cast<long long>(o.tau));
  r.value("shift", h.shift);
  r.matrix("W", b.Wbar, s.p, s.m);
  r.matrix("Delta", h.hermite.H, s.p, s.m);
  r.matrix("U", h.hermite.U, s.m, s.m);
  Json log = Json::array();
  for (const auto& l : h.log) log.push_back(l);
  r.value("log", log);
  Json v = Json::array();
  for (const auto& x : cyclic_hermite_violations(b, h)) v.push_back(x);
  r.value("violations", v);
  return Ok;
}

int cmd_decouple(const Options& o, Report& r) {
  auto d = load(o);
  PeriodicSystem s = d.system;
  if (d.stabilizer) {
    s = apply_feedback(s, *d.stabilizer);
    r.value("stabilizing_feedback_applied", true);
  }
  FeedbackLaw inner;
  PeriodicSystem closed;
  if (s.m == s.p) {
    auto res = decouple_square(s, o.tau);
    r.value("case", "square");
    r.matrix("W", res.bundle.Wbar, s.p, s.m);
    r.matrix("Delta", res.hermite.hermite.H, s.p, s.m);
    r.matrix("U", res.hermite.hermite.U, s.m, s.m);
    report_realization(r, res.realization);
    inner = res.realization.law;
    closed = res.closed;
  } else if (s.m > s.p) {
    SearchOptions opt;
    opt.step10_bound = step10_bound_of(o, d);
    auto res = decouple_nonsquare(s, o.tau, opt);
    r.value("case", "nonsquare");
    r.matrix("W", res.bundle.Wbar, s.p, s.m);
    r.matrix("Delta", res.hermite.hermite.H, s.p, s.m);
    r.matrix("U", res.hermite.hermite.U, s.m, s.m);
    report_invariants(r, res.invariants, s.p);
    r.open("candidate_lists");
    r.lists("epsilon", res.search.lists.epsilon);
    r.lists("eta", res.search.lists.eta);
    r.lists("eta_star", res.search.lists.eta_star);
    r.lists("omega", res.search.lists.omega);
    r.value("step10_iterations", res.search.step10_iterations);
    Json notes = Json::array();
    for (const auto& n : res.search.check.notes) notes.push_back(n);
    r.value("notes", notes);
    r.close();
    r.open("compensator");
    r.matrix("Z1", res.parts.Z1, s.p, s.p);
    r.matrix("V22", res.parts.V22);
    r.matrix("V21", res.parts.V21);
    r.matrix("Z2", res.parts.Z2);
    r.matrix("V", res.parts.Vbar, s.m, s.m);
    r.matrix("Z", res.parts.Zbar, s.m, s.p);
    r.matrix("L", res.parts.Lbar, s.m, s.p);
    r.close();
    report_realization(r, res.realization);
    inner = res.realization.law;
    closed = res.closed;
  } else {
    throw Error(ErrorKind::DimensionMismatch, "decoupling needs at least as many inputs as outputs");
  }
  FeedbackLaw total = d.stabilizer ? compose(*d.stabilizer, inner) : inner;
  if (d.stabilizer) r.law("decoupling_law", inner);
  r.law("law", total);
  r.value("law_regular", total.is_regular());
  r.system("closed_loop", closed);
  r.matrix("closed_loop_W", build_cyclic(closed, o.tau).Wbar, s.p, s.p);
  auto check = verify_decoupled(closed, horizon_of(o, d, closed));
  bool nil = is_nilpotent(monodromy(closed, o.tau).psi);
  report_check(r, check, true, nil);
  return check.diagonal && check.stable ? Ok : Failed;
}

int cmd_verify(const Options& o, Report& r) {
  auto d = load(o);
  PeriodicSystem s = d.system;
  if (!o.law_path.empty()) {
    auto law = law_from_json(load_json_file(o.law_path), s);
    s = apply_feedback(s, law);
    r.value("law_applied", true);
  }
  auto check = verify_decoupled(s, horizon_of(o, d, s));
  report_check(r, check);
  if (!check.diagonal) return Unsolvable;
  if (!check.stable) return Unstable;
  if (!check.output_reachable) return Unreachable;
  return Ok;
}

int cmd_simulate(const Options& o, Report& r) {
  auto d = load(o);
  PeriodicSystem s = d.system;
  if (!o.law_path.empty()) s = apply_feedback(s, law_from_json(load_json_file(o.law_path), s));
  std::vector<std::pair<std::string, std::vector<QMatrix>>> runs;
  if (!o.signal_path.empty()) {
    Json j = load_json_file(o.signal_path);
    std::vector<QMatrix> u;
    for (std::size_t k = 0; k < j.size(); ++k)
      u.push_back(matrix_from_json(Json::array({j[k]}), 1, s.m, "u[" + std::to_string(k) + "]").transpose());
    if (static_cast<int>(u.size()) < o.steps) throw Error(ErrorKind::InvalidSystem, "signal shorter than --steps");
    runs.push_back({"custom", u});
  } else {
    for (int j = 0; j < s.m; ++j) {
      std::vector<QMatrix> u(o.steps, QMatrix(s.m, 1));
      for (int k = 0; k < o.steps; ++k)
        if (o.input == "step" || k == 0) u[k](j, 0) = 1;
      runs.push_back({o.input + "_u" + std::to_string(j + 1), u});
    }
  }
  r.value("t0", static_cast<long long>(o.t0));
  r.value("steps", o.steps);
  for (const auto& [name, u] : runs) {
    auto tr = simulate(s, QMatrix(s.n(o.t0), 1), u, o.t0, o.steps);
    QMatrix y(o.steps, s.p);
    for (int k = 0; k < o.steps; ++k)
      for (int i = 0; i < s.p; ++i) y(k, i) = tr.y[k](i, 0);
    r.matrix(name, y);
  }
  return Ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact analysis and decoupling of linear periodic systems"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* c) {
    c->add_option("system", o.system_path, "System document (JSON)")->required()->check(CLI::ExistingFile);
    c->add_option("--tau", o.tau, "Initial sampling time of the cyclic representation");
    c->add_option("--horizon", o.horizon, "Markov-parameter horizon for verification");
    c->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"text", "machine"}));
    c->add_option("--output", o.output, "Write the report to this file");
  };
  auto* analyze = app.add_subcommand("analyze", "Stability, reachability, monodromy and decoupling invariants");
  auto* hermite = app.add_subcommand("hermite", "Cyclic transfer function and its cyclic Hermite form");
  auto* decouple = app.add_subcommand("decouple", "Synthesize a decoupling state feedback");
  auto* simulate_cmd = app.add_subcommand("simulate", "Impulse, step or custom response table");
  auto* verify = app.add_subcommand("verify", "Check decoupling of the system, optionally under a feedback law");
  for (auto* c : {analyze, hermite, decouple, simulate_cmd, verify}) common(c);
  decouple->add_option("--step10-bound", o.step10_bound, "Iteration bound for connecting coupled chains");
  for (auto* c : {simulate_cmd, verify})
    c->add_option("--law", o.law_path, "Feedback law (JSON with F and G, or a decouple report)")
        ->check(CLI::ExistingFile);
  simulate_cmd->add_option("--input", o.input, "Test signal")->check(CLI::IsMember({"impulse", "step"}));
  simulate_cmd->add_option("--signal", o.signal_path, "Custom input: JSON array of input vectors")
      ->check(CLI::ExistingFile);
  simulate_cmd->add_option("--steps", o.steps, "Number of samples")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--t0", o.t0, "Initial time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? Ok : Usage;
  }

  Report r;
  int rc = Ok;
  try {
    if (*analyze) rc = cmd_analyze(o, r);
    if (*hermite) rc = cmd_hermite(o, r);
    if (*decouple) rc = cmd_decouple(o, r);
    if (*simulate_cmd) rc = cmd_simulate(o, r);
    if (*verify) rc = cmd_verify(o, r);
  } catch (const Error& e) {
    rc = exit_code(e.kind());
    r = Report();
    r.value("error", to_string(e.kind()));
    r.value("message", e.what());
    std::cerr << "perdec: " << e.what() << "\n";
  }
  std::string out = r.render_as(o.format == "machine");
  if (o.output.empty()) {
    std::cout << out;
  } else {
    std::ofstream f(o.output);
    if (!f) {
      std::cerr << "perdec: cannot write " << o.output << "\n";
      return Usage;
    }
    f << out;
  }
  return rc;
}
