#include "lqgame/problem_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lqgame {

using json = nlohmann::ordered_json;

SimConfig SimSettings::to_config() const {
  SimConfig cfg;
  cfg.dt = dt;
  cfg.horizon_T = horizon;
  cfg.paths = paths;
  cfg.seed = seed;
  cfg.antithetic = antithetic;
  return cfg;
}

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& path,
                       const std::string& what) {
  throw ParseError(origin + ": " + path + ": " + what);
}

Matrix parse_matrix(const json& j, const std::string& origin, const std::string& path) {
  if (!j.is_array()) fail(origin, path, "expected an array of rows");
  const size_t rows = j.size();
  size_t cols = 0;
  Matrix m;
  for (size_t r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array()) {
      fail(origin, path + " row " + std::to_string(r), "expected an array of numbers");
    }
    if (r == 0) {
      cols = row.size();
      m.resize(rows, cols);
    } else if (row.size() != cols) {
      fail(origin, path + " row " + std::to_string(r),
           "expected " + std::to_string(cols) + " columns, got " +
               std::to_string(row.size()));
    }
    for (size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number()) {
        fail(origin, path + " row " + std::to_string(r) + " col " + std::to_string(c),
             "expected a number");
      }
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          row[c].get<double>();
    }
  }
  if (rows == 0) m.resize(0, 0);
  return m;
}

Matrix parse_matrix_or(const json& parent, const char* key, const std::string& origin,
                       const std::string& path, Eigen::Index default_rows,
                       Eigen::Index default_cols) {
  if (!parent.contains(key)) return Matrix::Zero(default_rows, default_cols);
  return parse_matrix(parent[key], origin, path);
}

Vector parse_vector(const json& j, const std::string& origin, const std::string& path) {
  if (!j.is_array()) fail(origin, path, "expected an array of numbers");
  Vector v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      fail(origin, path + "[" + std::to_string(i) + "]", "expected a number");
    }
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

ExpPoly parse_expoly(const json& parent, const char* key, Eigen::Index dim,
                     const std::string& origin, const std::string& path) {
  ExpPoly f(dim);
  if (!parent.contains(key)) return f;
  const json& j = parent[key];
  if (!j.is_array()) fail(origin, path, "expected a list of terms");
  for (size_t i = 0; i < j.size(); ++i) {
    const std::string tpath = path + "[" + std::to_string(i) + "]";
    const json& term = j[i];
    if (!term.is_object() || !term.contains("coeff")) {
      fail(origin, tpath, "expected {coeff, power, rate}");
    }
    const Vector coeff = parse_vector(term["coeff"], origin, tpath + ".coeff");
    if (coeff.size() != dim) {
      fail(origin, tpath + ".coeff",
           "expected dim " + std::to_string(dim) + ", got " +
               std::to_string(coeff.size()));
    }
    const int power = term.value("power", 0);
    const double rate = term.value("rate", 0.0);
    if (coeff.isZero(0.0)) continue;
    if (power < 0) fail(origin, tpath + ".power", "must be >= 0");
    if (!(rate > 0.0)) fail(origin, tpath + ".rate", "must be > 0 for a nonzero term");
    f.add_term(power, rate, coeff);
  }
  return f;
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json expoly_json(const ExpPoly& f) {
  json terms = json::array();
  for (const auto& term : f.terms()) {
    terms.push_back(json{{"coeff", vector_json(term.coeff)},
                         {"power", term.power},
                         {"rate", term.rate}});
  }
  return terms;
}

ExpPoly expoly_from_json(const json& j, Eigen::Index dim, const std::string& origin,
                         const std::string& path) {
  json holder;
  holder["f"] = j;
  return parse_expoly(holder, "f", dim, origin, path);
}

}  // namespace

Problem parse_problem(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("system") || !doc.contains("cost")) {
    fail(origin, "/", "expected an object with 'system' and 'cost' blocks");
  }

  const json& sys = doc["system"];
  Problem pb;
  GameSpec& spec = pb.spec;
  spec.A = parse_matrix(sys.contains("A") ? sys["A"] : json(), origin, "/system/A");
  const Eigen::Index n = spec.A.rows();
  spec.C = parse_matrix_or(sys, "C", origin, "/system/C", n, n);
  spec.B1 = parse_matrix(sys.contains("B1") ? sys["B1"] : json(), origin, "/system/B1");
  const Eigen::Index m1 = spec.B1.cols();
  spec.B2 = parse_matrix_or(sys, "B2", origin, "/system/B2", n, 0);
  const Eigen::Index m2 = spec.B2.cols();
  spec.D1 = parse_matrix_or(sys, "D1", origin, "/system/D1", n, m1);
  spec.D2 = parse_matrix_or(sys, "D2", origin, "/system/D2", n, m2);

  const json& cost = doc["cost"];
  spec.Q = SymMatrix(parse_matrix(cost.contains("Q") ? cost["Q"] : json(), origin,
                                  "/cost/Q"));
  spec.S1 = parse_matrix_or(cost, "S1", origin, "/cost/S1", m1, n);
  spec.S2 = parse_matrix_or(cost, "S2", origin, "/cost/S2", m2, n);
  spec.R11 = SymMatrix(parse_matrix(cost.contains("R11") ? cost["R11"] : json(),
                                    origin, "/cost/R11"));
  spec.R22 = SymMatrix(parse_matrix_or(cost, "R22", origin, "/cost/R22", m2, m2));
  spec.R12 = parse_matrix_or(cost, "R12", origin, "/cost/R12", m1, m2);

  spec.forcing = ForcingTerms::zero(n, m1, m2);
  if (doc.contains("forcing")) {
    const json& f = doc["forcing"];
    spec.forcing.b = parse_expoly(f, "b", n, origin, "/forcing/b");
    spec.forcing.sigma = parse_expoly(f, "sigma", n, origin, "/forcing/sigma");
    spec.forcing.q = parse_expoly(f, "q", n, origin, "/forcing/q");
    spec.forcing.rho1 = parse_expoly(f, "rho1", m1, origin, "/forcing/rho1");
    spec.forcing.rho2 = parse_expoly(f, "rho2", m2, origin, "/forcing/rho2");
  }

  try {
    spec.validate();
  } catch (const InvalidInput& e) {
    throw ParseError(origin + ": " + e.what());
  }

  pb.x0 = doc.contains("x0") ? parse_vector(doc["x0"], origin, "/x0") : Vector::Zero(n);
  if (pb.x0.size() != n) {
    fail(origin, "/x0", "expected dim " + std::to_string(n));
  }

  if (doc.contains("sim")) {
    const json& sim = doc["sim"];
    pb.sim.dt = sim.value("dt", pb.sim.dt);
    pb.sim.horizon = sim.value("horizon", pb.sim.horizon);
    pb.sim.paths = sim.value("paths", pb.sim.paths);
    pb.sim.seed = sim.value("seed", pb.sim.seed);
    pb.sim.antithetic = sim.value("antithetic", pb.sim.antithetic);
    if (!(pb.sim.dt > 0) || !(pb.sim.horizon >= pb.sim.dt) || pb.sim.paths < 2) {
      fail(origin, "/sim", "need dt > 0, horizon >= dt, paths >= 2");
    }
  }
  return pb;
}

Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str(), path);
}

std::string serialize_problem(const Problem& problem) {
  const GameSpec& spec = problem.spec;
  json doc;
  doc["system"] = json{{"A", matrix_json(spec.A)},   {"B1", matrix_json(spec.B1)},
                       {"B2", matrix_json(spec.B2)}, {"C", matrix_json(spec.C)},
                       {"D1", matrix_json(spec.D1)}, {"D2", matrix_json(spec.D2)}};
  doc["cost"] = json{{"Q", matrix_json(spec.Q.mat())},
                     {"S1", matrix_json(spec.S1)},
                     {"S2", matrix_json(spec.S2)},
                     {"R11", matrix_json(spec.R11.mat())},
                     {"R12", matrix_json(spec.R12)},
                     {"R22", matrix_json(spec.R22.mat())}};
  doc["forcing"] = json{{"b", expoly_json(spec.forcing.b)},
                        {"sigma", expoly_json(spec.forcing.sigma)},
                        {"q", expoly_json(spec.forcing.q)},
                        {"rho1", expoly_json(spec.forcing.rho1)},
                        {"rho2", expoly_json(spec.forcing.rho2)}};
  doc["x0"] = vector_json(problem.x0);
  doc["sim"] = json{{"dt", problem.sim.dt},
                    {"horizon", problem.sim.horizon},
                    {"paths", problem.sim.paths},
                    {"seed", problem.sim.seed},
                    {"antithetic", problem.sim.antithetic}};
  return doc.dump(2) + "\n";
}

std::string serialize_saddle(const SaddleSolution& sol) {
  json doc;
  doc["P"] = matrix_json(sol.P.mat());
  doc["Theta"] = matrix_json(sol.Theta);
  doc["Pi"] = matrix_json(sol.Pi);
  doc["m1"] = sol.m1;
  doc["eta"] = expoly_json(sol.eta);
  doc["zeta"] = expoly_json(sol.zeta);
  doc["u_star"] = expoly_json(sol.u_star);
  doc["value_constant"] = sol.value_constant;
  return doc.dump();
}

SaddleSolution parse_saddle(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("saddle: ") + e.what());
  }
  const std::string origin = "saddle";
  SaddleSolution sol;
  sol.P = SymMatrix(parse_matrix(doc.at("P"), origin, "/P"));
  sol.Theta = parse_matrix(doc.at("Theta"), origin, "/Theta");
  sol.Pi = parse_matrix(doc.at("Pi"), origin, "/Pi");
  sol.m1 = doc.at("m1").get<Eigen::Index>();
  const Eigen::Index n = sol.P.dim(), m = sol.Theta.rows();
  sol.eta = expoly_from_json(doc.at("eta"), n, origin, "/eta");
  sol.zeta = expoly_from_json(doc.at("zeta"), n, origin, "/zeta");
  sol.u_star = expoly_from_json(doc.at("u_star"), m, origin, "/u_star");
  sol.value_constant = doc.at("value_constant").get<double>();
  return sol;
}

}  // namespace lqgame
