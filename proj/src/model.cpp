#include "pscm/model.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

#include "pscm/io.hpp"
#include "pscm/matching.hpp"
#include "pscm/rng.hpp"
#include "pscm/support.hpp"

namespace pscm {

namespace {

std::vector<int> positions_of(const std::vector<int>& order) {
  std::vector<int> pos(order.size());
  for (int t = 0; t < static_cast<int>(order.size()); ++t) pos[order[t]] = t;
  return pos;
}

bool is_permutation_of_range(const std::vector<int>& order, int p) {
  if (static_cast<int>(order.size()) != p) return false;
  std::vector<bool> seen(p, false);
  for (int v : order) {
    if (v < 0 || v >= p || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

// Forward substitution for (I - A) W = B with A strictly lower triangular
// under the given order.
Matrix solve_mixing(const Pscm& model) {
  Matrix W = Matrix::Zero(model.p, model.m);
  for (int t = 0; t < model.p; ++t) {
    int i = model.order[t];
    Eigen::RowVectorXd row = model.B.row(i);
    for (int u = 0; u < t; ++u) {
      int j = model.order[u];
      if (model.A(i, j) != 0.0) row += model.A(i, j) * W.row(j);
    }
    W.row(i) = row;
  }
  return W;
}

}  // namespace

SourceDist source_dist_from_string(const std::string& name) {
  if (name == "uniform") return SourceDist::uniform;
  if (name == "gaussian") return SourceDist::gaussian;
  if (name == "laplace") return SourceDist::laplace;
  throw config_error("unknown source distribution '" + name + "'");
}

std::string to_string(SourceDist dist) {
  switch (dist) {
    case SourceDist::uniform: return "uniform";
    case SourceDist::gaussian: return "gaussian";
    case SourceDist::laplace: return "laplace";
  }
  throw internal_error("bad source distribution value");
}

void validate_model(const Pscm& model, double eps) {
  if (model.p < 1) throw model_error("model needs at least one observed variable");
  if (model.m < 1) throw model_error("model needs at least one source");
  if (model.A.rows() != model.p || model.A.cols() != model.p) throw model_error("A must be p x p");
  if (model.B.rows() != model.p || model.B.cols() != model.m) throw model_error("B must be p x m");
  if (!model.A.allFinite() || !model.B.allFinite())
    throw model_error("model has non-finite coefficients");
  if (!is_permutation_of_range(model.order, model.p))
    throw model_error("order must be a permutation of 0..p-1");
  auto pos = positions_of(model.order);
  for (int i = 0; i < model.p; ++i)
    for (int j = 0; j < model.p; ++j)
      if (model.A(i, j) != 0.0 && pos[j] >= pos[i])
        throw model_error("A is not strictly lower triangular under the declared order (entry " +
                          std::to_string(i) + "," + std::to_string(j) + ")");
  for (int j = 0; j < model.m; ++j)
    if (model.B.col(j).cwiseAbs().maxCoeff() <= eps)
      throw model_error("source column " + std::to_string(j) + " of B is entirely zero");
}

MixingMatrix mixing_matrix(const Pscm& model, double eps) {
  validate_model(model, eps);
  Matrix W = solve_mixing(model);
  for (int i = 0; i < model.p; ++i)
    if (row_support(W.row(i), eps).empty())
      throw model_error("observed variable " + std::to_string(i) +
                        " has an empty source support in the mixing matrix");
  return MixingMatrix{std::move(W), eps};
}

Pscm generate_random_model(const GenerationConfig& cfg) {
  if (cfg.p < 1) throw config_error("p must be positive");
  if (cfg.m < 1) throw config_error("m must be positive");
  if (cfg.causal_degree < 0 || cfg.exogenous_degree < 0)
    throw config_error("expected degrees must be non-negative");
  if (!(cfg.coeff_lo > 0.0) || cfg.coeff_hi < cfg.coeff_lo)
    throw config_error("coefficient interval must satisfy 0 < lo <= hi");
  if (cfg.distinct_source && cfg.m < cfg.p) throw config_error("distinct sources need m >= p");

  const int p = cfg.p, m = cfg.m;
  const double q_edge = std::min(1.0, p > 1 ? cfg.causal_degree / (p - 1) : 0.0);
  const double q_src = std::min(1.0, cfg.exogenous_degree / p);
  const double eps = 1e-9;

  Rng rng(cfg.seed);
  auto coeff = [&]() { return rng.signed_coefficient(cfg.coeff_lo, cfg.coeff_hi); };
  int rejections = 0;
  constexpr int kMaxRejections = 100000;

  while (true) {
    if (rejections > kMaxRejections)
      throw internal_error("model generation failed to satisfy validity constraints");

    Matrix A0 = Matrix::Zero(p, p);
    for (int i = 1; i < p; ++i)
      for (int j = 0; j < i; ++j)
        if (rng.bernoulli(q_edge)) A0(i, j) = coeff();

    Matrix B0 = Matrix::Zero(p, m);
    std::vector<bool> is_private(m, false);
    if (cfg.distinct_source) {
      // Reserved columns carrying exactly one entry: a permuted, scaled
      // identity block spread over randomly chosen source columns.
      auto cols = rng.permutation(m);
      for (int i = 0; i < p; ++i) {
        is_private[cols[i]] = true;
        B0(i, cols[i]) = coeff();
      }
    }
    for (int j = 0; j < m; ++j) {
      if (is_private[j]) continue;
      for (int i = 0; i < p; ++i)
        if (rng.bernoulli(q_src)) B0(i, j) = coeff();
    }

    auto repopulate_column = [&](int j) {
      for (int attempt = 0; attempt < 100; ++attempt) {
        bool any = false;
        for (int i = 0; i < p; ++i) {
          B0(i, j) = rng.bernoulli(q_src) ? coeff() : 0.0;
          any = any || B0(i, j) != 0.0;
        }
        if (any) return;
      }
      B0(rng.uniform_int(p), j) = coeff();
    };

    auto resample_row = [&](int i) {
      for (int j = 0; j < m; ++j) {
        if (is_private[j]) continue;
        B0(i, j) = rng.bernoulli(q_src) ? coeff() : 0.0;
      }
    };

    int row_resamples = 0;
    bool rejected = false;
    while (true) {
      // No source may end up without observed children.
      for (int j = 0; j < m; ++j)
        if (!is_private[j] && B0.col(j).cwiseAbs().maxCoeff() == 0.0) repopulate_column(j);

      // Model is in construction order here, so plain forward substitution
      // yields the mixing matrix.
      Matrix W0 = B0;
      for (int i = 1; i < p; ++i)
        for (int j = 0; j < i; ++j)
          if (A0(i, j) != 0.0) W0.row(i) += A0(i, j) * W0.row(j);

      std::vector<IndexSet> supports(p);
      for (int i = 0; i < p; ++i) supports[i] = row_support(W0.row(i), eps);

      // Every variable needs a nonempty mixture and every causal edge must
      // strictly grow the source support. Resampling the offending row's
      // exogenous pattern usually repairs both.
      int offending = -1;
      for (int i = 0; i < p && offending < 0; ++i)
        if (supports[i].empty()) offending = i;
      for (int child = 1; child < p && offending < 0; ++child)
        for (int parent = 0; parent < child; ++parent)
          if (A0(child, parent) != 0.0 && !is_strict_subset(supports[parent], supports[child])) {
            offending = child;
            break;
          }

      if (offending < 0) break;
      if (++row_resamples > 100) {
        rejected = true;
        break;
      }
      resample_row(offending);
    }
    if (rejected) {
      ++rejections;
      continue;
    }

    // Hide the construction order behind random relabelings of both the
    // observed variables and the sources.
    auto obs_perm = rng.permutation(p);
    auto src_perm = rng.permutation(m);
    Pscm model;
    model.p = p;
    model.m = m;
    model.A = Matrix::Zero(p, p);
    model.B = Matrix::Zero(p, m);
    model.order.resize(p);
    for (int i = 0; i < p; ++i) {
      model.order[i] = obs_perm[i];
      for (int j = 0; j < p; ++j) model.A(obs_perm[i], obs_perm[j]) = A0(i, j);
      for (int j = 0; j < m; ++j) model.B(obs_perm[i], src_perm[j]) = B0(i, j);
    }
    model.seed = cfg.seed;
    model.generation_rejections = rejections;
    model.config = cfg;
    validate_model(model, eps);
    return model;
  }
}

Dataset simulate(const Pscm& model, int n, SourceDist dist, std::uint64_t seed) {
  if (n < 1) throw config_error("sample count must be positive");
  MixingMatrix mixing = mixing_matrix(model);
  Rng rng(seed);
  Matrix S(model.m, n);
  for (int t = 0; t < n; ++t)
    for (int j = 0; j < model.m; ++j) {
      switch (dist) {
        case SourceDist::uniform: S(j, t) = rng.uniform(-0.5, 0.5); break;
        case SourceDist::gaussian: S(j, t) = rng.gaussian(); break;
        case SourceDist::laplace: S(j, t) = rng.laplace(); break;
      }
    }
  Dataset data;
  data.X = mixing.W * S;
  data.source_dist = to_string(dist);
  return data;
}

MixingMatrix scramble(const MixingMatrix& mixing, std::uint64_t seed) {
  Rng rng(seed);
  const int m = static_cast<int>(mixing.W.cols());
  auto perm = rng.permutation(m);
  Matrix out(mixing.W.rows(), m);
  for (int j = 0; j < m; ++j) {
    double scale = rng.uniform(0.5, 2.0);
    if (rng.bernoulli(0.5)) scale = -scale;
    out.col(j) = mixing.W.col(perm[j]) * scale;
  }
  return MixingMatrix{std::move(out), mixing.eps};
}

AssumptionsReport check_assumptions(const Pscm& model, double eps) {
  AssumptionsReport report;
  Matrix W;
  try {
    W = mixing_matrix(model, eps).W;
  } catch (const Error& e) {
    report.model_valid = false;
    report.issues.push_back({e.what(), -1, -1});
    return report;
  }

  std::vector<IndexSet> supports(model.p);
  for (int i = 0; i < model.p; ++i) supports[i] = row_support(W.row(i), eps);

  for (int child = 0; child < model.p; ++child)
    for (int parent = 0; parent < model.p; ++parent)
      if (model.A(child, parent) != 0.0 && !is_strict_subset(supports[parent], supports[child])) {
        report.edge_supports_ok = false;
        report.issues.push_back({"edge " + std::to_string(parent) + " -> " + std::to_string(child) +
                                     " does not strictly grow the source support",
                                 child, parent});
      }

  // Transitive closure over the causal edges; ancestor supports must stay
  // nested in descendant supports.
  std::vector<std::vector<bool>> reach(model.p, std::vector<bool>(model.p, false));
  for (int child = 0; child < model.p; ++child)
    for (int parent = 0; parent < model.p; ++parent)
      if (model.A(child, parent) != 0.0) reach[parent][child] = true;
  for (int mid = 0; mid < model.p; ++mid)
    for (int a = 0; a < model.p; ++a)
      if (reach[a][mid])
        for (int b = 0; b < model.p; ++b)
          if (reach[mid][b]) reach[a][b] = true;
  for (int anc = 0; anc < model.p; ++anc)
    for (int desc = 0; desc < model.p; ++desc)
      if (reach[anc][desc] && !is_subset(supports[anc], supports[desc])) {
        report.ancestor_supports_ok = false;
        report.issues.push_back(
            {"ancestor " + std::to_string(anc) + " support not nested in " + std::to_string(desc),
             desc, anc});
      }

  // Genericity spot check: the numerical rank of random square submatrices of
  // B must match the structural rank of their zero pattern. Anything less
  // means the coefficient values conspire beyond what the supports force.
  Rng rng(0x5f3759dfull);
  const int q_max = std::min(model.p, model.m);
  for (int trial = 0; trial < 100; ++trial) {
    int q = 1 + rng.uniform_int(q_max);
    auto rows_perm = rng.permutation(model.p);
    auto cols_perm = rng.permutation(model.m);
    Matrix sub(q, q);
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) sub(a, b) = model.B(rows_perm[a], cols_perm[b]);
    std::vector<IndexSet> adj(q);
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b)
        if (std::abs(sub(a, b)) > eps) adj[a].push_back(b);
    int structural = hopcroft_karp(q, q, adj).size;
    if (structural == 0) continue;
    Eigen::JacobiSVD<Matrix> svd(sub);
    const auto& sv = svd.singularValues();
    int numerical = 0;
    for (int a = 0; a < sv.size(); ++a)
      if (sv(a) > 1e-8 * sv(0)) ++numerical;
    if (numerical < structural) {
      report.generic_rank_ok = false;
      report.issues.push_back({"a " + std::to_string(q) + "x" + std::to_string(q) +
                                   " submatrix of B has numerical rank below its structural rank",
                               -1, -1});
      break;
    }
  }
  return report;
}

namespace {

nlohmann::json config_to_json(const GenerationConfig& cfg) {
  return nlohmann::json{{"p", cfg.p},
                        {"m", cfg.m},
                        {"causal_degree", cfg.causal_degree},
                        {"exogenous_degree", cfg.exogenous_degree},
                        {"coeff_lo", cfg.coeff_lo},
                        {"coeff_hi", cfg.coeff_hi},
                        {"distinct_source", cfg.distinct_source},
                        {"seed", cfg.seed}};
}

GenerationConfig config_from_json(const nlohmann::json& j) {
  GenerationConfig cfg;
  cfg.p = j.at("p").get<int>();
  cfg.m = j.at("m").get<int>();
  cfg.causal_degree = j.at("causal_degree").get<double>();
  cfg.exogenous_degree = j.at("exogenous_degree").get<double>();
  cfg.coeff_lo = j.at("coeff_lo").get<double>();
  cfg.coeff_hi = j.at("coeff_hi").get<double>();
  cfg.distinct_source = j.at("distinct_source").get<bool>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

}  // namespace

std::string model_to_json_string(const Pscm& model) {
  nlohmann::json meta{{"seed", model.seed}, {"generation_rejections", model.generation_rejections}};
  meta["config"] = model.config ? config_to_json(*model.config) : nlohmann::json(nullptr);
  nlohmann::json j{{"p", model.p},
                   {"m", model.m},
                   {"order", model.order},
                   {"A", matrix_to_json(model.A)},
                   {"B", matrix_to_json(model.B)},
                   {"meta", std::move(meta)}};
  return j.dump(2) + "\n";
}

Pscm model_from_json_string(const std::string& text, const std::string& origin) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw data_error(origin + ": " + e.what());
  }
  Pscm model;
  try {
    model.p = j.at("p").get<int>();
    model.m = j.at("m").get<int>();
    model.order = j.at("order").get<std::vector<int>>();
    model.A = matrix_from_json(j.at("A"), "A");
    model.B = matrix_from_json(j.at("B"), "B");
    if (j.contains("meta") && j["meta"].is_object()) {
      const auto& meta = j["meta"];
      if (meta.contains("seed") && meta["seed"].is_number())
        model.seed = meta["seed"].get<std::uint64_t>();
      if (meta.contains("generation_rejections") && meta["generation_rejections"].is_number())
        model.generation_rejections = meta["generation_rejections"].get<int>();
      if (meta.contains("config") && meta["config"].is_object())
        model.config = config_from_json(meta["config"]);
    }
  } catch (const nlohmann::json::exception& e) {
    throw data_error(origin + ": " + e.what());
  }
  try {
    validate_model(model);
  } catch (const Error& e) {
    throw data_error(origin + ": " + e.what());
  }
  return model;
}

void write_model_file(const std::string& path, const Pscm& model) {
  write_text_file(path, model_to_json_string(model));
}

Pscm read_model_file(const std::string& path) {
  return model_from_json_string(read_text_file(path), path);
}

void write_dataset_file(const std::string& path, const Dataset& data) {
  write_matrix_csv_file(path, data.X);
}

Dataset read_dataset_file(const std::string& path) {
  Dataset data;
  data.X = read_matrix_csv_file(path);
  return data;
}

}  // namespace pscm
