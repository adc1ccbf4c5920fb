#include "giicov/models.hpp"

#include <cmath>
#include <stdexcept>

namespace giicov {

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

std::vector<ModelInfo> build_registry() {
  std::vector<ModelInfo> reg;
  reg.push_back({ModelKind::binary_ar, "binary_ar", 2, vec({1.0, 0.4}), vec({-5.0, -0.95}),
                 vec({5.0, 0.95}), {"gamma", "rho"}, false, AuxKind::panel_sur, 200, 5, 1});
  reg.push_back({ModelKind::dynamic_binary, "dynamic_binary", 3, vec({1.0, 0.2, 0.4}),
                 vec({-5.0, -5.0, -0.95}), vec({5.0, 5.0, 0.95}), {"gamma", "alpha", "rho"},
                 false, AuxKind::panel_sur, 200, 5, 1});
  reg.push_back({ModelKind::dynamic_binary_window, "dynamic_binary_window", 3,
                 vec({1.0, 0.2, 0.4}), vec({-5.0, -5.0, -0.95}), vec({5.0, 5.0, 0.95}),
                 {"gamma", "alpha", "rho"}, false, AuxKind::panel_sur, 200, 5, 3});
  reg.push_back({ModelKind::ordered_probit, "ordered_probit", 4, vec({0.3, 1.7, 1.0, 0.8}),
                 vec({-5.0, -5.0, -5.0, 0.05}), vec({5.0, 5.0, 5.0, 5.0}),
                 {"delta1", "delta2", "gamma", "sigma"}, false, AuxKind::panel_sur, 200, 5, 1});
  reg.push_back({ModelKind::exp_ar, "exp_ar", 2, vec({1.0, 0.5}), vec({0.05, 0.02}),
                 vec({10.0, 0.95}), {"mu", "phi"}, true, AuxKind::pooled_ar, 1, 200, 1});
  reg.push_back({ModelKind::gg1_queue, "gg1_queue", 2, vec({1.0, 2.0}), vec({0.05, 0.05}),
                 vec({10.0, 10.0}), {"theta_v", "theta_w"}, true, AuxKind::mixture, 200, 1, 1});
  return reg;
}

const std::vector<ModelInfo>& registry() {
  static const std::vector<ModelInfo> reg = build_registry();
  return reg;
}

} // namespace

const ModelInfo& model_info(ModelKind kind) {
  for (const auto& m : registry()) {
    if (m.kind == kind) return m;
  }
  throw contract_error("model_info: unknown kind");
}

ModelKind model_from_name(const std::string& name) {
  for (const auto& m : registry()) {
    if (m.name == name) return m.kind;
  }
  std::string known;
  for (const auto& m : registry()) known += (known.empty() ? "" : ", ") + m.name;
  throw config_error("unknown model '" + name + "' (known: " + known + ")");
}

const std::vector<ModelKind>& all_models() {
  static const std::vector<ModelKind> kinds = [] {
    std::vector<ModelKind> k;
    for (const auto& m : registry()) k.push_back(m.kind);
    return k;
  }();
  return kinds;
}

void validate_theta(ModelKind kind, const Eigen::VectorXd& theta) {
  const ModelInfo& info = model_info(kind);
  if (theta.size() != info.theta_dim) {
    throw std::invalid_argument("theta for " + info.name + " must have " +
                                std::to_string(info.theta_dim) + " components");
  }
  for (int k = 0; k < info.theta_dim; ++k) {
    if (!(theta[k] >= info.lower[k] && theta[k] <= info.upper[k])) {
      throw std::invalid_argument(info.name + ": " + info.param_names[k] + "=" +
                                  std::to_string(theta[k]) + " outside [" +
                                  std::to_string(info.lower[k]) + "," +
                                  std::to_string(info.upper[k]) + "]");
    }
  }
  if (kind == ModelKind::ordered_probit && !(theta[0] < theta[1])) {
    throw std::invalid_argument("ordered_probit: thresholds must be increasing");
  }
  if (kind == ModelKind::exp_ar && !(theta[1] > 0.0 && theta[1] < 1.0)) {
    throw std::invalid_argument("exp_ar: phi must lie strictly inside (0,1)");
  }
  if (kind == ModelKind::gg1_queue && !(theta[1] > theta[0])) {
    throw std::invalid_argument(
        "gg1_queue: stability requires the interarrival mean theta_w to exceed the "
        "service mean theta_v");
  }
}

PanelData simulate_observed(ModelKind kind, const Eigen::VectorXd& theta,
                            std::uint64_t master_seed, std::uint64_t replication, int n,
                            int t_len) {
  validate_theta(kind, theta);
  const ModelInfo& info = model_info(kind);
  PanelData out;
  DirectPolicy direct;

  switch (kind) {
    case ModelKind::binary_ar:
    case ModelKind::dynamic_binary:
    case ModelKind::dynamic_binary_window: {
      if (kind == ModelKind::dynamic_binary_window && t_len != 5) {
        throw std::invalid_argument("dynamic_binary_window: T must be 5");
      }
      const UniformPanel ux({master_seed, replication, stream_role::observed_x}, n, t_len, 1);
      const UniformPanel uu({master_seed, replication, stream_role::observed_shock}, n,
                            t_len, 1);
      const double gamma = theta[0];
      const double alpha = kind == ModelKind::binary_ar ? 0.0 : theta[1];
      const double rho = kind == ModelKind::binary_ar ? theta[1] : theta[2];
      out.n_x = 1;
      std::vector<double> x(t_len), u(t_len), y(t_len);
      std::vector<double> w(t_len);
      const int first = info.first_observed_period;
      for (int i = 0; i < n; ++i) {
        for (int t = 0; t < t_len; ++t) {
          x[t] = x_from_uniform(ux(i, t, 0));
          u[t] = uu(i, t, 0);
        }
        binary_panel_unit(gamma, alpha, rho, x.data(), t_len, u.data(), direct, y.data(),
                          w.data());
        out.unit_ids.push_back(i + 1);
        std::vector<int> times;
        std::vector<double> yi;
        std::vector<Eigen::VectorXd> xi;
        for (int t = first - 1; t < t_len; ++t) {
          times.push_back(t + 1);
          yi.push_back(y[t]);
          Eigen::VectorXd xv(1);
          xv[0] = x[t];
          xi.push_back(xv);
        }
        out.times.push_back(std::move(times));
        out.y.push_back(std::move(yi));
        out.x.push_back(std::move(xi));
      }
      return out;
    }

    case ModelKind::ordered_probit: {
      const UniformPanel ux({master_seed, replication, stream_role::observed_x}, n, t_len, 1);
      const UniformPanel uu({master_seed, replication, stream_role::observed_shock}, n,
                            t_len, 1);
      const UniformPanel uv({master_seed, replication, stream_role::observed_aux}, n, 1, 1);
      const double delta[2] = {theta[0], theta[1]};
      out.n_x = 1;
      std::vector<double> x(t_len), u(t_len), y(t_len);
      std::vector<double> w(t_len);
      for (int i = 0; i < n; ++i) {
        for (int t = 0; t < t_len; ++t) {
          x[t] = x_from_uniform(ux(i, t, 0));
          u[t] = uu(i, t, 0);
        }
        ordered_probit_unit(delta, 2, theta[2], theta[3], x.data(), t_len, uv(i, 0, 0),
                            u.data(), direct, y.data(), w.data());
        out.unit_ids.push_back(i + 1);
        std::vector<int> times;
        std::vector<double> yi;
        std::vector<Eigen::VectorXd> xi;
        for (int t = 0; t < t_len; ++t) {
          times.push_back(t + 1);
          yi.push_back(y[t]);
          Eigen::VectorXd xv(1);
          xv[0] = x[t];
          xi.push_back(xv);
        }
        out.times.push_back(std::move(times));
        out.y.push_back(std::move(yi));
        out.x.push_back(std::move(xi));
      }
      return out;
    }

    case ModelKind::exp_ar: {
      const UniformPanel uu({master_seed, replication, stream_role::observed_shock}, 1,
                            t_len, 1);
      const UniformPanel u2({master_seed, replication, stream_role::observed_aux}, 1, t_len,
                            1);
      std::vector<double> u(t_len), uv(t_len), y(t_len), w(t_len);
      for (int t = 0; t < t_len; ++t) {
        u[t] = uu(0, t, 0);
        uv[t] = u2(0, t, 0);
      }
      std::vector<double> yd(t_len), wd(t_len);
      exp_ar_path(theta[0], theta[1], t_len, u.data(), uv.data(), direct, yd.data(),
                  wd.data());
      out.n_x = 0;
      out.unit_ids = {1};
      out.times.emplace_back();
      out.y.emplace_back();
      out.x.emplace_back();
      for (int t = 0; t < t_len; ++t) {
        out.times[0].push_back(t + 1);
        out.y[0].push_back(yd[t]);
        out.x[0].emplace_back(Eigen::VectorXd(0));
      }
      return out;
    }

    case ModelKind::gg1_queue: {
      const UniformPanel us({master_seed, replication, stream_role::observed_shock}, 1, n, 1);
      const UniformPanel ua({master_seed, replication, stream_role::observed_aux}, 1, n, 1);
      std::vector<double> uservice(n), uarrival(n), y(n), w(n);
      for (int i = 0; i < n; ++i) {
        uservice[i] = us(0, i, 0);
        uarrival[i] = ua(0, i, 0);
      }
      gg1_queue_path(theta[0], theta[1], n, uservice.data(), uarrival.data(), direct,
                     y.data(), w.data());
      out.n_x = 0;
      out.unit_ids = {1};
      out.times.emplace_back();
      out.y.emplace_back();
      out.x.emplace_back();
      for (int i = 0; i < n; ++i) {
        out.times[0].push_back(i + 1);
        out.y[0].push_back(y[i]);
        out.x[0].emplace_back(Eigen::VectorXd(0));
      }
      return out;
    }
  }
  throw contract_error("simulate_observed: unreachable");
}

} // namespace giicov
