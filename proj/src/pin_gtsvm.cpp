#include "pingtsvm/pin_gtsvm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace pingtsvm {

namespace {

constexpr double kNormEpsilon = 1e-12;
constexpr const char* kFormatLine = "pingtsvm/1";

struct ClassSplit {
  Eigen::MatrixXd a;  // class +1 rows, training order
  Eigen::MatrixXd b;  // class -1 rows, training order
};

ClassSplit split_classes(const FeatureDataset& ds) {
  const Eigen::Index l1 = ds.count_label(1);
  const Eigen::Index l2 = ds.count_label(-1);
  if (l1 == 0 || l2 == 0)
    throw std::invalid_argument("training data must contain both classes");
  ClassSplit out;
  out.a.resize(l1, ds.cols());
  out.b.resize(l2, ds.cols());
  Eigen::Index ia = 0, ib = 0;
  for (Eigen::Index i = 0; i < ds.rows(); ++i) {
    if (ds.labels(i) > 0)
      out.a.row(ia++) = ds.features.row(i);
    else
      out.b.row(ib++) = ds.features.row(i);
  }
  return out;
}

Eigen::MatrixXd with_ones(const Eigen::MatrixXd& K) {
  Eigen::MatrixXd M(K.rows(), K.cols() + 1);
  M.leftCols(K.cols()) = K;
  M.col(K.cols()).setOnes();
  return M;
}

// Shared by assemble_primal and effective_ridge so the two always agree.
struct SurfacePieces {
  Eigen::MatrixXd fit;    // [K(fit class, D) | 1]
  Eigen::MatrixXd push;   // [K(push class, D) | 1]
  double c = 1.0;
  double tau = 0.5;
  bool push_is_negated = false;  // surface 2 residual is 1 - f(A)
};

SurfacePieces surface_pieces(Surface surface, const FeatureDataset& ds,
                             const PinGtsvmParams& params) {
  const ClassSplit split = split_classes(ds);
  Eigen::MatrixXd d_mat(split.a.rows() + split.b.rows(), ds.cols());
  d_mat << split.a, split.b;

  SurfacePieces out;
  if (surface == Surface::Positive) {
    out.fit = with_ones(gram(split.a, d_mat, params.kernel));
    out.push = with_ones(gram(split.b, d_mat, params.kernel));
    out.c = params.c1;
    out.tau = params.tau1;
    out.push_is_negated = false;
  } else {
    out.fit = with_ones(gram(split.b, d_mat, params.kernel));
    out.push = with_ones(gram(split.a, d_mat, params.kernel));
    out.c = params.c2;
    out.tau = params.tau2;
    out.push_is_negated = true;
  }
  return out;
}

double ridge_from_fit(const Eigen::MatrixXd& fit, double ridge) {
  // Mean diagonal of fit' fit is its squared Frobenius norm over the width.
  return ridge * fit.squaredNorm() / static_cast<double>(fit.cols());
}

std::string encode_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double decode_double(const std::string& text, const std::string& what) {
  double value = 0.0;
  const char* begin = text.data();
  const auto res = std::from_chars(begin, begin + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != begin + text.size())
    throw ModelIoError("model file: cannot parse " + what + " from '" + text + "'");
  return value;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 14695981039346656037ull;
  for (const unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

void write_vector_line(std::ostream& out, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out << ' ';
    out << encode_double(v(i));
  }
  out << '\n';
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

double pinball_loss(double s, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0))
    throw std::invalid_argument("pinball_loss: tau must lie in [0, 1]");
  if (!std::isfinite(s)) throw std::invalid_argument("pinball_loss: s must be finite");
  return std::max((1.0 - tau) * s, -tau * s);
}

void validate(const PinGtsvmParams& params) {
  if (!(params.c1 > 0.0) || !std::isfinite(params.c1) ||
      !(params.c2 > 0.0) || !std::isfinite(params.c2))
    throw std::invalid_argument("penalty weights c1, c2 must be finite and > 0");
  if (!(params.tau1 >= 0.0 && params.tau1 <= 1.0) ||
      !(params.tau2 >= 0.0 && params.tau2 <= 1.0))
    throw std::invalid_argument("tau must lie in [0, 1]");
  if (!(params.ridge >= 0.0) || !std::isfinite(params.ridge))
    throw std::invalid_argument("ridge must be finite and >= 0");
  pingtsvm::validate(params.kernel);
}

QpProblem assemble_primal(Surface surface, const FeatureDataset& ds,
                          const PinGtsvmParams& params) {
  validate(params);
  const SurfacePieces sp = surface_pieces(surface, ds, params);
  const Eigen::Index nv = sp.fit.cols();       // m + 1 surface coefficients
  const Eigen::Index lp = sp.push.rows();      // one slack per pushed row
  const Eigen::Index n = nv + lp;
  const double tau = sp.tau;

  QpProblem qp;
  qp.P = Eigen::MatrixXd::Zero(n, n);
  qp.P.topLeftCorner(nv, nv).noalias() = sp.fit.transpose() * sp.fit;
  qp.P.topLeftCorner(nv, nv).diagonal().array() +=
      ridge_from_fit(sp.fit, params.ridge);

  qp.q = Eigen::VectorXd::Zero(n);
  qp.q.tail(lp).setConstant(sp.c);

  // Residual r_i = 1 + push_i * v (surface 1) or 1 - push_i * v (surface 2);
  // the pair below is xi_i >= (1 - tau) r_i and xi_i >= -tau r_i.
  const double row_sign = sp.push_is_negated ? -1.0 : 1.0;
  qp.G = Eigen::MatrixXd::Zero(2 * lp, n);
  qp.h = Eigen::VectorXd::Zero(2 * lp);
  for (Eigen::Index i = 0; i < lp; ++i) {
    qp.G.row(2 * i).head(nv) = row_sign * (1.0 - tau) * sp.push.row(i);
    qp.G(2 * i, nv + i) = -1.0;
    qp.h(2 * i) = -(1.0 - tau);

    qp.G.row(2 * i + 1).head(nv) = row_sign * -tau * sp.push.row(i);
    qp.G(2 * i + 1, nv + i) = -1.0;
    qp.h(2 * i + 1) = tau;
  }
  return qp;
}

double effective_ridge(Surface surface, const FeatureDataset& ds,
                       const PinGtsvmParams& params) {
  validate(params);
  const SurfacePieces sp = surface_pieces(surface, ds, params);
  return ridge_from_fit(sp.fit, params.ridge);
}

PinGtsvmModel train(const FeatureDataset& ds, const PinGtsvmParams& params,
                    const QpSettings& qp_settings) {
  validate(params);
  const ClassSplit split = split_classes(ds);
  const Eigen::Index m = ds.rows();

  PinGtsvmModel model;
  model.params = params;
  model.support.resize(m, ds.cols());
  model.support << split.a, split.b;

  for (const Surface surface : {Surface::Positive, Surface::Negative}) {
    const QpProblem qp = assemble_primal(surface, ds, params);
    const QpSolution sol = solve_qp(qp, qp_settings);
    if (sol.status != QpStatus::Optimal)
      throw TrainError(std::string("training surface ") +
                       (surface == Surface::Positive ? "1" : "2") +
                       " failed: QP status " + qp_status_name(sol.status));
    if (surface == Surface::Positive) {
      model.u1 = sol.x.head(m);
      model.b1 = sol.x(m);
    } else {
      model.u2 = sol.x.head(m);
      model.b2 = sol.x(m);
    }
  }

  const Eigen::MatrixXd kdd = gram(model.support, model.support, params.kernel);
  const double inner1 = std::max(model.u1.dot(kdd * model.u1), 0.0);
  const double inner2 = std::max(model.u2.dot(kdd * model.u2), 0.0);
  model.norm1 = std::sqrt(inner1 + kNormEpsilon);
  model.norm2 = std::sqrt(inner2 + kNormEpsilon);
  if (!std::isfinite(model.norm1) || !std::isfinite(model.norm2) ||
      model.norm1 <= 0.0 || model.norm2 <= 0.0)
    throw TrainError("training produced degenerate surface norms");
  return model;
}

DecisionValues decision_values(const PinGtsvmModel& model,
                               const Eigen::VectorXd& x) {
  if (x.size() != model.dim())
    throw std::invalid_argument("point dimension " + std::to_string(x.size()) +
                                " does not match model dimension " +
                                std::to_string(model.dim()));
  Eigen::VectorXd xin = model.scaler ? apply_standardizer(*model.scaler, x) : x;
  Eigen::MatrixXd row(1, xin.size());
  row.row(0) = xin.transpose();
  const Eigen::MatrixXd k = gram(row, model.support, model.params.kernel);

  DecisionValues dv;
  double f1 = 0.0, f2 = 0.0;
  for (Eigen::Index j = 0; j < model.support.rows(); ++j) {
    f1 += model.u1(j) * k(0, j);
    f2 += model.u2(j) * k(0, j);
  }
  dv.f1 = f1 + model.b1;
  dv.f2 = f2 + model.b2;
  dv.d1 = std::abs(dv.f1) / model.norm1;
  dv.d2 = std::abs(dv.f2) / model.norm2;
  return dv;
}

int predict(const PinGtsvmModel& model, const Eigen::VectorXd& x) {
  const DecisionValues dv = decision_values(model, x);
  return dv.d1 <= dv.d2 ? 1 : -1;
}

Eigen::VectorXi predict(const PinGtsvmModel& model, const Eigen::MatrixXd& X) {
  Eigen::VectorXi out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    out(i) = predict(model, Eigen::VectorXd(X.row(i).transpose()));
  return out;
}

double empirical_objective(const PinGtsvmModel& model, Surface surface,
                           const FeatureDataset& ds,
                           const PinGtsvmParams& params) {
  const SurfacePieces sp = surface_pieces(surface, ds, params);
  const Eigen::VectorXd& u = surface == Surface::Positive ? model.u1 : model.u2;
  const double b = surface == Surface::Positive ? model.b1 : model.b2;
  if (u.size() + 1 != sp.fit.cols())
    throw std::invalid_argument(
        "empirical_objective: model support size does not match dataset");

  Eigen::VectorXd v(u.size() + 1);
  v.head(u.size()) = u;
  v(u.size()) = b;

  const double fit_term = 0.5 * (sp.fit * v).squaredNorm();
  const double ridge_term =
      0.5 * ridge_from_fit(sp.fit, params.ridge) * v.squaredNorm();
  const Eigen::VectorXd response = sp.push * v;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < response.size(); ++i) {
    const double r = sp.push_is_negated ? 1.0 - response(i) : 1.0 + response(i);
    loss += pinball_loss(r, sp.tau);
  }
  return fit_term + ridge_term + sp.c * loss;
}

void save_model(const PinGtsvmModel& model, const std::string& path) {
  std::ostringstream body;
  body << kFormatLine << '\n';
  body << "kernel: " << kernel_name(model.params.kernel.kind) << '\n';
  body << "sigma: " << encode_double(model.params.kernel.sigma) << '\n';
  body << "c1: " << encode_double(model.params.c1) << '\n';
  body << "c2: " << encode_double(model.params.c2) << '\n';
  body << "tau1: " << encode_double(model.params.tau1) << '\n';
  body << "tau2: " << encode_double(model.params.tau2) << '\n';
  body << "ridge: " << encode_double(model.params.ridge) << '\n';
  body << "d: " << model.support.cols() << '\n';
  body << "m: " << model.support.rows() << '\n';
  body << "positive_token: " << model.positive_token << '\n';
  body << "negative_token: " << model.negative_token << '\n';
  body << "tool: pingtsvm 1.0\n";
  body << "scaler: " << (model.scaler ? "standard" : "none") << '\n';
  if (model.scaler) {
    body << "scaler_mean:\n";
    write_vector_line(body, model.scaler->mean);
    body << "scaler_scale:\n";
    write_vector_line(body, model.scaler->scale);
  }
  body << "D:\n";
  for (Eigen::Index i = 0; i < model.support.rows(); ++i)
    write_vector_line(body, model.support.row(i).transpose());
  body << "u1:\n";
  write_vector_line(body, model.u1);
  body << "b1:\n" << encode_double(model.b1) << '\n';
  body << "u2:\n";
  write_vector_line(body, model.u2);
  body << "b2:\n" << encode_double(model.b2) << '\n';
  body << "norm1:\n" << encode_double(model.norm1) << '\n';
  body << "norm2:\n" << encode_double(model.norm2) << '\n';

  const std::string payload = body.str();
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(fnv1a64(payload)));

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelIoError("cannot write model file '" + path + "'");
  out << payload << "checksum: " << hex << '\n';
  if (!out) throw ModelIoError("write to model file '" + path + "' failed");
}

PinGtsvmModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelIoError("cannot open model file '" + path + "'");
  std::ostringstream whole;
  whole << in.rdbuf();
  const std::string content = whole.str();

  const std::string marker = "checksum: ";
  const auto pos = content.rfind(marker);
  if (pos == std::string::npos || (pos != 0 && content[pos - 1] != '\n'))
    throw ModelIoError("model file '" + path + "' is truncated: no checksum line");
  const std::string payload = content.substr(0, pos);
  std::string stored = content.substr(pos + marker.size());
  while (!stored.empty() && (stored.back() == '\n' || stored.back() == '\r'))
    stored.pop_back();
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(fnv1a64(payload)));
  if (stored != hex)
    throw ModelIoError("model file '" + path + "' failed its checksum");

  std::istringstream body(payload);
  std::string line;
  auto next_line = [&](const std::string& what) {
    if (!std::getline(body, line))
      throw ModelIoError("model file '" + path + "' is truncated: missing " + what);
    return line;
  };
  if (next_line("format line") != kFormatLine)
    throw ModelIoError("model file '" + path + "': unsupported version '" + line +
                       "' (expected " + kFormatLine + ")");

  PinGtsvmModel model;
  Eigen::Index d = -1, m = -1;
  bool has_scaler = false;
  while (true) {
    next_line("header");
    if (line == "D:") break;
    if (line == "scaler_mean:" || line == "scaler_scale:") {
      if (!has_scaler)
        throw ModelIoError("model file '" + path + "': scaler block without scaler: standard");
      if (!model.scaler) model.scaler = Standardizer{};
      const bool is_mean = line == "scaler_mean:";
      const auto toks = split_ws(next_line("scaler values"));
      Eigen::VectorXd v(static_cast<Eigen::Index>(toks.size()));
      for (std::size_t i = 0; i < toks.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = decode_double(toks[i], "scaler value");
      (is_mean ? model.scaler->mean : model.scaler->scale) = v;
      continue;
    }
    const auto colon = line.find(": ");
    if (colon == std::string::npos)
      throw ModelIoError("model file '" + path + "': malformed header line '" + line + "'");
    const std::string key = line.substr(0, colon);
    const std::string value = line.substr(colon + 2);
    if (key == "kernel") model.params.kernel.kind = kernel_kind_from_name(value);
    else if (key == "sigma") model.params.kernel.sigma = decode_double(value, "sigma");
    else if (key == "c1") model.params.c1 = decode_double(value, "c1");
    else if (key == "c2") model.params.c2 = decode_double(value, "c2");
    else if (key == "tau1") model.params.tau1 = decode_double(value, "tau1");
    else if (key == "tau2") model.params.tau2 = decode_double(value, "tau2");
    else if (key == "ridge") model.params.ridge = decode_double(value, "ridge");
    else if (key == "d") d = static_cast<Eigen::Index>(decode_double(value, "d"));
    else if (key == "m") m = static_cast<Eigen::Index>(decode_double(value, "m"));
    else if (key == "positive_token") model.positive_token = value;
    else if (key == "negative_token") model.negative_token = value;
    else if (key == "scaler") has_scaler = value == "standard";
    else if (key == "tool") {}  // informational
    else throw ModelIoError("model file '" + path + "': unknown header key '" + key + "'");
  }
  if (d < 1 || m < 1)
    throw ModelIoError("model file '" + path + "': missing or invalid d / m headers");
  if (has_scaler &&
      (!model.scaler || model.scaler->mean.size() != d ||
       model.scaler->scale.size() != d))
    throw ModelIoError("model file '" + path + "': incomplete scaler block");

  model.support.resize(m, d);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto toks = split_ws(next_line("support row"));
    if (static_cast<Eigen::Index>(toks.size()) != d)
      throw ModelIoError("model file '" + path + "': support row " +
                         std::to_string(i + 1) + " holds " +
                         std::to_string(toks.size()) + " values, expected " +
                         std::to_string(d));
    for (Eigen::Index j = 0; j < d; ++j)
      model.support(i, j) = decode_double(toks[static_cast<std::size_t>(j)], "support value");
  }

  auto read_vector = [&](const std::string& label) {
    if (next_line(label) != label + ":")
      throw ModelIoError("model file '" + path + "': expected block '" + label +
                         ":', found '" + line + "'");
    const auto toks = split_ws(next_line(label + " values"));
    if (static_cast<Eigen::Index>(toks.size()) != m)
      throw ModelIoError("model file '" + path + "': block '" + label + "' holds " +
                         std::to_string(toks.size()) + " values, expected " +
                         std::to_string(m));
    Eigen::VectorXd v(m);
    for (Eigen::Index j = 0; j < m; ++j)
      v(j) = decode_double(toks[static_cast<std::size_t>(j)], label + " value");
    return v;
  };
  auto read_scalar = [&](const std::string& label) {
    if (next_line(label) != label + ":")
      throw ModelIoError("model file '" + path + "': expected block '" + label +
                         ":', found '" + line + "'");
    return decode_double(next_line(label + " value"), label);
  };

  model.u1 = read_vector("u1");
  model.b1 = read_scalar("b1");
  model.u2 = read_vector("u2");
  model.b2 = read_scalar("b2");
  model.norm1 = read_scalar("norm1");
  model.norm2 = read_scalar("norm2");
  validate(model.params);
  if (!(model.norm1 > 0.0) || !(model.norm2 > 0.0))
    throw ModelIoError("model file '" + path + "': nonpositive surface norms");
  return model;
}

}  // namespace pingtsvm
