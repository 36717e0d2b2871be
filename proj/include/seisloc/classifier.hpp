#pragma once

#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <variant>

#include "seisloc/mlp.hpp"
#include "seisloc/svm.hpp"

namespace seisloc {

enum class ClassifierKind { mlp, svm };

inline const char* to_string(ClassifierKind k) { return k == ClassifierKind::mlp ? "mlp" : "svm"; }

inline ClassifierKind parse_classifier_kind(std::string_view s) {
  if (s == "mlp") return ClassifierKind::mlp;
  if (s == "svm") return ClassifierKind::svm;
  throw ParameterError("unknown classifier '" + std::string(s) + "' (expected mlp or svm)");
}

/// A trained MLP or SVM behind one interface.
struct Classifier {
  std::variant<MlpModel, SvmModel> model;

  ClassifierKind kind() const { return model.index() == 0 ? ClassifierKind::mlp : ClassifierKind::svm; }

  const Normalizer& normalizer() const {
    return std::visit([](const auto& m) -> const Normalizer& { return m.norm; }, model);
  }

  std::size_t feature_dim() const { return normalizer().dim(); }

  int predict(const std::vector<double>& feature) const {
    return std::visit([&](const auto& m) { return m.predict(feature); }, model);
  }

  std::vector<int> predict(const Dataset& d) const {
    for (const auto& s : d.samples) {
      if (s.feature.size() != feature_dim()) {
        throw ArityError("test feature has dimension " + std::to_string(s.feature.size()) + ", model expects " +
                         std::to_string(feature_dim()));
      }
    }
    return std::visit([&](const auto& m) { return m.predict(d); }, model);
  }
};

/// Grid-wise accuracy: fraction of samples whose predicted cell is the true cell.
inline double evaluate(const Classifier& model, const Dataset& test) {
  if (test.empty()) throw ParameterError("cannot evaluate on an empty test set");
  const auto pred = model.predict(test);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) ok += pred[i] == test.samples[i].label;
  return static_cast<double>(ok) / static_cast<double>(pred.size());
}

/// Trains a classifier. `validation` may be null; SVM training ignores it.
using Trainer = std::function<Classifier(const Dataset& train, const Dataset* validation, Rng& rng)>;

inline Trainer mlp_trainer(MlpHyper hyper) {
  return [hyper](const Dataset& train, const Dataset* validation, Rng& rng) {
    return Classifier{train_mlp(train, hyper, rng, validation)};
  };
}

inline Trainer svm_trainer(SvmGrid grid) {
  return [grid](const Dataset& train, const Dataset*, Rng& rng) { return Classifier{train_svm(train, grid, rng)}; };
}

// Model files are whitespace-separated text; see docs/model_format.md.
inline constexpr int kModelFormatVersion = 1;

namespace detail {

class TokenReader {
 public:
  explicit TokenReader(std::istream& is) : is_(is) {}

  std::string word() {
    std::string w;
    if (!(is_ >> w)) throw FormatError("model file: unexpected end of input");
    return w;
  }

  void expect(std::string_view keyword) {
    const auto w = word();
    if (w != keyword) throw FormatError("model file: expected '" + std::string(keyword) + "', found '" + w + "'");
  }

  template <typename T>
  T number() {
    return parse_number<T>(word());
  }

  template <typename T>
  T count(T limit) {
    const auto v = number<T>();
    if (v < 0 || v > limit) throw FormatError("model file: count " + std::to_string(v) + " out of range");
    return v;
  }

 private:
  std::istream& is_;
};

inline void write_normalizer(std::ostream& os, const Normalizer& n) {
  os << "norm " << n.dim() << "\nmean";
  for (double v : n.mean) os << ' ' << format_number(v);
  os << "\nstd";
  for (double v : n.stddev) os << ' ' << format_number(v);
  os << '\n';
}

inline Normalizer read_normalizer(TokenReader& in) {
  in.expect("norm");
  const auto dim = in.count<std::size_t>(1 << 20);
  Normalizer n;
  in.expect("mean");
  for (std::size_t k = 0; k < dim; ++k) n.mean.push_back(in.number<double>());
  in.expect("std");
  for (std::size_t k = 0; k < dim; ++k) {
    const double s = in.number<double>();
    if (!(s > 0.0) || !std::isfinite(s)) throw FormatError("model file: normalization std must be positive");
    n.stddev.push_back(s);
  }
  return n;
}

inline void write_model(std::ostream& os, const MlpModel& m) {
  const auto& net = m.net;
  os << "layers " << net.sizes().size();
  for (int s : net.sizes()) os << ' ' << s;
  os << '\n';
  for (int l = 0; l < net.layers(); ++l) {
    const auto& w = net.weights()[l];
    os << "weights " << l << '\n';
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) os << (c ? " " : "") << format_number(w(r, c));
      os << '\n';
    }
    os << "bias " << l << '\n';
    const auto& b = net.biases()[l];
    for (Eigen::Index r = 0; r < b.size(); ++r) os << (r ? " " : "") << format_number(b(r));
    os << '\n';
  }
}

inline MlpModel read_mlp(TokenReader& in, Normalizer norm) {
  in.expect("layers");
  const auto count = in.count<int>(64);
  std::vector<int> sizes;
  for (int k = 0; k < count; ++k) sizes.push_back(in.count<int>(1 << 16));
  using Net = Mlp<float>;
  std::vector<Net::Matrix> weights;
  std::vector<Net::Vector> biases;
  for (int l = 0; l + 1 < count; ++l) {
    in.expect("weights");
    if (in.number<int>() != l) throw FormatError("model file: layers out of order");
    Net::Matrix w(sizes[l + 1], sizes[l]);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = in.number<float>();
    in.expect("bias");
    if (in.number<int>() != l) throw FormatError("model file: layers out of order");
    Net::Vector b(sizes[l + 1]);
    for (Eigen::Index r = 0; r < b.size(); ++r) b(r) = in.number<float>();
    weights.push_back(std::move(w));
    biases.push_back(std::move(b));
  }
  if (sizes.empty() || static_cast<std::size_t>(sizes.front()) != norm.dim()) {
    throw FormatError("model file: input layer does not match normalization");
  }
  return MlpModel{Net(sizes, std::move(weights), std::move(biases)), std::move(norm)};
}

inline void write_model(std::ostream& os, const SvmModel& m) {
  os << "svm gamma " << format_number(m.gamma) << " C " << format_number(m.c) << " dim " << m.dim << " vectors "
     << m.sv_count() << " machines " << m.machines.size() << '\n';
  for (int s = 0; s < m.sv_count(); ++s) {
    os << "sv " << m.sv_source[static_cast<std::size_t>(s)];
    for (int q = 0; q < m.dim; ++q) {
      os << ' ' << format_number(m.support_vectors[static_cast<std::size_t>(s) * static_cast<std::size_t>(m.dim) +
                                                    static_cast<std::size_t>(q)]);
    }
    os << '\n';
  }
  for (const auto& mc : m.machines) {
    os << "machine " << mc.label << ' ' << format_number(mc.bias) << ' ' << mc.sv.size();
    for (std::size_t q = 0; q < mc.sv.size(); ++q) os << ' ' << mc.sv[q] << ' ' << format_number(mc.coef[q]);
    os << '\n';
  }
}

inline SvmModel read_svm(TokenReader& in, Normalizer norm) {
  SvmModel m;
  m.norm = std::move(norm);
  in.expect("svm");
  in.expect("gamma");
  m.gamma = in.number<double>();
  in.expect("C");
  m.c = in.number<double>();
  in.expect("dim");
  m.dim = in.count<int>(1 << 20);
  in.expect("vectors");
  const int nsv = in.count<int>(1 << 30);
  in.expect("machines");
  const int nm = in.count<int>(1 << 30);
  if (static_cast<std::size_t>(m.dim) != m.norm.dim()) throw FormatError("model file: SVM dimension mismatch");
  for (int s = 0; s < nsv; ++s) {
    in.expect("sv");
    m.sv_source.push_back(in.number<int>());
    for (int q = 0; q < m.dim; ++q) m.support_vectors.push_back(in.number<double>());
  }
  for (int k = 0; k < nm; ++k) {
    in.expect("machine");
    SvmModel::Machine mc;
    mc.label = in.number<int>();
    mc.bias = in.number<double>();
    const int n = in.count<int>(nsv);
    for (int q = 0; q < n; ++q) {
      mc.sv.push_back(in.count<int>(nsv - 1));
      mc.coef.push_back(in.number<double>());
    }
    m.machines.push_back(std::move(mc));
  }
  if (m.machines.empty()) throw FormatError("model file: SVM has no machines");
  return m;
}

}  // namespace detail

inline void write_classifier(std::ostream& os, const Classifier& c) {
  os << "seisloc-model " << kModelFormatVersion << "\nkind " << to_string(c.kind()) << '\n';
  detail::write_normalizer(os, c.normalizer());
  std::visit([&](const auto& m) { detail::write_model(os, m); }, c.model);
}

inline Classifier read_classifier(std::istream& is) {
  detail::TokenReader in(is);
  in.expect("seisloc-model");
  const int version = in.number<int>();
  if (version != kModelFormatVersion) throw FormatError("model file: unsupported version " + std::to_string(version));
  in.expect("kind");
  const auto kind = in.word();
  if (kind != "mlp" && kind != "svm") throw FormatError("model file: unknown kind '" + kind + "'");
  auto norm = detail::read_normalizer(in);
  if (kind == "mlp") return Classifier{detail::read_mlp(in, std::move(norm))};
  return Classifier{detail::read_svm(in, std::move(norm))};
}

inline void save_classifier(const std::string& path, const Classifier& c) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_classifier(os, c);
  if (!os) throw IoError("write failed for '" + path + "'");
}

inline Classifier load_classifier(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  try {
    return read_classifier(is);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace seisloc
