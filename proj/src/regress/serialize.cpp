#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "odlearn/common/error.hpp"
#include "odlearn/regress/regressor.hpp"

namespace odlearn::regress {

namespace {

constexpr char kMagic[4] = {'O', 'D', 'L', 'R'};
constexpr std::uint32_t kFormatVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_string(std::ostream& out, const std::string& s) {
  write_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}
void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
  write_u64(out, static_cast<std::uint64_t>(v.size()));
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(v.size())));
}
void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  write_u64(out, static_cast<std::uint64_t>(m.rows()));
  write_u64(out, static_cast<std::uint64_t>(m.cols()));
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size())));
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
double read_f64(std::istream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
std::string read_string(std::istream& in) {
  std::string s(read_u64(in), '\0');
  in.read(s.data(), static_cast<std::streamsize>(s.size()));
  return s;
}
Eigen::VectorXd read_vector(std::istream& in) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(read_u64(in)));
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(v.size())));
  return v;
}
Eigen::MatrixXd read_matrix(std::istream& in) {
  const auto rows = static_cast<Eigen::Index>(read_u64(in));
  const auto cols = static_cast<Eigen::Index>(read_u64(in));
  Eigen::MatrixXd m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size())));
  return m;
}

}  // namespace

void save_model(const TrainedRegressor& model, std::ostream& out) {
  out.write(kMagic, 4);
  write_u32(out, kFormatVersion);
  write_u32(out, model.output_mode == OutputMode::kKeplerian ? 0u : 1u);
  write_u32(out, model.standardize_targets ? 1u : 0u);

  write_vector(out, model.standardizer.shift);
  write_vector(out, model.standardizer.scale);
  write_u64(out, model.standardizer.constant_dims.size());
  for (bool b : model.standardizer.constant_dims) out.put(b ? 1 : 0);

  write_vector(out, model.inner_bandwidths);
  write_f64(out, model.hyperparams.inner_multiplier);
  write_vector(out, model.hyperparams.outer_bandwidths);
  write_f64(out, model.hyperparams.regularizer);
  write_vector(out, model.target_shift);
  write_vector(out, model.target_scale);
  write_matrix(out, model.dual_coefficients);

  write_u64(out, model.training_embeddings.size());
  for (const auto& e : model.training_embeddings) {
    write_string(out, e.source_id);
    write_matrix(out, e.samples);
    write_vector(out, e.weights);
  }
  if (!out) throw NumericalError("save_model: write failed");
}

TrainedRegressor load_model(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw ConfigError("load_model: bad magic, not a model file");
  }
  const std::uint32_t version = read_u32(in);
  if (version != kFormatVersion) {
    throw ConfigError("load_model: unsupported format version " + std::to_string(version));
  }

  TrainedRegressor model;
  model.output_mode = read_u32(in) == 0 ? OutputMode::kKeplerian : OutputMode::kCartesian;
  model.standardize_targets = read_u32(in) != 0;

  model.standardizer.shift = read_vector(in);
  model.standardizer.scale = read_vector(in);
  model.standardizer.constant_dims.resize(read_u64(in));
  for (std::size_t i = 0; i < model.standardizer.constant_dims.size(); ++i) {
    model.standardizer.constant_dims[i] = in.get() != 0;
  }

  model.inner_bandwidths = read_vector(in);
  model.hyperparams.inner_multiplier = read_f64(in);
  model.hyperparams.outer_bandwidths = read_vector(in);
  model.hyperparams.regularizer = read_f64(in);
  model.target_shift = read_vector(in);
  model.target_scale = read_vector(in);
  model.dual_coefficients = read_matrix(in);

  const std::uint64_t count = read_u64(in);
  model.training_embeddings.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    model.training_embeddings[i].source_id = read_string(in);
    model.training_embeddings[i].samples = read_matrix(in);
    model.training_embeddings[i].weights = read_vector(in);
  }
  if (!in) throw ConfigError("load_model: truncated model file");
  return model;
}

void save_model_file(const TrainedRegressor& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("save_model_file: cannot open " + path);
  save_model(model, out);
}

TrainedRegressor load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("load_model_file: cannot open " + path);
  return load_model(in);
}

}  // namespace odlearn::regress
