#include "barlink/model_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "barlink/edge_list_io.hpp"
#include "barlink/errors.hpp"

namespace barlink {

namespace {

struct Record {
  std::size_t line = 0;
  std::vector<std::string> values;
};

// Records in file order; the header must be "<magic> 1".
std::vector<std::pair<std::string, Record>> read_records(const std::filesystem::path& path, std::string_view magic) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::pair<std::string, Record>> out;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string key;
    if (!(tokens >> key) || key.front() == '#') continue;
    Record rec{line_no, {}};
    for (std::string v; tokens >> v;) rec.values.push_back(v);
    if (!header) {
      if (key != magic) throw ParseError("expected '" + std::string(magic) + "' header", line_no);
      if (rec.values.size() != 1 || rec.values[0] != "1") throw ParseError("unsupported format version", line_no);
      header = true;
      continue;
    }
    out.emplace_back(std::move(key), std::move(rec));
  }
  if (!header) throw ParseError("empty file " + path.string());
  return out;
}

double to_real(const std::string& s, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("malformed number '" + s + "'", line);
  return v;
}

std::size_t to_count(const std::string& s, std::size_t line) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("malformed count '" + s + "'", line);
  return v;
}

class Fields {
 public:
  explicit Fields(std::vector<std::pair<std::string, Record>> records) {
    for (auto& [k, r] : records) {
      if (!single_.emplace(k, r).second && k != "mu" && k != "background") {
        throw ParseError("duplicate key '" + k + "'", r.line);
      }
      repeated_[k].push_back(std::move(r));
    }
  }

  const Record& get(const std::string& key, std::size_t arity) const {
    auto it = single_.find(key);
    if (it == single_.end()) throw ParseError("missing key '" + key + "'");
    if (arity && it->second.values.size() != arity) throw ParseError("key '" + key + "' has the wrong arity", it->second.line);
    return it->second;
  }
  double real(const std::string& key) const {
    const auto& r = get(key, 1);
    return to_real(r.values[0], r.line);
  }
  std::size_t count(const std::string& key) const {
    const auto& r = get(key, 1);
    return to_count(r.values[0], r.line);
  }
  std::vector<double> vector(const std::string& key, std::size_t dim) const {
    const auto& r = get(key, 0);
    if (r.values.size() != dim) {
      throw DimensionError("key '" + key + "' has " + std::to_string(r.values.size()) + " values, expected " +
                           std::to_string(dim));
    }
    std::vector<double> out;
    for (const auto& v : r.values) out.push_back(to_real(v, r.line));
    return out;
  }
  const std::vector<Record>& all(const std::string& key) const {
    static const std::vector<Record> none;
    auto it = repeated_.find(key);
    return it == repeated_.end() ? none : it->second;
  }

 private:
  std::map<std::string, Record> single_;
  std::map<std::string, std::vector<Record>> repeated_;
};

void write_vector(std::ostream& out, std::string_view key, const std::vector<double>& values) {
  out << key;
  for (double v : values) out << ' ' << format_double(v);
  out << '\n';
}

}  // namespace

std::string_view kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::bar: return "bar";
    case ModelKind::logistic: return "logistic";
    case ModelKind::logistic_raw: return "logistic-raw";
    case ModelKind::gft: return "gft";
  }
  return "unknown";
}

ModelKind parse_kind(std::string_view name) {
  for (ModelKind k : {ModelKind::bar, ModelKind::logistic, ModelKind::logistic_raw, ModelKind::gft}) {
    if (name == kind_name(k)) return k;
  }
  throw ParseError("unknown model kind '" + std::string(name) + "'");
}

void write_model(const std::filesystem::path& path, const ModelArtifact& model) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "barlink-model 1\n";
  out << "kind " << kind_name(model.kind) << '\n';
  if (model.kind == ModelKind::gft) {
    out << "k " << model.gft.k << '\n';
    out << "nu " << format_double(model.gft.nu) << '\n';
    out << "tau " << format_double(model.gft.tau) << '\n';
    out << "ridge " << format_double(model.gft.ridge) << '\n';
    out << "iterations " << model.gft.iterations << '\n';
    out << "tolerance " << format_double(model.gft.tolerance) << '\n';
    out << "node_cap " << model.gft.node_cap << '\n';
    return;
  }
  if (model.kind == ModelKind::bar) {
    out << "lambda " << format_double(model.lambda) << '\n';
    out << "alpha " << format_double(model.alpha) << '\n';
    out << "q0 " << format_double(model.q0) << '\n';
  }
  out << "dim " << model.beta.size() << '\n';
  write_vector(out, "beta", model.beta);
}

ModelArtifact read_model(const std::filesystem::path& path) {
  Fields f(read_records(path, "barlink-model"));
  ModelArtifact model;
  model.kind = parse_kind(f.get("kind", 1).values[0]);
  if (model.kind == ModelKind::gft) {
    model.gft.k = f.count("k");
    model.gft.nu = f.real("nu");
    model.gft.tau = f.real("tau");
    model.gft.ridge = f.real("ridge");
    model.gft.iterations = f.count("iterations");
    model.gft.tolerance = f.real("tolerance");
    model.gft.node_cap = f.count("node_cap");
    return model;
  }
  if (model.kind == ModelKind::bar) {
    model.lambda = f.real("lambda");
    model.alpha = f.real("alpha");
    model.q0 = f.real("q0");
  }
  model.beta = f.vector("beta", f.count("dim"));
  return model;
}

void write_truth(const std::filesystem::path& path, const GroundTruth& truth) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "barlink-truth 1\n";
  out << "lambda " << format_double(truth.lambda) << '\n';
  out << "q0 " << format_double(truth.q0) << '\n';
  out << "dim " << truth.beta.size() << '\n';
  write_vector(out, "beta", truth.beta);
  out << "steps " << truth.mu_series.size() << '\n';
  for (std::size_t t = 0; t < truth.mu_series.size(); ++t) write_vector(out, "mu " + std::to_string(t + 1), truth.mu_series[t]);
  for (std::size_t t = 0; t < truth.background_edges.size(); ++t) {
    out << "background " << (t + 1) << ' ' << truth.background_edges[t] << '\n';
  }
}

GroundTruth read_truth(const std::filesystem::path& path) {
  Fields f(read_records(path, "barlink-truth"));
  GroundTruth truth;
  truth.lambda = f.real("lambda");
  truth.q0 = f.real("q0");
  const std::size_t dim = f.count("dim");
  truth.beta = f.vector("beta", dim);
  const std::size_t steps = f.count("steps");
  truth.mu_series.assign(steps, {});
  truth.background_edges.assign(steps, 0);
  for (const auto& r : f.all("mu")) {
    if (r.values.size() != dim + 1) throw ParseError("mu rows hold a step and " + std::to_string(dim) + " values", r.line);
    std::size_t t = to_count(r.values[0], r.line);
    if (t < 1 || t > steps) throw ParseError("mu step out of range", r.line);
    for (std::size_t k = 1; k <= dim; ++k) truth.mu_series[t - 1].push_back(to_real(r.values[k], r.line));
  }
  for (const auto& r : f.all("background")) {
    if (r.values.size() != 2) throw ParseError("background rows hold a step and a count", r.line);
    std::size_t t = to_count(r.values[0], r.line);
    if (t < 1 || t > steps) throw ParseError("background step out of range", r.line);
    truth.background_edges[t - 1] = to_count(r.values[1], r.line);
  }
  return truth;
}

}  // namespace barlink
