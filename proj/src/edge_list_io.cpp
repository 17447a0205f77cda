#include "barlink/edge_list_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "barlink/errors.hpp"

namespace barlink {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != '\r') ++end;
    out.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

long long parse_integer(std::string_view token, std::size_t line_no, const char* what) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(std::string("malformed ") + what + " '" + std::string(token) + "'", line_no);
  }
  return value;
}

double parse_real(std::string_view token, std::size_t line_no) {
  double value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError("malformed feature value '" + std::string(token) + "'", line_no);
  }
  return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf.data(), ptr);
}

EdgeListData load_edge_list(const std::filesystem::path& path, EdgeListKind kind, std::size_t dim,
                            NodeIndex& nodes, std::size_t node_count) {
  auto in = open_input(path);
  const std::size_t fixed = kind == EdgeListKind::labeled ? 4 : 3;
  const bool has_features = kind != EdgeListKind::main;

  std::vector<std::vector<Edge>> edges;
  std::vector<std::vector<double>> features;
  std::vector<std::vector<std::int8_t>> labels;
  std::string line;
  std::size_t line_no = 0;
  std::size_t records = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = split_ws(line);
    if (tokens.empty() || tokens.front().front() == '#') continue;
    if (tokens.size() < fixed) throw ParseError("expected at least " + std::to_string(fixed) + " fields", line_no);
    if (!has_features && tokens.size() != fixed) throw ParseError("main edge rows have exactly 3 fields", line_no);
    if (has_features) {
      std::size_t found = tokens.size() - fixed;
      if (dim == 0 && records == 0) dim = found;
      if (found != dim) {
        throw DimensionError("expected " + std::to_string(dim) + " features, found " + std::to_string(found) +
                             " (line " + std::to_string(line_no) + ")");
      }
    }
    long long t = parse_integer(tokens[0], line_no, "time stamp");
    if (t < 1) throw RangeError("time stamp " + std::to_string(t) + " must be >= 1 (line " + std::to_string(line_no) + ")");
    NodeId src = nodes.intern(tokens[1]);
    NodeId dst = nodes.intern(tokens[2]);
    if (node_count != 0 && (src >= node_count || dst >= node_count)) {
      throw RangeError("node outside the declared universe (line " + std::to_string(line_no) + ")");
    }
    auto step = static_cast<std::size_t>(t);
    if (edges.size() < step) {
      edges.resize(step);
      features.resize(step);
      labels.resize(step);
    }
    edges[step - 1].push_back({src, dst});
    if (kind == EdgeListKind::labeled) {
      long long label = parse_integer(tokens[3], line_no, "label");
      if (label != 1 && label != -1) throw ParseError("label must be -1 or 1", line_no);
      labels[step - 1].push_back(static_cast<std::int8_t>(label));
    }
    for (std::size_t k = fixed; k < tokens.size(); ++k) features[step - 1].push_back(parse_real(tokens[k], line_no));
    ++records;
  }
  if (records == 0) throw ParseError("no edges in " + path.string());

  std::size_t universe = node_count ? node_count : nodes.size();
  if (!has_features) features.clear();
  if (kind != EdgeListKind::labeled) labels.clear();
  NetworkRole role = kind == EdgeListKind::main ? NetworkRole::main : NetworkRole::auxiliary;
  if (kind == EdgeListKind::labeled) role = NetworkRole::main;
  auto built = build_series(universe, role, std::move(edges), has_features ? dim : 0, std::move(features),
                            std::move(labels));
  EdgeListData out;
  out.adjacency = std::move(built.adjacency);
  out.features = std::move(built.features);
  out.labels = std::move(built.labels);
  return out;
}

void write_edge_list(const std::filesystem::path& path, const AdjacencySeries& series, const NodeIndex& nodes,
                     const EdgeFeatureSeries* features, const std::vector<std::vector<std::int8_t>>* labels) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  std::string row;
  for (TimeIndex t = 1; t <= series.steps(); ++t) {
    const auto& step = series.at(t);
    for (NodeId i : step.active_senders()) {
      for (std::size_t slot = step.row_begin(i); slot < step.row_end(i); ++slot) {
        row.clear();
        row += std::to_string(t);
        row += ' ';
        row += nodes.label(i);
        row += ' ';
        row += nodes.label(step.target(slot));
        if (labels) {
          row += ' ';
          row += std::to_string((*labels)[static_cast<std::size_t>(t - 1)][slot]);
        }
        if (features) {
          for (double v : features->row(t, slot)) {
            row += ' ';
            row += format_double(v);
          }
        }
        row += '\n';
        out << row;
      }
    }
  }
}

Dataset load_dataset_dir(const std::filesystem::path& dir, std::size_t dim, const DatasetOptions& options) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error("dataset directory not found: " + dir.string());
  NodeIndex nodes;
  std::size_t main_nodes = 0;
  bool declared = false;
  if (fs::exists(dir / "nodes.txt")) {
    auto in = open_input(dir / "nodes.txt");
    std::string line;
    std::size_t line_no = 0;
    bool seen_aux = false;
    while (std::getline(in, line)) {
      ++line_no;
      auto tokens = split_ws(line);
      if (tokens.empty() || tokens.front().front() == '#') continue;
      if (tokens.size() != 2 || (tokens[1] != "main" && tokens[1] != "aux")) {
        throw ParseError("nodes.txt rows are 'label main|aux'", line_no);
      }
      if (tokens[1] == "main") {
        if (seen_aux) throw ParseError("main nodes must precede auxiliary-only nodes", line_no);
        ++main_nodes;
      } else {
        seen_aux = true;
      }
      nodes.intern(tokens[0]);
    }
    declared = true;
  }

  if (fs::exists(dir / "labeled.txt")) {
    auto labeled = load_edge_list(dir / "labeled.txt", EdgeListKind::labeled, dim, nodes, declared ? nodes.size() : 0);
    return make_single_dataset(std::move(nodes), labeled.adjacency, labeled.features, std::move(labeled.labels),
                               options);
  }
  auto main = load_edge_list(dir / "main.txt", EdgeListKind::main, 0, nodes, declared ? main_nodes : 0);
  if (!declared) main_nodes = nodes.size();
  auto aux = load_edge_list(dir / "aux.txt", EdgeListKind::auxiliary, dim, nodes, declared ? nodes.size() : 0);
  return make_dual_dataset(std::move(nodes), main_nodes, main.adjacency, aux.adjacency, aux.features, options);
}

void write_dataset_dir(const std::filesystem::path& dir, const Dataset& data) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "nodes.txt");
    if (!out) throw Error("cannot write " + (dir / "nodes.txt").string());
    for (std::size_t i = 0; i < data.total_nodes(); ++i) {
      out << data.nodes.label(static_cast<NodeId>(i)) << (i < data.main_nodes ? " main\n" : " aux\n");
    }
  }
  if (data.mode == SequenceMode::single) {
    write_edge_list(dir / "labeled.txt", data.main, data.nodes, &data.features, &data.labels);
    return;
  }
  write_edge_list(dir / "main.txt", data.main, data.nodes);
  write_edge_list(dir / "aux.txt", *data.aux, data.nodes, &data.features);
}

}  // namespace barlink
