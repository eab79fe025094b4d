#include "sbm/graph_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sbm {

void write_edge_list(std::ostream& out, const LabeledGraph& g,
                     const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << g.num_vertices() << ' ' << g.num_edges() << '\n';
  for (const auto& e : g.graph().edges()) out << e.u << ' ' << e.v << '\n';
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    if (v > 0) out << ' ';
    out << (g.label(static_cast<VertexId>(v)) > 0 ? "+1" : "-1");
  }
  out << '\n';
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-comment, non-blank line; false at end of input.
  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++number_;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("edge list line " + std::to_string(number_) + ": " + what);
  }

 private:
  std::istream& in_;
  std::size_t number_ = 0;
};

}  // namespace

LabeledGraph read_edge_list(std::istream& in) {
  LineReader reader(in);
  std::string line;
  if (!reader.next(line)) reader.fail("missing header");
  std::size_t n = 0, m = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> n >> m)) reader.fail("header must be 'n m'");
  }
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!reader.next(line)) reader.fail("expected " + std::to_string(m) + " edges");
    std::istringstream ss(line);
    long long u = -1, v = -1;
    if (!(ss >> u >> v) || u < 0 || v < 0) reader.fail("malformed edge");
    edges.push_back({static_cast<VertexId>(u), static_cast<VertexId>(v)});
  }
  std::vector<Label> labels(n, 1);
  if (reader.next(line)) {
    std::istringstream ss(line);
    for (std::size_t v = 0; v < n; ++v) {
      int l = 0;
      if (!(ss >> l) || (l != 1 && l != -1)) reader.fail("labels must be n values of +1/-1");
      labels[v] = static_cast<Label>(l);
    }
  }
  try {
    return LabeledGraph(SimpleGraph(n, std::move(edges)), std::move(labels));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("edge list: ") + e.what());
  }
}

LabeledGraph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_edge_list(in);
}

void save_edge_list(const std::string& path, const LabeledGraph& g,
                    const std::vector<std::string>& comments) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_edge_list(out, g, comments);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace sbm
