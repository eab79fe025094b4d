#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sbm/graph.hpp"

namespace sbm {

/// Text edge list:
///   # optional comment lines
///   n m
///   u v            (m lines, lexicographic, u < v)
///   l_0 ... l_{n-1} (+1 / -1)
/// Comment lines are written first, each prefixed with "# ".
void write_edge_list(std::ostream& out, const LabeledGraph& g,
                     const std::vector<std::string>& comments = {});

/// Parses the format above. Lines starting with '#' are skipped anywhere.
/// A missing label line yields all labels +1. Throws std::runtime_error
/// with a line number on malformed input.
LabeledGraph read_edge_list(std::istream& in);

LabeledGraph load_edge_list(const std::string& path);
void save_edge_list(const std::string& path, const LabeledGraph& g,
                    const std::vector<std::string>& comments = {});

}  // namespace sbm
