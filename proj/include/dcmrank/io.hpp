#pragma once

#include "dcmrank/coupling.hpp"
#include "dcmrank/graph.hpp"
#include "dcmrank/scalar_law.hpp"
#include "dcmrank/seqgen.hpp"
#include "dcmrank/sequence.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dcmrank {

using Json = nlohmann::ordered_json;

//! Shortest decimal that parses back to the same double.
std::string format_double(double x);
//! Throws std::invalid_argument on trailing garbage or an empty field.
double parse_double(std::string_view text);
std::int64_t parse_int(std::string_view text);

void write_sequence_csv(std::ostream& os, const ExtendedBiDegreeSequence& seq);
ExtendedBiDegreeSequence read_sequence_csv(std::istream& is);

void write_edges_csv(std::ostream& os, const DirectedMultigraph& graph);
DirectedMultigraph read_edges_csv(std::istream& is, ExtendedBiDegreeSequence attributes);

//! node_path,N,D,C,Q,Pi in breadth-first order.
void write_tree_csv(std::ostream& os, const ThornyTree& tree);
//! depth < 0 takes the deepest generation present.
ThornyTree read_tree_csv(std::istream& is, int depth = -1);

void write_rank_csv(std::ostream& os, std::span<const double> ranks);
std::vector<double> read_rank_csv(std::istream& is);

//! Single column with the given header.
void write_column_csv(std::ostream& os, std::string_view header, std::span<const double> values);
std::vector<double> read_column_csv(std::istream& is);

Json to_json(const ScalarLaw& law);
ScalarLaw scalar_law_from_json(const Json& j);
Json to_json(const DegreeModelParams& params);
//! Missing keys keep their defaults; a damping value without personalization gives Q = 1 - c.
DegreeModelParams params_from_json(const Json& j);

//! Pretty-printed with a trailing newline.
std::string dump_json(const Json& j);

//! Writes through a temporary sibling and renames, so readers never see partial files.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

} // namespace dcmrank
