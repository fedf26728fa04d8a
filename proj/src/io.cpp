#include "dcmrank/io.hpp"

#include "dcmrank/errors.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace dcmrank {

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

double parse_double(std::string_view text) {
    double x = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), x);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    return x;
}

std::int64_t parse_int(std::string_view text) {
    std::int64_t x = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), x);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
    return x;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

//! Reads the header, checks it, then calls row(fields, line_number) for each data line.
template <class F>
void read_csv(std::istream& is, std::string_view header, F&& row) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("empty CSV input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header)
        throw std::invalid_argument("unexpected CSV header '" + line + "', expected '" + std::string(header) + "'");
    const std::size_t columns = split_fields(header).size();
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != columns)
            throw std::invalid_argument("line " + std::to_string(lineno) + ": expected " +
                                        std::to_string(columns) + " fields");
        row(fields, lineno);
    }
}

} // namespace

void write_sequence_csv(std::ostream& os, const ExtendedBiDegreeSequence& seq) {
    os << "node_id,N,D,C,Q\n";
    for (std::size_t i = 0; i < seq.size(); ++i)
        os << i << ',' << seq.in_degree[i] << ',' << seq.out_degree[i] << ',' << format_double(seq.weight[i])
           << ',' << format_double(seq.personalization[i]) << '\n';
}

ExtendedBiDegreeSequence read_sequence_csv(std::istream& is) {
    ExtendedBiDegreeSequence seq;
    read_csv(is, "node_id,N,D,C,Q", [&](const auto& f, std::size_t lineno) {
        if (parse_int(f[0]) != static_cast<std::int64_t>(seq.size()))
            throw std::invalid_argument("line " + std::to_string(lineno) + ": node ids must be 0, 1, 2, ...");
        seq.in_degree.push_back(parse_int(f[1]));
        seq.out_degree.push_back(parse_int(f[2]));
        seq.weight.push_back(parse_double(f[3]));
        seq.personalization.push_back(parse_double(f[4]));
    });
    seq.validate();
    return seq;
}

void write_edges_csv(std::ostream& os, const DirectedMultigraph& graph) {
    os << "source,target\n";
    for (std::size_t e = 0; e < graph.edge_count(); ++e) os << graph.source[e] << ',' << graph.target[e] << '\n';
}

DirectedMultigraph read_edges_csv(std::istream& is, ExtendedBiDegreeSequence attributes) {
    std::vector<NodeId> src, tgt;
    read_csv(is, "source,target", [&](const auto& f, std::size_t) {
        src.push_back(static_cast<NodeId>(parse_int(f[0])));
        tgt.push_back(static_cast<NodeId>(parse_int(f[1])));
    });
    return graph_from_edges(std::move(attributes), std::move(src), std::move(tgt));
}

void write_tree_csv(std::ostream& os, const ThornyTree& tree) {
    os << "node_path,N,D,C,Q,Pi\n";
    for (std::size_t v = 0; v < tree.size(); ++v)
        os << tree.node_path(v) << ',' << tree.in_degree[v] << ',' << tree.out_degree[v] << ','
           << format_double(tree.weight[v]) << ',' << format_double(tree.personalization[v]) << ','
           << format_double(tree.path_weight[v]) << '\n';
}

ThornyTree read_tree_csv(std::istream& is, int depth) {
    ThornyTree tree;
    std::unordered_map<std::string, std::size_t> index;
    int deepest = 0;
    read_csv(is, "node_path,N,D,C,Q,Pi", [&](const auto& f, std::size_t lineno) {
        const std::string path(f[0]);
        std::int64_t parent = -1, rank = 0;
        std::int32_t gen = 0;
        if (!path.empty()) {
            const auto dot = path.rfind('.');
            const std::string prefix = dot == std::string::npos ? std::string() : path.substr(0, dot);
            const auto it = index.find(prefix);
            if (it == index.end())
                throw std::invalid_argument("line " + std::to_string(lineno) + ": parent of '" + path +
                                            "' not listed before it");
            parent = static_cast<std::int64_t>(it->second);
            rank = parse_int(dot == std::string::npos ? std::string_view(path) : std::string_view(path).substr(dot + 1));
            gen = tree.generation[it->second] + 1;
        } else if (tree.size() != 0) {
            throw std::invalid_argument("line " + std::to_string(lineno) + ": second root");
        }
        index.emplace(path, tree.add_node(parent, rank, gen, parse_int(f[1]), parse_int(f[2]),
                                          parse_double(f[3]), parse_double(f[4]), parse_double(f[5])));
        deepest = std::max<int>(deepest, gen);
    });
    if (tree.size() == 0) throw std::invalid_argument("tree CSV without a root");
    if (depth >= 0 && depth < deepest) throw std::invalid_argument("tree CSV deeper than the declared depth");
    tree.finalize(depth < 0 ? deepest : depth);
    return tree;
}

void write_rank_csv(std::ostream& os, std::span<const double> ranks) {
    os << "node_id,R\n";
    for (std::size_t i = 0; i < ranks.size(); ++i) os << i << ',' << format_double(ranks[i]) << '\n';
}

std::vector<double> read_rank_csv(std::istream& is) {
    std::vector<double> out;
    read_csv(is, "node_id,R", [&](const auto& f, std::size_t) { out.push_back(parse_double(f[1])); });
    return out;
}

void write_column_csv(std::ostream& os, std::string_view header, std::span<const double> values) {
    os << header << '\n';
    for (double v : values) os << format_double(v) << '\n';
}

std::vector<double> read_column_csv(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw std::invalid_argument("empty CSV input");
    std::vector<double> out;
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) out.push_back(parse_double(line));
    }
    return out;
}

Json to_json(const ScalarLaw& law) {
    if (law.is_point()) return Json{{"point", law.lo}};
    return Json{{"uniform", Json::array({law.lo, law.hi})}};
}

ScalarLaw scalar_law_from_json(const Json& j) {
    if (j.is_number()) return ScalarLaw::point(j.get<double>());
    if (j.is_object() && j.contains("point")) return ScalarLaw::point(j.at("point").get<double>());
    if (j.is_object() && j.contains("uniform")) {
        const auto& u = j.at("uniform");
        if (!u.is_array() || u.size() != 2) throw InvalidParameter("uniform law needs [lo, hi]");
        return ScalarLaw::uniform(u[0].get<double>(), u[1].get<double>());
    }
    throw InvalidParameter("scalar law must be a number, {\"point\": x} or {\"uniform\": [lo, hi]}");
}

Json to_json(const DegreeModelParams& p) {
    Json j;
    j["alpha"] = p.alpha;
    j["beta"] = p.beta;
    j["mean"] = p.target_mean;
    j["damping"] = to_json(p.damping);
    j["personalization"] = to_json(p.personalization);
    j["delta0"] = p.effective_delta0();
    return j;
}

DegreeModelParams params_from_json(const Json& j) {
    DegreeModelParams p;
    if (!j.is_object()) throw InvalidParameter("model parameters must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "alpha") p.alpha = value.get<double>();
        else if (key == "beta") p.beta = value.get<double>();
        else if (key == "mean") p.target_mean = value.get<double>();
        else if (key == "damping") p.damping = scalar_law_from_json(value);
        else if (key == "personalization") p.personalization = scalar_law_from_json(value);
        else if (key == "delta0") p.delta0 = value.get<double>();
        else throw InvalidParameter("unknown model key '" + key + "'");
    }
    if (j.contains("damping") && !j.contains("personalization") && p.damping.is_point())
        p.personalization = ScalarLaw::point(1.0 - p.damping.lo);
    p.validate();
    return p;
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!os) throw std::runtime_error("write to " + tmp.string() + " failed");
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace dcmrank
