#include "conevex/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace conevex {

using nlohmann::json;

namespace {

json mat_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
    rows.push_back(r);
  }
  return rows;
}

json vec_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Mat json_mat(const json& j, int rows, int cols, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    throw ValidationError(std::string("instance: ") + what + " has wrong shape");
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != cols)
      throw ValidationError(std::string("instance: ") + what + " has wrong shape");
    for (int k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

Vec json_vec(const json& j, int n, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw ValidationError(std::string("instance: ") + what + " has wrong length");
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = j[i].get<double>();
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

double to_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ValidationError("csv: not a number: '" + s + "'");
  }
  if (pos != s.size()) throw ValidationError("csv: not a number: '" + s + "'");
  return v;
}

}  // namespace

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& p : split(s, ',')) out.push_back(to_double(p));
  return out;
}

json instance_to_json(const ConeModel& cone, const std::vector<GroupElement>& gens, int word_bound,
                      const std::optional<Vec>& coboundary) {
  json j;
  j["cone"]["kind"] = cone.kind() == ConeKind::Quadratic ? "quadratic" : "simplicial";
  j["cone"]["d"] = cone.d();
  if (cone.kind() == ConeKind::Simplicial) j["cone"]["rays"] = mat_json(cone.rays().transpose());
  json g = json::array();
  for (const auto& e : gens) g.push_back(json{{"matrix", mat_json(e.lin)}, {"translation", vec_json(e.tau)}});
  j["group"]["generators"] = g;
  j["group"]["word_bound"] = word_bound;
  if (coboundary) j["group"]["coboundary"] = vec_json(*coboundary);
  return j;
}

Instance instance_from_json(const json& j) {
  Instance inst;
  try {
    const auto& c = j.at("cone");
    const std::string kind = c.at("kind").get<std::string>();
    const int d = c.at("d").get<int>();
    if (d < 1 || d > 3) throw ValidationError("instance: d must be 1, 2 or 3");
    if (kind == "quadratic") {
      inst.cone = ConeModel::quadratic(d);
    } else if (kind == "simplicial") {
      if (c.contains("rays"))
        inst.cone = ConeModel::simplicial_from_rays(json_mat(c["rays"], d + 1, d + 1, "rays").transpose());
      else
        inst.cone = ConeModel::simplicial(d);
    } else {
      throw ValidationError("instance: unknown cone kind '" + kind + "'");
    }
    const int dim = d + 1;
    if (j.contains("group")) {
      const auto& g = j["group"];
      inst.word_bound = g.value("word_bound", 0);
      if (inst.word_bound < 0) throw ValidationError("instance: word_bound must be nonnegative");
      for (const auto& e : g.value("generators", json::array())) {
        GroupElement ge;
        ge.lin = json_mat(e.at("matrix"), dim, dim, "generator matrix");
        ge.tau = e.contains("translation") ? json_vec(e["translation"], dim, "translation") : Vec::Zero(dim);
        inst.generators.push_back(ge);
      }
      if (g.contains("coboundary")) {
        const Vec v = json_vec(g["coboundary"], dim, "coboundary");
        for (const auto& ge : inst.generators) {
          const Vec expect = (Mat::Identity(dim, dim) - ge.lin) * v;
          if ((expect - ge.tau).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + expect.norm()))
            throw ValidationError("instance: translations do not match the coboundary vector");
        }
        inst.coboundary = v;
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("instance: malformed JSON: ") + e.what());
  }
  inst.raw = j;
  return inst;
}

GroupAction Instance::action() const {
  if (generators.empty()) return GroupAction(cone, {}, 0);
  GroupAction a(cone, generators, word_bound);
  if (coboundary) a.set_coboundary_vector(*coboundary);
  return a;
}

std::string Instance::hash() const { return fnv1a_hex(raw.dump()); }

Instance load_instance(const std::string& path) {
  const std::string text = read_text(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError("instance: cannot parse " + path + ": " + e.what());
  }
  return instance_from_json(j);
}

json output_header(const Instance& inst, std::uint64_t seed, const json& grid) {
  return json{{"instance_hash", inst.hash()}, {"seed", seed}, {"grid", grid}, {"version", kVersion}};
}

std::string header_line(const json& header) { return header.dump() + "\n"; }

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << content;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string grid_csv(const GridFn& f, const json& header) {
  std::ostringstream out;
  out << header_line(header);
  const int d = f.spec.d;
  out << "box";
  for (int a = 0; a < d; ++a) out << ',' << fmt17(f.spec.lo(a));
  for (int a = 0; a < d; ++a) out << ',' << fmt17(f.spec.hi(a));
  out << ",shape";
  for (int a = 0; a < d; ++a) out << ',' << f.spec.n[a];
  out << '\n';
  for (std::size_t i = 0; i < f.size(); ++i) {
    out << i;
    const Vec y = f.spec.node(i);
    for (int a = 0; a < d; ++a) out << ',' << fmt17(y(a));
    out << ',' << fmt17(f.masked(i) ? f.values[i] : 0.0) << ',' << int(f.mask[i]) << '\n';
  }
  return out.str();
}

GridFn parse_grid_csv(const std::string& text) {
  const auto lines = lines_of(text);
  std::size_t k = 0;
  if (k < lines.size() && lines[k].front() == '{') ++k;
  if (k >= lines.size()) throw ValidationError("grid csv: missing box row");
  const auto box = split(lines[k++], ',');
  if (box.empty() || box[0] != "box") throw ValidationError("grid csv: missing box row");
  std::size_t shape_at = 0;
  for (std::size_t i = 0; i < box.size(); ++i)
    if (box[i] == "shape") shape_at = i;
  const int d = static_cast<int>(shape_at - 1) / 2;
  if (d < 1 || static_cast<int>(box.size()) != 2 + 3 * d) throw ValidationError("grid csv: malformed box row");
  GridSpec s;
  s.d = d;
  s.lo.resize(d);
  s.hi.resize(d);
  s.n.resize(d);
  for (int a = 0; a < d; ++a) {
    s.lo(a) = to_double(box[1 + a]);
    s.hi(a) = to_double(box[1 + d + a]);
    s.n[a] = static_cast<int>(to_double(box[shape_at + 1 + a]));
    if (s.n[a] < 2) throw ValidationError("grid csv: shape must be at least 2");
  }
  GridFn f(s);
  if (lines.size() - k != f.size()) throw ValidationError("grid csv: node count does not match shape");
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto cols = split(lines[k + i], ',');
    if (static_cast<int>(cols.size()) != d + 3) throw ValidationError("grid csv: wrong column count");
    const auto idx = static_cast<std::size_t>(to_double(cols[0]));
    if (idx != i) throw ValidationError("grid csv: nodes out of order");
    f.values[i] = to_double(cols[d + 1]);
    f.mask[i] = to_double(cols[d + 2]) != 0.0 ? 1 : 0;
    if (f.mask[i] && !std::isfinite(f.values[i])) throw ValidationError("grid csv: non-finite value at masked node");
  }
  return f;
}

std::string torus_csv(const std::vector<TorusRow>& rows, int n, const json& header) {
  std::ostringstream out;
  out << header_line(header);
  const std::size_t d = rows.empty() ? 0 : rows[0].theta.size();
  out << "torus," << n << '\n';
  out << "index";
  for (std::size_t a = 0; a < d; ++a) out << ",theta" << a;
  for (std::size_t a = 0; a < d; ++a) out << ",y" << a;
  out << ",h\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << i;
    for (double v : rows[i].theta) out << ',' << fmt17(v);
    for (double v : rows[i].y) out << ',' << fmt17(v);
    out << ',' << fmt17(rows[i].h) << '\n';
  }
  return out.str();
}

std::vector<double> parse_torus_csv(const std::string& text, int* n_out) {
  const auto lines = lines_of(text);
  std::size_t k = 0;
  if (k < lines.size() && lines[k].front() == '{') ++k;
  if (k + 1 >= lines.size() || lines[k].rfind("torus,", 0) != 0) throw ValidationError("torus csv: missing torus row");
  const int n = static_cast<int>(to_double(lines[k].substr(6)));
  if (n_out) *n_out = n;
  k += 2;
  std::vector<double> h;
  for (; k < lines.size(); ++k) {
    const auto cols = split(lines[k], ',');
    if (static_cast<std::size_t>(to_double(cols.at(0))) != h.size()) throw ValidationError("torus csv: rows out of order");
    h.push_back(to_double(cols.back()));
  }
  return h;
}

std::string measure_csv(const std::vector<double>& mass, const std::vector<double>& density,
                        const std::vector<std::uint8_t>& atom, const json& header) {
  std::ostringstream out;
  out << header_line(header);
  out << "cell,density,atom,mass\n";
  for (std::size_t i = 0; i < mass.size(); ++i)
    out << i << ',' << fmt17(density[i]) << ',' << int(atom.empty() ? 0 : atom[i]) << ',' << fmt17(mass[i]) << '\n';
  return out.str();
}

std::vector<double> parse_measure_csv(const std::string& text) {
  const auto lines = lines_of(text);
  std::size_t k = 0;
  if (k < lines.size() && lines[k].front() == '{') ++k;
  if (k < lines.size() && lines[k].rfind("cell", 0) == 0) ++k;
  std::vector<double> mass;
  for (; k < lines.size(); ++k) {
    const auto cols = split(lines[k], ',');
    if (cols.size() != 4) throw ValidationError("measure csv: expected 4 columns");
    if (static_cast<std::size_t>(to_double(cols[0])) != mass.size()) throw ValidationError("measure csv: rows out of order");
    const double m = to_double(cols[3]);
    if (!(m >= 0.0) || !std::isfinite(m)) throw ValidationError("measure csv: masses must be finite and nonnegative");
    mass.push_back(m);
  }
  return mass;
}

}  // namespace conevex
