#include "lmh/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "lmh/errors.hpp"

namespace lmh {

namespace {

Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

// Line-oriented tokenizer that drops '#' comments and blank lines.
std::vector<std::vector<std::string>> tokenize(std::string_view content) {
  std::vector<std::vector<std::string>> lines;
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    for (std::string tok; ls >> tok;) tokens.push_back(std::move(tok));
    if (!tokens.empty()) lines.push_back(std::move(tokens));
  }
  return lines;
}

double parse_double(const std::string& tok, const char* what) {
  try {
    std::size_t used = 0;
    double value = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return value;
  } catch (const std::exception&) {
    throw InvalidInput(std::string("parse error: bad ") + what + " '" + tok + "'");
  }
}

long parse_int(std::string_view tok, const char* what) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw InvalidInput(std::string("parse error: bad ") + what + " '" + std::string(tok) + "'");
  return value;
}

TriMesh parse_off(std::string_view content) {
  auto lines = tokenize(content);
  if (lines.empty() || lines[0][0] != "OFF")
    throw InvalidInput("parse error: OFF header missing");
  // Counts may follow the header on the same line.
  std::vector<std::string> counts(lines[0].begin() + 1, lines[0].end());
  std::size_t cursor = 1;
  if (counts.empty()) {
    if (lines.size() < 2) throw InvalidInput("parse error: OFF counts line missing");
    counts = lines[1];
    cursor = 2;
  }
  if (counts.size() < 2) throw InvalidInput("parse error: OFF counts line needs vertex and face counts");
  const long nv = parse_int(counts[0], "vertex count");
  const long nf = parse_int(counts[1], "face count");
  if (nv <= 0 || nf <= 0) throw InvalidInput("empty mesh");
  if (lines.size() < cursor + static_cast<std::size_t>(nv + nf))
    throw InvalidInput("parse error: OFF file truncated");

  Eigen::MatrixX3d V(nv, 3);
  for (long i = 0; i < nv; ++i) {
    const auto& t = lines[cursor + i];
    if (t.size() < 3) throw InvalidInput("parse error: vertex line " + std::to_string(i) + " has fewer than 3 coordinates");
    for (int c = 0; c < 3; ++c) V(i, c) = parse_double(t[c], "coordinate");
  }
  cursor += nv;
  Eigen::MatrixX3i F(nf, 3);
  for (long f = 0; f < nf; ++f) {
    const auto& t = lines[cursor + f];
    const long arity = parse_int(t[0], "face arity");
    if (arity != 3) throw InvalidInput("non-triangle face " + std::to_string(f) + " (arity " + std::to_string(arity) + ")");
    if (t.size() < 4) throw InvalidInput("parse error: face line " + std::to_string(f) + " truncated");
    for (int c = 0; c < 3; ++c) F(f, c) = static_cast<int>(parse_int(t[1 + c], "face index"));
  }
  return TriMesh(std::move(V), std::move(F));
}

TriMesh parse_obj(std::string_view content) {
  std::vector<Eigen::Vector3d> verts;
  std::vector<Eigen::Vector3i> faces;
  for (const auto& t : tokenize(content)) {
    if (t[0] == "v") {
      if (t.size() < 4) throw InvalidInput("parse error: OBJ vertex record needs 3 coordinates");
      verts.emplace_back(parse_double(t[1], "coordinate"), parse_double(t[2], "coordinate"),
                         parse_double(t[3], "coordinate"));
    } else if (t[0] == "f") {
      if (t.size() != 4)
        throw InvalidInput("non-triangle face " + std::to_string(faces.size()) + " (arity " + std::to_string(t.size() - 1) + ")");
      Eigen::Vector3i face;
      for (int c = 0; c < 3; ++c) {
        std::string_view tok = t[1 + c];
        tok = tok.substr(0, tok.find('/'));
        long idx = parse_int(tok, "face index");
        if (idx < 0) idx += static_cast<long>(verts.size()) + 1;  // relative index
        face[c] = static_cast<int>(idx - 1);
      }
      faces.push_back(face);
    }
  }
  if (verts.empty() || faces.empty()) throw InvalidInput("empty mesh");
  Eigen::MatrixX3d V(verts.size(), 3);
  for (std::size_t i = 0; i < verts.size(); ++i) V.row(i) = verts[i].transpose();
  Eigen::MatrixX3i F(faces.size(), 3);
  for (std::size_t i = 0; i < faces.size(); ++i) F.row(i) = faces[i].transpose();
  return TriMesh(std::move(V), std::move(F));
}

}  // namespace

TriMesh::TriMesh(Eigen::MatrixX3d vertices, Eigen::MatrixX3i faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  const int n = num_vertices();
  if (n == 0 || num_faces() == 0) throw InvalidInput("empty mesh");
  if (!vertices_.allFinite()) throw InvalidInput("non-finite vertex coordinate");

  std::vector<Edge> all;
  all.reserve(3 * static_cast<std::size_t>(num_faces()));
  for (int f = 0; f < num_faces(); ++f) {
    for (int c = 0; c < 3; ++c) {
      const int i = faces_(f, c);
      if (i < 0 || i >= n)
        throw InvalidInput("face " + std::to_string(f) + " references vertex " + std::to_string(i) +
                           " outside [0, " + std::to_string(n) + ")");
    }
    const int a = faces_(f, 0), b = faces_(f, 1), c = faces_(f, 2);
    if (a == b || b == c || a == c)
      throw InvalidInput("degenerate face " + std::to_string(f) + " repeats a vertex index");
    all.push_back(make_edge(a, b));
    all.push_back(make_edge(b, c));
    all.push_back(make_edge(c, a));
  }
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j] == all[i]) ++j;
    const std::size_t count = j - i;
    if (count == 1) {
      boundary_.push_back(all[i]);
    } else if (count == 2) {
      interior_.push_back(all[i]);
    } else {
      throw InvalidInput("non-manifold edge (" + std::to_string(all[i][0]) + ", " +
                         std::to_string(all[i][1]) + ") shared by " + std::to_string(count) + " faces");
    }
    i = j;
  }

  neighbors_.assign(n, {});
  for (const auto* set : {&interior_, &boundary_}) {
    for (const auto& e : *set) {
      neighbors_[e[0]].push_back(e[1]);
      neighbors_[e[1]].push_back(e[0]);
    }
  }
  for (auto& nb : neighbors_) std::sort(nb.begin(), nb.end());
}

TriMesh load_mesh(std::string_view content, MeshFormat format) {
  return format == MeshFormat::OFF ? parse_off(content) : parse_obj(content);
}

TriMesh read_mesh(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open mesh file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (ext == ".off") return load_mesh(buffer.str(), MeshFormat::OFF);
  if (ext == ".obj") return load_mesh(buffer.str(), MeshFormat::OBJ);
  throw InvalidInput("unknown mesh extension '" + ext + "' (expected .off or .obj)");
}

std::string to_off(const TriMesh& mesh) { return to_off(mesh, mesh.vertices()); }

std::string to_off(const TriMesh& mesh, const Eigen::MatrixX3d& positions) {
  if (positions.rows() != mesh.num_vertices()) throw InvalidInput("position count does not match mesh");
  std::ostringstream out;
  out << std::setprecision(17);
  out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_faces() << " 0\n";
  for (int i = 0; i < mesh.num_vertices(); ++i)
    out << positions(i, 0) << ' ' << positions(i, 1) << ' ' << positions(i, 2) << '\n';
  for (int f = 0; f < mesh.num_faces(); ++f)
    out << "3 " << mesh.faces()(f, 0) << ' ' << mesh.faces()(f, 1) << ' ' << mesh.faces()(f, 2) << '\n';
  return out.str();
}

void write_off(const std::filesystem::path& path, const TriMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
  out << to_off(mesh);
}

Eigen::VectorXd graph_geodesics(const TriMesh& mesh, int source) {
  return graph_geodesics(mesh, std::vector<int>{source});
}

Eigen::VectorXd graph_geodesics(const TriMesh& mesh, const std::vector<int>& sources) {
  const int n = mesh.num_vertices();
  const auto& V = mesh.vertices();
  Eigen::VectorXd dist = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  for (int s : sources) {
    if (s < 0 || s >= n) throw InvalidInput("source vertex " + std::to_string(s) + " out of range");
    dist[s] = 0.0;
    queue.emplace(0.0, s);
  }
  while (!queue.empty()) {
    auto [d, i] = queue.top();
    queue.pop();
    if (d > dist[i]) continue;
    for (int j : mesh.neighbors()[i]) {
      const double nd = d + (V.row(i) - V.row(j)).norm();
      if (nd < dist[j]) {
        dist[j] = nd;
        queue.emplace(nd, j);
      }
    }
  }
  return dist;
}

bool is_connected(const TriMesh& mesh) {
  std::vector<char> seen(mesh.num_vertices(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int visited = 1;
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    for (int j : mesh.neighbors()[i]) {
      if (!seen[j]) {
        seen[j] = 1;
        ++visited;
        stack.push_back(j);
      }
    }
  }
  return visited == mesh.num_vertices();
}

double intrinsic_diameter(const TriMesh& mesh) {
  Eigen::VectorXd d0 = graph_geodesics(mesh, 0);
  if (!d0.allFinite()) throw InvalidInput("intrinsic diameter needs a connected mesh");
  Eigen::Index far = 0;
  d0.maxCoeff(&far);
  Eigen::VectorXd d1 = graph_geodesics(mesh, static_cast<int>(far));
  return d1.maxCoeff();
}

Eigen::VectorXd face_areas(const TriMesh& mesh) {
  const auto& V = mesh.vertices();
  const auto& F = mesh.faces();
  Eigen::VectorXd areas(mesh.num_faces());
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Eigen::Vector3d e1 = V.row(F(f, 1)) - V.row(F(f, 0));
    const Eigen::Vector3d e2 = V.row(F(f, 2)) - V.row(F(f, 0));
    areas[f] = 0.5 * e1.cross(e2).norm();
  }
  return areas;
}

double surface_area(const TriMesh& mesh) { return face_areas(mesh).sum(); }

double surface_area(const TriMesh& mesh, const Eigen::VectorXd& binary_membership) {
  if (binary_membership.size() != mesh.num_vertices()) throw InvalidInput("membership length does not match mesh");
  const Eigen::VectorXd areas = face_areas(mesh);
  const auto& F = mesh.faces();
  double total = 0.0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    if (binary_membership[F(f, 0)] == 1.0 && binary_membership[F(f, 1)] == 1.0 &&
        binary_membership[F(f, 2)] == 1.0)
      total += areas[f];
  }
  return total;
}

Submesh extract_submesh(const TriMesh& mesh, const std::vector<bool>& keep_vertex) {
  if (keep_vertex.size() != static_cast<std::size_t>(mesh.num_vertices()))
    throw InvalidInput("vertex mask length does not match mesh");
  const auto& F = mesh.faces();
  std::vector<int> kept_faces;
  for (int f = 0; f < mesh.num_faces(); ++f)
    if (keep_vertex[F(f, 0)] && keep_vertex[F(f, 1)] && keep_vertex[F(f, 2)]) kept_faces.push_back(f);
  if (kept_faces.empty()) throw InvalidInput("region contains no complete triangle; submesh is empty");

  std::vector<char> used(mesh.num_vertices(), 0);
  for (int f : kept_faces)
    for (int c = 0; c < 3; ++c) used[F(f, c)] = 1;
  std::vector<int> to_sub(mesh.num_vertices(), -1);
  std::vector<int> to_parent;
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    if (used[i]) {
      to_sub[i] = static_cast<int>(to_parent.size());
      to_parent.push_back(i);
    }
  }
  Eigen::MatrixX3d V(to_parent.size(), 3);
  for (std::size_t i = 0; i < to_parent.size(); ++i) V.row(i) = mesh.vertices().row(to_parent[i]);
  Eigen::MatrixX3i SF(kept_faces.size(), 3);
  for (std::size_t f = 0; f < kept_faces.size(); ++f)
    for (int c = 0; c < 3; ++c) SF(f, c) = to_sub[F(kept_faces[f], c)];
  return Submesh{TriMesh(std::move(V), std::move(SF)), std::move(to_parent)};
}

}  // namespace lmh
