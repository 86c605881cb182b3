#include "orl/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace orl {

namespace {

constexpr const char* kModelMagic = "orl-model";
constexpr const char* kDatasetMagic = "orl-dataset";
constexpr const char* kVersion = "v1";

void write_params(std::ostream& os, const std::string& label,
                  const std::vector<double>& params) {
  os << label << ' ' << params.size() << '\n';
  for (std::size_t i = 0; i < params.size(); ++i)
    os << fmt_double(params[i]) << ((i + 1) % 8 == 0 ? '\n' : ' ');
  if (params.size() % 8 != 0) os << '\n';
}

class TokenReader {
 public:
  TokenReader(const std::string& path, std::istream& is)
      : path_(path), is_(is) {}

  std::string next() {
    std::string tok;
    if (!(is_ >> tok))
      throw std::runtime_error(path_ + ": truncated file at byte offset " +
                               std::to_string(static_cast<long>(is_.tellg())));
    return tok;
  }

  void expect(const std::string& want) {
    const std::string got = next();
    if (got != want)
      throw std::runtime_error(path_ + ": expected '" + want + "', got '" +
                               got + "'");
  }

  long next_long() { return std::stol(next()); }
  double next_double() { return std::strtod(next().c_str(), nullptr); }

 private:
  std::string path_;
  std::istream& is_;
};

void read_params(TokenReader& r, const std::string& label,
                 std::vector<double>& out) {
  r.expect(label);
  const long n = r.next_long();
  out.resize(n);
  for (long i = 0; i < n; ++i) out[i] = r.next_double();
}

void check_header(TokenReader& r, const std::string& magic,
                  const std::string& path) {
  r.expect(magic);
  const std::string version = r.next();
  if (version != kVersion)
    throw std::runtime_error(path + ": incompatible format version '" +
                             version + "' (reader supports " + kVersion + ")");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write file: " + path);
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open file: " + path);
  return is;
}

void write_mlp(std::ostream& os, const std::string& prefix, const Mlp& net) {
  os << prefix << "_layers";
  for (int s : net.sizes()) os << ' ' << s;
  os << '\n'
     << prefix << "_squash " << (net.squash_output() ? 1 : 0) << '\n'
     << prefix << "_scale " << fmt_double(net.output_scale()) << '\n';
  write_params(os, prefix + "_params", net.params());
}

Mlp read_mlp(TokenReader& r, const std::string& prefix, int n_layers_hint) {
  r.expect(prefix + "_layers");
  std::vector<int> sizes;
  for (int i = 0; i < n_layers_hint; ++i)
    sizes.push_back(static_cast<int>(r.next_long()));
  r.expect(prefix + "_squash");
  const bool squash = r.next_long() != 0;
  r.expect(prefix + "_scale");
  const double scale = r.next_double();
  Mlp net(sizes, squash, scale);
  std::vector<double> params;
  read_params(r, prefix + "_params", params);
  if (params.size() != net.params().size())
    throw std::runtime_error("model file: parameter count mismatch");
  net.params() = params;
  return net;
}

}  // namespace

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void save_model(const DiscreteQ& q, const std::string& env_id,
                const std::string& path) {
  std::ofstream os = open_out(path);
  os << kModelMagic << ' ' << kVersion << '\n';
  os << "env_id " << env_id << '\n';
  if (q.kind == DiscreteQ::Kind::Tabular) {
    os << "kind tabular-q\n";
    os << "states " << q.n_states << "\nactions " << q.n_actions << '\n';
    write_params(os, "params", q.table.values);
  } else {
    os << "kind mlp-q\n";
    os << "states " << q.n_states << "\nactions " << q.n_actions << '\n';
    os << "n_layers " << q.net.sizes().size() << '\n';
    write_mlp(os, "q", q.net);
  }
}

void save_model(const ActorCritic& ac, const std::string& env_id,
                const std::string& path) {
  std::ofstream os = open_out(path);
  os << kModelMagic << ' ' << kVersion << '\n';
  os << "env_id " << env_id << '\n';
  os << "kind actor-critic\n";
  os << "actor_n_layers " << ac.actor.sizes().size() << '\n';
  write_mlp(os, "actor", ac.actor);
  os << "critic_n_layers " << ac.critic.sizes().size() << '\n';
  write_mlp(os, "critic", ac.critic);
}

StoredModel load_model(const std::string& path) {
  std::ifstream is = open_in(path);
  TokenReader r(path, is);
  check_header(r, kModelMagic, path);
  StoredModel m;
  r.expect("env_id");
  m.env_id = r.next();
  r.expect("kind");
  const std::string kind = r.next();
  if (kind == "tabular-q") {
    r.expect("states");
    const int s = static_cast<int>(r.next_long());
    r.expect("actions");
    const int a = static_cast<int>(r.next_long());
    m.q = DiscreteQ::tabular(s, a);
    std::vector<double> params;
    read_params(r, "params", params);
    if (params.size() != m.q.params().size())
      throw std::runtime_error(path + ": parameter count mismatch");
    m.q.params() = params;
  } else if (kind == "mlp-q") {
    r.expect("states");
    const int s = static_cast<int>(r.next_long());
    r.expect("actions");
    const int a = static_cast<int>(r.next_long());
    r.expect("n_layers");
    const int nl = static_cast<int>(r.next_long());
    m.q.kind = DiscreteQ::Kind::Net;
    m.q.n_states = s;
    m.q.n_actions = a;
    m.q.net = read_mlp(r, "q", nl);
  } else if (kind == "actor-critic") {
    m.discrete = false;
    r.expect("actor_n_layers");
    const int anl = static_cast<int>(r.next_long());
    m.ac.actor = read_mlp(r, "actor", anl);
    r.expect("critic_n_layers");
    const int cnl = static_cast<int>(r.next_long());
    m.ac.critic = read_mlp(r, "critic", cnl);
  } else {
    throw std::runtime_error(path + ": unknown model kind '" + kind + "'");
  }
  return m;
}

void save_dataset(const Dataset& data, const std::string& path) {
  std::ofstream os = open_out(path);
  os << kDatasetMagic << ' ' << kVersion << '\n';
  os << "env_id " << data.env_id << '\n';
  os << "epsilon " << fmt_double(data.epsilon) << '\n';
  os << "seed " << data.seed << '\n';
  const std::size_t sdim =
      data.transitions.empty() ? 1 : data.transitions.front().s.size();
  const std::size_t adim =
      data.transitions.empty() ? 1 : data.transitions.front().a.size();
  os << "sdim " << sdim << "\nadim " << adim << '\n';
  os << "count " << data.transitions.size() << '\n';
  for (const Transition& tr : data.transitions) {
    for (double v : tr.s) os << fmt_double(v) << ' ';
    for (double v : tr.a) os << fmt_double(v) << ' ';
    os << fmt_double(tr.r) << ' ';
    for (double v : tr.sp) os << fmt_double(v) << ' ';
    os << (tr.done ? 1 : 0) << '\n';
  }
}

Dataset load_dataset(const std::string& path) {
  std::ifstream is = open_in(path);
  TokenReader r(path, is);
  check_header(r, kDatasetMagic, path);
  Dataset data;
  r.expect("env_id");
  data.env_id = r.next();
  r.expect("epsilon");
  data.epsilon = r.next_double();
  r.expect("seed");
  data.seed = static_cast<std::uint64_t>(std::stoull(r.next()));
  r.expect("sdim");
  const long sdim = r.next_long();
  r.expect("adim");
  const long adim = r.next_long();
  r.expect("count");
  const long count = r.next_long();
  data.transitions.resize(count);
  for (long i = 0; i < count; ++i) {
    Transition& tr = data.transitions[i];
    tr.s.resize(sdim);
    for (long j = 0; j < sdim; ++j) tr.s[j] = r.next_double();
    tr.a.resize(adim);
    for (long j = 0; j < adim; ++j) tr.a[j] = r.next_double();
    tr.r = r.next_double();
    tr.sp.resize(sdim);
    for (long j = 0; j < sdim; ++j) tr.sp[j] = r.next_double();
    tr.done = r.next_long() != 0;
  }
  return data;
}

Config parse_config_text(const std::string& text) {
  Config cfg;
  std::istringstream is(text);
  std::string line;
  long lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      bool blank = true;
      for (char c : line)
        if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
      if (blank) continue;
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected 'key = value'");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": empty key");
    cfg[key] = value;
  }
  return cfg;
}

Config parse_config(const std::string& path) {
  std::ifstream is = open_in(path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

std::string config_get(const Config& cfg, const std::string& key,
                       const std::string& fallback) {
  const auto it = cfg.find(key);
  return it == cfg.end() ? fallback : it->second;
}

double config_get_double(const Config& cfg, const std::string& key,
                         double fallback) {
  const auto it = cfg.find(key);
  return it == cfg.end() ? fallback : std::strtod(it->second.c_str(), nullptr);
}

long config_get_long(const Config& cfg, const std::string& key, long fallback) {
  const auto it = cfg.find(key);
  return it == cfg.end() ? fallback : std::stol(it->second);
}

std::uint64_t config_hash(const Config& cfg) {
  std::string blob;
  for (const auto& [k, v] : cfg) {
    blob += k;
    blob += '=';
    blob += v;
    blob += '\n';
  }
  return fnv1a64(blob);
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& header)
    : path_(path), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += header[i];
  }
  buffer_ += '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_)
    throw std::invalid_argument("CsvWriter: column count mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += cells[i];
  }
  buffer_ += '\n';
}

void CsvWriter::close() {
  if (closed_) return;
  closed_ = true;
  std::ofstream os = open_out(path_);
  os << buffer_;
}

CsvWriter::~CsvWriter() {
  try {
    close();
  } catch (...) {
  }
}

CsvFile read_csv(const std::string& path) {
  std::ifstream is = open_in(path);
  CsvFile out;
  std::string line;
  bool first = true;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : s) {
      if (c == ',') {
        cells.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur += c;
      }
    }
    cells.push_back(cur);
    return cells;
  };
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (first) {
      out.header = split(line);
      first = false;
    } else {
      out.rows.push_back(split(line));
    }
  }
  if (first) throw std::runtime_error(path + ": empty CSV");
  return out;
}

std::uint64_t file_fnv64(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return fnv1a64(ss.str());
}

void RunManifest::save(const std::string& path) const {
  std::ofstream os = open_out(path);
  os << "orl-manifest v1\n";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(config_hash));
  os << "config_hash " << buf << '\n';
  for (const auto& [stage, seed] : stage_seeds)
    os << "stage " << stage << " seed " << seed << '\n';
  for (const auto& [file, sum] : file_checksums) {
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(sum));
    os << "file " << file << " fnv64 " << buf << '\n';
  }
}

}  // namespace orl
