#include "msk/stream.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "msk/rng.hpp"

namespace msk {

namespace {

std::string turnstile_message(std::size_t position, const EdgeUpdate& upd) {
  std::ostringstream os;
  os << "strict turnstile violated at position " << position << ": edge (" << upd.u << ", "
     << upd.v << ") would go negative";
  return os.str();
}

std::string parse_message(std::size_t line, const std::string& what) {
  std::ostringstream os;
  os << "line " << line << ": " << what;
  return os.str();
}

}  // namespace

TurnstileError::TurnstileError(std::size_t position_in, const EdgeUpdate& offending_in)
    : std::runtime_error(turnstile_message(position_in, offending_in)),
      position(position_in),
      offending(offending_in) {}

ParseError::ParseError(std::size_t line_in, const std::string& what)
    : std::runtime_error(parse_message(line_in, what)), line(line_in) {}

std::uint64_t edge_key(const StreamSpec& s, std::uint64_t u, std::uint64_t v) {
  if (s.kind == GraphKind::kGeneral && u > v) std::swap(u, v);
  return u * s.n + v;
}

std::unordered_map<std::uint64_t, std::int64_t> validate(const StreamSpec& s) {
  std::unordered_map<std::uint64_t, std::int64_t> mult;
  for (std::size_t pos = 0; pos < s.updates.size(); ++pos) {
    const EdgeUpdate& upd = s.updates[pos];
    if (upd.u >= s.n || upd.v >= s.n)
      throw std::out_of_range("stream: endpoint out of range at position " + std::to_string(pos));
    std::int64_t& m = mult[edge_key(s, upd.u, upd.v)];
    m += upd.delta;
    if (m < 0) throw TurnstileError(pos, upd);
  }
  std::erase_if(mult, [](const auto& kv) { return kv.second == 0; });
  return mult;
}

PlantedStream gen_planted(std::uint64_t n, std::uint64_t opt, std::uint64_t noise_edges,
                          std::uint64_t churn, std::uint64_t seed) {
  if (opt > n) throw std::invalid_argument("gen_planted: opt exceeds n");
  Rng rng(seed);

  std::vector<std::uint64_t> lefts = rng.sample(n, opt);
  std::vector<std::uint64_t> rights = rng.sample(n, opt);
  std::vector<Edge> planted;
  planted.reserve(opt);
  std::unordered_set<std::uint64_t> taken;
  for (std::uint64_t i = 0; i < opt; ++i) {
    planted.emplace_back(lefts[i], rights[i]);
    taken.insert(lefts[i] * n + rights[i]);
  }

  std::vector<EdgeUpdate> inserts;
  for (const Edge& e : planted)
    inserts.push_back({e.first, e.second, +1});

  // Noise edges avoid planted pairs; repeats raise multiplicity up to 4.
  std::unordered_map<std::uint64_t, std::uint32_t> noise_mult;
  for (std::uint64_t i = 0; i < noise_edges; ++i) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      std::uint64_t u = rng.below(n), v = rng.below(n);
      std::uint64_t key = u * n + v;
      if (taken.count(key)) continue;
      std::uint32_t& m = noise_mult[key];
      if (m >= 4) continue;
      ++m;
      inserts.push_back({u, v, +1});
      break;
    }
  }

  std::vector<EdgeUpdate> churn_inserts;
  for (std::uint64_t i = 0; i < churn; ++i) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      std::uint64_t u = rng.below(n), v = rng.below(n);
      std::uint64_t key = u * n + v;
      if (taken.count(key) || noise_mult.count(key)) continue;
      churn_inserts.push_back({u, v, +1});
      taken.insert(key);  // one churn pass per edge keeps the bookkeeping exact
      break;
    }
  }

  rng.shuffle(inserts);
  std::vector<EdgeUpdate> updates = std::move(inserts);
  // Place each churn insert at a random slot and its delete strictly after.
  for (const EdgeUpdate& ins : churn_inserts) {
    std::size_t at = static_cast<std::size_t>(rng.below(updates.size() + 1));
    updates.insert(updates.begin() + static_cast<std::ptrdiff_t>(at), ins);
    std::size_t del = at + 1 + static_cast<std::size_t>(rng.below(updates.size() - at));
    updates.insert(updates.begin() + static_cast<std::ptrdiff_t>(del),
                   {ins.u, ins.v, -1});
  }

  PlantedStream out;
  out.stream = StreamSpec{n, GraphKind::kBipartite, std::move(updates)};
  out.planted = Matching(std::move(planted));
  return out;
}

std::string format_stream(const StreamSpec& s) {
  std::ostringstream os;
  os << "n " << s.n << " kind " << (s.kind == GraphKind::kBipartite ? "bipartite" : "general")
     << "\n";
  for (const EdgeUpdate& upd : s.updates)
    os << upd.u << " " << upd.v << " " << (upd.delta > 0 ? "+1" : "-1") << "\n";
  return os.str();
}

StreamSpec parse_stream(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(is, line)) throw ParseError(1, "missing header");
  ++line_no;
  std::istringstream header(line);
  std::string n_word, kind_word, kind_value;
  std::uint64_t n = 0;
  if (!(header >> n_word >> n >> kind_word >> kind_value) || n_word != "n" || kind_word != "kind")
    throw ParseError(line_no, "expected header 'n <n> kind <bipartite|general>'");
  GraphKind kind;
  if (kind_value == "bipartite") {
    kind = GraphKind::kBipartite;
  } else if (kind_value == "general") {
    kind = GraphKind::kGeneral;
  } else {
    throw ParseError(line_no, "unknown kind '" + kind_value + "'");
  }

  StreamSpec spec{n, kind, {}};
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::uint64_t u, v;
    std::string delta_word;
    if (!(row >> u >> v >> delta_word)) throw ParseError(line_no, "expected 'u v +1|-1'");
    std::string trailing;
    if (row >> trailing) throw ParseError(line_no, "trailing data '" + trailing + "'");
    std::int32_t delta;
    if (delta_word == "+1") {
      delta = 1;
    } else if (delta_word == "-1") {
      delta = -1;
    } else {
      throw ParseError(line_no, "delta must be +1 or -1, got '" + delta_word + "'");
    }
    if (u >= n || v >= n) throw ParseError(line_no, "endpoint out of range");
    spec.updates.push_back({u, v, delta});
  }
  return spec;
}

StreamSpec read_stream(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open stream file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_stream(buf.str());
}

void write_stream(const StreamSpec& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write stream file: " + path);
  out << format_stream(s);
}

}  // namespace msk
