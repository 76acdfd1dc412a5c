#include "warpcap/manifold_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string_view>
#include <vector>

#include "warpcap/errors.hpp"

namespace warpcap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct TokenLine {
  int number = 0;
  std::vector<std::string> tokens;
};

std::vector<TokenLine> tokenize(const std::string& text) {
  std::vector<TokenLine> lines;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    TokenLine line{number, {}};
    std::string tok;
    while (ls >> tok) line.tokens.push_back(tok);
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

double parse_double(const std::string& tok, int line, const std::string& what) {
  std::string_view sv(tok);
  bool negative = false;
  if (!sv.empty() && (sv.front() == '+' || sv.front() == '-')) {
    negative = sv.front() == '-';
    sv.remove_prefix(1);
  }
  if (sv == "inf" || sv == "infinity") return negative ? -kInf : kInf;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw ParseError(what + ": expected a number, got '" + tok + "'", line);
  return value;
}

int parse_int(const std::string& tok, int line, const std::string& what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw ParseError(what + ": expected an integer, got '" + tok + "'", line);
  return value;
}

void need_tokens(const TokenLine& line, size_t count, const std::string& usage) {
  if (line.tokens.size() != count)
    throw ParseError("expected '" + usage + "'", line.number);
}

// 't:v' or 't:v:slope'
struct TabNode {
  double t = 0.0, v = 0.0;
  std::optional<double> slope;
};

TabNode parse_node(const std::string& tok, int line) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    size_t colon = tok.find(':', start);
    parts.push_back(tok.substr(start, colon - start));
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (parts.size() != 2 && parts.size() != 3)
    throw ParseError("tabulated node must be 't:value' or 't:value:slope', got '" + tok + "'",
                     line);
  TabNode node;
  node.t = parse_double(parts[0], line, "node abscissa");
  node.v = parse_double(parts[1], line, "node value");
  if (parts.size() == 3) node.slope = parse_double(parts[2], line, "node slope");
  return node;
}

Segment parse_segment(const TokenLine& line, int index) {
  const auto& t = line.tokens;
  const std::string& kind = t.at(1);
  auto seg_err = [&](const std::string& msg) {
    return ParseError("segment " + std::to_string(index) + ": " + msg, line.number);
  };
  try {
    if (kind == "power") {
      need_tokens(line, 6, "segment power <c> <e> <t_lo> <t_hi|inf>");
      return Segment::power(parse_double(t[2], line.number, "coefficient"),
                            parse_double(t[3], line.number, "exponent"),
                            parse_double(t[4], line.number, "t_lo"),
                            parse_double(t[5], line.number, "t_hi"));
    }
    if (kind == "exponential") {
      need_tokens(line, 6, "segment exponential <c> <rate> <t_lo> <t_hi|inf>");
      return Segment::exponential(parse_double(t[2], line.number, "coefficient"),
                                  parse_double(t[3], line.number, "rate"),
                                  parse_double(t[4], line.number, "t_lo"),
                                  parse_double(t[5], line.number, "t_hi"));
    }
    if (kind == "linear") {
      need_tokens(line, 5, "segment linear <slope> <t_lo> <t_hi|inf>");
      return Segment::linear(parse_double(t[2], line.number, "slope"),
                             parse_double(t[3], line.number, "t_lo"),
                             parse_double(t[4], line.number, "t_hi"));
    }
    if (kind == "constant") {
      need_tokens(line, 5, "segment constant <c> <t_lo> <t_hi|inf>");
      return Segment::constant(parse_double(t[2], line.number, "value"),
                               parse_double(t[3], line.number, "t_lo"),
                               parse_double(t[4], line.number, "t_hi"));
    }
    if (kind == "tabulated") {
      if (t.size() < 4)
        throw seg_err("tabulated needs at least two 't:value[:slope]' nodes");
      size_t last = t.size();
      std::optional<double> t_hi;
      if (t.back() == "inf") {
        t_hi = kInf;
        --last;
      }
      std::vector<double> ts, vs, slopes;
      size_t with_slope = 0;
      for (size_t i = 2; i < last; ++i) {
        TabNode node = parse_node(t[i], line.number);
        ts.push_back(node.t);
        vs.push_back(node.v);
        if (node.slope) {
          slopes.push_back(*node.slope);
          ++with_slope;
        }
      }
      if (with_slope != 0 && with_slope != ts.size())
        throw seg_err("either every tabulated node carries a slope or none does");
      std::optional<std::vector<double>> ms;
      if (with_slope != 0) ms = std::move(slopes);
      return Segment::tabulated(std::move(ts), std::move(vs), std::move(ms), t_hi);
    }
  } catch (const DomainError& e) {
    throw seg_err(e.what());
  }
  throw seg_err("unknown kind '" + kind +
                "' (expected power, exponential, linear, constant, or tabulated)");
}

TailModel parse_tail(const TokenLine& line) {
  const auto& t = line.tokens;
  const std::string& kind = t.at(1);
  if (kind == "power") {
    if (t.size() != 3 && t.size() != 4)
      throw ParseError("expected 'tail power <exponent> [valid_from]'", line.number);
    double from = t.size() == 4 ? parse_double(t[3], line.number, "valid_from") : 1.0;
    return TailModel::power_growth(parse_double(t[2], line.number, "exponent"), from);
  }
  if (kind == "exponential") {
    if (t.size() != 3 && t.size() != 4)
      throw ParseError("expected 'tail exponential <rate> [valid_from]'", line.number);
    double from = t.size() == 4 ? parse_double(t[3], line.number, "valid_from") : 1.0;
    return TailModel::exponential_rate(parse_double(t[2], line.number, "rate"), from);
  }
  if (kind == "oscillating") {
    need_tokens(line, 7, "tail oscillating <lo_c> <lo_e> <hi_c> <hi_e> <valid_from>");
    PowerEnvelope lower{parse_double(t[2], line.number, "lower coefficient"),
                        parse_double(t[3], line.number, "lower exponent")};
    PowerEnvelope upper{parse_double(t[4], line.number, "upper coefficient"),
                        parse_double(t[5], line.number, "upper exponent")};
    return TailModel::oscillating(lower, upper, parse_double(t[6], line.number, "valid_from"));
  }
  throw ParseError("unknown tail kind '" + kind +
                       "' (expected power, exponential, or oscillating)",
                   line.number);
}

void check_contiguous(const std::vector<Segment>& segs, const TokenLine& line) {
  const int index = static_cast<int>(segs.size());
  const Segment& cur = segs.back();
  if (index == 1) {
    if (cur.t_lo() != 0.0)
      throw ParseError("segment 1 must start at t = 0, starts at " + format_double(cur.t_lo()),
                       line.number);
    return;
  }
  const double prev_hi = segs[segs.size() - 2].t_hi();
  if (cur.t_lo() < prev_hi)
    throw ParseError("segment " + std::to_string(index) + " starts at " +
                         format_double(cur.t_lo()) + " and overlaps segment " +
                         std::to_string(index - 1) + " (which ends at " +
                         format_double(prev_hi) + ")",
                     line.number);
  if (cur.t_lo() > prev_hi)
    throw ParseError("gap before segment " + std::to_string(index) + ": segment " +
                         std::to_string(index - 1) + " ends at " + format_double(prev_hi) +
                         " but the next starts at " + format_double(cur.t_lo()),
                     line.number);
}

void render_segment(std::ostringstream& out, const Segment& s) {
  out << "segment ";
  switch (s.kind()) {
    case SegmentKind::power:
      out << "power " << format_double(s.coefficient()) << ' ' << format_double(s.exponent())
          << ' ' << format_double(s.t_lo()) << ' ' << format_double(s.t_hi());
      break;
    case SegmentKind::exponential:
      out << "exponential " << format_double(s.coefficient()) << ' '
          << format_double(s.exponent()) << ' ' << format_double(s.t_lo()) << ' '
          << format_double(s.t_hi());
      break;
    case SegmentKind::linear:
      out << "linear " << format_double(s.exponent()) << ' ' << format_double(s.t_lo()) << ' '
          << format_double(s.t_hi());
      break;
    case SegmentKind::constant:
      out << "constant " << format_double(s.coefficient()) << ' ' << format_double(s.t_lo())
          << ' ' << format_double(s.t_hi());
      break;
    case SegmentKind::tabulated: {
      out << "tabulated";
      const auto& ts = s.nodes();
      const auto& vs = s.node_values();
      const auto& ms = s.node_slopes();
      for (size_t i = 0; i < ts.size(); ++i)
        out << ' ' << format_double(ts[i]) << ':' << format_double(vs[i]) << ':'
            << format_double(ms[i]);
      if (std::isinf(s.t_hi())) out << " inf";
      break;
    }
  }
  out << '\n';
}

void render_tail(std::ostringstream& out, const TailModel& tail) {
  out << "tail ";
  switch (tail.kind) {
    case TailModel::Kind::power:
      out << "power " << format_double(tail.exponent) << ' ' << format_double(tail.valid_from);
      break;
    case TailModel::Kind::exponential:
      out << "exponential " << format_double(tail.rate) << ' '
          << format_double(tail.valid_from);
      break;
    case TailModel::Kind::oscillating:
      out << "oscillating " << format_double(tail.lower.coefficient) << ' '
          << format_double(tail.lower.exponent) << ' ' << format_double(tail.upper.coefficient)
          << ' ' << format_double(tail.upper.exponent) << ' '
          << format_double(tail.valid_from);
      break;
  }
  out << '\n';
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

ModelManifold parse_manifold(const std::string& text) {
  std::optional<int> dim;
  std::optional<double> base;
  std::optional<TailModel> tail;
  std::vector<Segment> segs;

  for (const TokenLine& line : tokenize(text)) {
    const std::string& kw = line.tokens.front();
    if (kw == "dim") {
      need_tokens(line, 2, "dim <m>");
      if (dim) throw ParseError("duplicate 'dim' directive", line.number);
      int m = parse_int(line.tokens[1], line.number, "dim");
      if (m < 2) throw ParseError("dim must be at least 2, got " + line.tokens[1], line.number);
      dim = m;
    } else if (kw == "base") {
      need_tokens(line, 2, "base <r0>");
      if (base) throw ParseError("duplicate 'base' directive", line.number);
      double r0 = parse_double(line.tokens[1], line.number, "base");
      if (!(r0 > 0.0) || !std::isfinite(r0))
        throw ParseError("base radius must be positive and finite", line.number);
      base = r0;
    } else if (kw == "segment") {
      if (line.tokens.size() < 2) throw ParseError("segment needs a kind", line.number);
      segs.push_back(parse_segment(line, static_cast<int>(segs.size()) + 1));
      check_contiguous(segs, line);
    } else if (kw == "tail") {
      if (line.tokens.size() < 2) throw ParseError("tail needs a kind", line.number);
      if (tail) throw ParseError("duplicate 'tail' directive", line.number);
      tail = parse_tail(line);
    } else {
      throw ParseError("unknown directive '" + kw +
                           "' (expected dim, base, segment, or tail)",
                       line.number);
    }
  }

  if (!dim) throw ParseError("missing 'dim <m>' directive");
  if (segs.empty()) throw ParseError("no segments: the profile must cover (0, inf)");
  if (!std::isinf(segs.back().t_hi()))
    throw ParseError("the last segment must extend to inf, ends at " +
                     format_double(segs.back().t_hi()));

  try {
    return ModelManifold{*dim, WarpingProfile(std::move(segs), std::move(tail)),
                         base.value_or(1.0)};
  } catch (const DomainError& e) {
    throw ParseError(std::string("profile rejected: ") + e.what());
  }
}

WarpingProfile parse_spec(const std::string& text) { return parse_manifold(text).h; }

std::string render_manifold(const ModelManifold& m) {
  std::ostringstream out;
  out << "dim " << m.dim << '\n';
  out << "base " << format_double(m.base_radius) << '\n';
  for (const Segment& s : m.h.piecewise().segments()) render_segment(out, s);
  if (const auto& tail = m.h.piecewise().declared_tail()) render_tail(out, *tail);
  return out.str();
}

ModelManifold load_manifold(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read manifold file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifold(buf.str());
}

}  // namespace warpcap
