#include "lapmap/map_io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

namespace lapmap {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<Rational> parse_list(std::string_view body, std::size_t line_no) {
  std::vector<Rational> out;
  while (true) {
    auto comma = body.find(',');
    auto item = trim(body.substr(0, comma));
    if (item.empty()) {
      throw ParseError("line " + std::to_string(line_no) + ": empty entry in list");
    }
    out.push_back(parse_rational(item));
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

RationalMap parse_map(std::string_view text) {
  std::optional<std::pair<Rational, Rational>> interval;
  std::optional<std::vector<Rational>> knots;
  std::optional<std::vector<Rational>> values;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    try {
      if (line.starts_with("interval")) {
        if (interval) throw ParseError("duplicate interval line");
        std::istringstream in{std::string(line.substr(8))};
        std::string a;
        std::string b;
        std::string extra;
        if (!(in >> a >> b) || (in >> extra)) {
          throw ParseError("expected 'interval <a> <b>'");
        }
        interval.emplace(parse_rational(a), parse_rational(b));
      } else if (line.starts_with("breakpoints:")) {
        if (knots) throw ParseError("duplicate breakpoints line");
        knots = parse_list(line.substr(12), line_no);
      } else if (line.starts_with("values:")) {
        if (values) throw ParseError("duplicate values line");
        values = parse_list(line.substr(7), line_no);
      } else {
        throw ParseError("unrecognised line '" + std::string(line) + "'");
      }
    } catch (const ParseError& e) {
      throw ParseError(where + e.what());
    }
  }
  if (!interval) throw ParseError("missing 'interval' line");
  if (!knots) throw ParseError("missing 'breakpoints:' line");
  if (!values) throw ParseError("missing 'values:' line");
  const auto& [a, b] = *interval;
  if (!(a < b)) throw InvariantError("interval", "need a < b");
  if (knots->front() != a || knots->back() != b) {
    throw InvariantError("endpoints", "first and last breakpoints must equal a and b");
  }
  return RationalMap(std::move(*knots), std::move(*values));
}

std::string format_map(const RationalMap& f, std::string_view comment) {
  std::string out;
  if (!comment.empty()) {
    out += "# ";
    out += comment;
    out += '\n';
  }
  out += "interval " + to_string(f.a()) + " " + to_string(f.b()) + "\n";
  auto join = [](std::span<const Rational> xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i > 0) s += ", ";
      s += to_string(xs[i]);
    }
    return s;
  };
  out += "breakpoints: " + join(f.knots()) + "\n";
  out += "values: " + join(f.values()) + "\n";
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RationalMap read_map_file(const std::filesystem::path& path) {
  try {
    return parse_map(read_text_file(path));
  } catch (const InvariantError& e) {
    throw InvariantError(e.invariant(), path.string() + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io", "cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out.flush()) throw Error("io", "short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("io", "cannot move output into '" + path.string() + "': " + ec.message());
  }
}

}  // namespace lapmap
