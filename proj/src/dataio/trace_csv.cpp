#include "physaug/trace_csv.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

#include "physaug/errors.hpp"

namespace physaug::dataio {

namespace {

constexpr std::string_view kHeader = "t,ax,ay,az,gx,gy,gz";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

void put(std::string& out, double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view cell) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size()) return std::nullopt;
  return v;
}

struct Block {
  quatkin::SensorTrace trace;
  std::optional<double> rate;
  std::vector<double> times;
  bool header_seen = false;
  std::size_t header_line = 0;
};

quatkin::SensorTrace finish(Block& b) {
  if (b.rate) {
    b.trace.sample_rate_hz = *b.rate;
  } else if (b.times.size() >= 2 && b.times[1] > b.times[0]) {
    b.trace.sample_rate_hz = 1.0 / (b.times[1] - b.times[0]);
  } else {
    throw ParseError(b.header_line, "sample rate missing and cannot be inferred from the t column");
  }
  return std::move(b.trace);
}

}  // namespace

std::string traces_to_csv(std::span<const quatkin::SensorTrace> traces) {
  std::string out;
  for (const auto& tr : traces) {
    if (tr.gyro.size() != tr.accel.size()) throw LengthError("trace '" + tr.sensor_id + "' has mismatched accel/gyro");
    out += "# sensor_id=" + tr.sensor_id + "\n# sample_rate_hz=";
    put(out, tr.sample_rate_hz);
    out += '\n';
    out += kHeader;
    out += '\n';
    for (std::size_t t = 0; t < tr.frames(); ++t) {
      put(out, static_cast<double>(t) / tr.sample_rate_hz);
      for (const auto* v : {&tr.accel[t], &tr.gyro[t]}) {
        for (int axis = 0; axis < 3; ++axis) {
          out += ',';
          put(out, (*v)[axis]);
        }
      }
      out += '\n';
    }
  }
  return out;
}

std::vector<quatkin::SensorTrace> traces_from_csv(const std::string& text) {
  std::vector<quatkin::SensorTrace> out;
  std::optional<Block> cur;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  bool any_content = false;

  auto close = [&] {
    if (cur) {
      if (!cur->header_seen) throw ParseError(line_no, "sensor block without a header row");
      out.push_back(finish(*cur));
    }
    cur.reset();
  };

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    any_content = true;

    if (line.front() == '#') {
      const std::string_view body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) continue;
      const std::string_view key = trim(body.substr(0, eq));
      const std::string_view value = trim(body.substr(eq + 1));
      if (key == "sensor_id") {
        close();
        cur.emplace();
        cur->trace.sensor_id = std::string(value);
      } else if (key == "sample_rate_hz") {
        if (!cur) cur.emplace();
        const auto rate = parse_double(value);
        if (!rate || !(*rate > 0.0)) throw ParseError(line_no, "invalid sample_rate_hz");
        cur->rate = *rate;
      }
      continue;
    }

    if (line == kHeader) {
      if (cur && cur->header_seen) close();
      if (!cur) cur.emplace();
      cur->header_seen = true;
      cur->header_line = line_no;
      continue;
    }

    if (!cur || !cur->header_seen) throw ParseError(line_no, "data row before the header '" + std::string(kHeader) + "'");
    double cells[7];
    std::size_t n = 0;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      const std::string_view cell = rest.substr(0, comma);
      if (n == 7) throw ParseError(line_no, "expected 7 columns");
      const auto v = parse_double(cell);
      if (!v) throw ParseError(line_no, "non-numeric cell '" + std::string(trim(cell)) + "' in column " + std::to_string(n + 1));
      cells[n++] = *v;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (n != 7) throw ParseError(line_no, "expected 7 columns, found " + std::to_string(n));
    cur->times.push_back(cells[0]);
    cur->trace.accel.emplace_back(cells[1], cells[2], cells[3]);
    cur->trace.gyro.emplace_back(cells[4], cells[5], cells[6]);
  }
  if (!any_content) throw ParseError(1, "empty file");
  close();
  return out;
}

void write_trace_csv(std::span<const quatkin::SensorTrace> traces, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << traces_to_csv(traces);
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<quatkin::SensorTrace> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return traces_from_csv(ss.str());
}

std::vector<std::uint32_t> read_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint32_t> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::uint32_t v = 0;
    const auto res = std::from_chars(line.data(), line.data() + line.size(), v);
    if (res.ec != std::errc() || res.ptr != line.data() + line.size()) throw ParseError(line_no, "expected a class id");
    out.push_back(v);
  }
  return out;
}

}  // namespace physaug::dataio
