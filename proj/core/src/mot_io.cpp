#include "hoimtrack/mot_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hoimtrack/errors.hpp"
#include "text_format.hpp"

namespace hoimtrack {
namespace {

std::vector<std::string> split_fields(const std::string& text) {
  std::vector<std::string> fields;
  std::string current;
  for (char ch : text) {
    if (ch == ',') {
      fields.push_back(current);
      current.clear();
    } else if (ch != '\r') {
      current.push_back(ch);
    }
  }
  fields.push_back(current);
  for (auto& f : fields) {
    const auto begin = f.find_first_not_of(" \t");
    const auto end = f.find_last_not_of(" \t");
    f = begin == std::string::npos ? std::string() : f.substr(begin, end - begin + 1);
  }
  return fields;
}

std::string where(const std::string& source, std::size_t line_number) {
  return source + ":" + std::to_string(line_number) + ": ";
}

double to_double(const std::string& field, const std::string& context) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw InputError(context + "expected a number, got '" + field + "'");
  }
  return value;
}

int to_int(const std::string& field, const std::string& context) {
  const double value = to_double(field, context);
  if (value != std::floor(value) || std::abs(value) > 2e9) {
    throw InputError(context + "expected an integer, got '" + field + "'");
  }
  return static_cast<int>(value);
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

MotLine parse_mot_line(const std::string& text, std::size_t line_number) {
  const std::string context = "line " + std::to_string(line_number) + ": ";
  const auto fields = split_fields(text);
  if (fields.size() < 7 || fields.size() > 10) {
    throw InputError(context + "expected 7 to 10 comma-separated fields, got " +
                     std::to_string(fields.size()));
  }
  MotLine line;
  line.frame = to_int(fields[0], context);
  if (line.frame < 1) throw InputError(context + "frame must be >= 1");
  line.id = to_int(fields[1], context);
  line.left = to_double(fields[2], context);
  line.top = to_double(fields[3], context);
  line.width = to_double(fields[4], context);
  line.height = to_double(fields[5], context);
  if (!(line.width > 0.0 && line.height > 0.0)) {
    throw InputError(context + "box width and height must be positive");
  }
  line.conf = to_double(fields[6], context);
  if (fields.size() > 7) line.x = to_double(fields[7], context);
  if (fields.size() > 8) line.y = to_double(fields[8], context);
  if (fields.size() > 9) line.z = to_double(fields[9], context);
  return line;
}

std::string format_mot_line(const MotLine& l) {
  std::string out = std::to_string(l.frame) + "," + std::to_string(l.id);
  for (double v : {l.left, l.top, l.width, l.height, l.conf, l.x, l.y, l.z}) {
    out += ",";
    out += format_double(v);
  }
  return out;
}

std::vector<MotLine> read_mot_lines(std::istream& in, const std::string& source_name) {
  std::vector<MotLine> lines;
  std::string text;
  std::size_t number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (blank(text)) continue;
    try {
      lines.push_back(parse_mot_line(text, number));
    } catch (const InputError& e) {
      throw InputError(source_name + ": " + e.what());
    }
  }
  return lines;
}

std::vector<MotLine> read_mot_lines(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_mot_lines(in, path.string());
}

Sequence to_sequence(const std::vector<MotLine>& lines, Diagnostics* diagnostics) {
  Sequence seq;
  int max_frame = 0;
  for (const auto& l : lines) max_frame = std::max(max_frame, l.frame);
  seq.frames.resize(static_cast<std::size_t>(max_frame));
  for (const auto& l : lines) {
    seq.frames[static_cast<std::size_t>(l.frame - 1)].push_back(
        {l.id, {l.left, l.top, l.width, l.height}, l.conf});
  }
  for (auto& frame : seq.frames) {
    std::stable_sort(frame.begin(), frame.end(),
                     [](const LabeledBox& a, const LabeledBox& b) { return a.id < b.id; });
  }
  if (diagnostics) {
    std::size_t empty = 0;
    for (const auto& f : seq.frames) empty += f.empty() ? 1 : 0;
    if (empty > 0 && !lines.empty()) {
      diagnostics->warnings.push_back(std::to_string(empty) +
                                      " frame(s) without entries filled as empty frames");
    }
  }
  return seq;
}

std::vector<MotLine> to_lines(const Sequence& sequence) {
  std::vector<MotLine> lines;
  for (std::size_t f = 0; f < sequence.frames.size(); ++f) {
    for (const auto& obj : sequence.frames[f]) {
      MotLine l;
      l.frame = static_cast<int>(f) + 1;
      l.id = obj.id;
      l.left = obj.box.left;
      l.top = obj.box.top;
      l.width = obj.box.width;
      l.height = obj.box.height;
      l.conf = obj.confidence;
      lines.push_back(l);
    }
  }
  std::stable_sort(lines.begin(), lines.end(), [](const MotLine& a, const MotLine& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
  });
  return lines;
}

Sequence parse_mot(const std::filesystem::path& path, Diagnostics* diagnostics) {
  return to_sequence(read_mot_lines(path), diagnostics);
}

void write_mot(const Sequence& sequence, const std::filesystem::path& path) {
  auto out = open_output(path);
  for (const auto& l : to_lines(sequence)) out << format_mot_line(l) << '\n';
  if (!out) throw InputError("failed writing " + path.string());
}

std::vector<std::vector<Detection>> parse_detections(const std::filesystem::path& path,
                                                     Diagnostics* diagnostics) {
  const auto lines = read_mot_lines(path);
  int max_frame = 0;
  for (const auto& l : lines) max_frame = std::max(max_frame, l.frame);
  std::vector<std::vector<Detection>> frames(static_cast<std::size_t>(max_frame));
  for (const auto& l : lines) {
    Detection d;
    d.box = {l.left, l.top, l.width, l.height};
    d.confidence = l.conf;
    frames[static_cast<std::size_t>(l.frame - 1)].push_back(std::move(d));
  }
  if (diagnostics) {
    const auto empty = std::count_if(frames.begin(), frames.end(), [](const auto& f) { return f.empty(); });
    if (empty > 0) {
      diagnostics->warnings.push_back(std::to_string(empty) +
                                      " frame(s) without detections filled as empty frames");
    }
  }
  return frames;
}

void write_detections(const std::vector<std::vector<Detection>>& frames,
                      const std::filesystem::path& path) {
  auto out = open_output(path);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    for (const auto& d : frames[f]) {
      MotLine l;
      l.frame = static_cast<int>(f) + 1;
      l.id = -1;
      l.left = d.box.left;
      l.top = d.box.top;
      l.width = d.box.width;
      l.height = d.box.height;
      l.conf = d.confidence;
      out << format_mot_line(l) << '\n';
    }
  }
  if (!out) throw InputError("failed writing " + path.string());
}

EmbeddingTable parse_embeddings(std::istream& in, const std::string& source_name,
                                Diagnostics* diagnostics) {
  EmbeddingTable table;
  std::string text;
  std::size_t number = 0;
  bool have_header = false;
  std::size_t renormalized = 0;
  while (std::getline(in, text)) {
    ++number;
    if (blank(text)) continue;
    const std::string context = where(source_name, number);
    const auto fields = split_fields(text);
    if (!have_header) {
      if (fields.size() != 3 || fields[0] != "frame" || fields[1] != "det_index") {
        throw InputError(context + "expected header 'frame,det_index,<d>'");
      }
      const int dim = to_int(fields[2], context);
      if (dim < 1) throw InputError(context + "embedding dimension must be positive");
      table.dim = static_cast<std::size_t>(dim);
      have_header = true;
      continue;
    }
    if (fields.size() != table.dim + 2) {
      throw InputError(context + "expected " + std::to_string(table.dim) + " values, got " +
                       std::to_string(fields.size() < 2 ? 0 : fields.size() - 2));
    }
    const int frame = to_int(fields[0], context);
    const int det_index = to_int(fields[1], context);
    if (frame < 1 || det_index < 0) throw InputError(context + "bad frame or det_index");
    Eigen::VectorXd v(static_cast<Eigen::Index>(table.dim));
    for (std::size_t i = 0; i < table.dim; ++i) v(static_cast<Eigen::Index>(i)) = to_double(fields[i + 2], context);
    const double norm = v.norm();
    if (!(norm > 0.0)) throw InputError(context + "zero embedding");
    if (std::abs(norm - 1.0) > 1e-6) {
      v /= norm;
      ++renormalized;
    }
    if (!table.rows.emplace(std::make_pair(frame, det_index), std::move(v)).second) {
      throw InputError(context + "duplicate (frame, det_index)");
    }
  }
  if (!have_header && number > 0) throw InputError(source_name + ": missing header");
  if (renormalized > 0 && diagnostics) {
    diagnostics->warnings.push_back(source_name + ": renormalized " + std::to_string(renormalized) +
                                    " embedding(s) off unit norm");
  }
  return table;
}

EmbeddingTable parse_embeddings(const std::filesystem::path& path, Diagnostics* diagnostics) {
  auto in = open_input(path);
  return parse_embeddings(in, path.string(), diagnostics);
}

void write_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "frame,det_index," << table.dim << '\n';
  for (const auto& [key, v] : table.rows) {
    out << key.first << ',' << key.second;
    for (Eigen::Index i = 0; i < v.size(); ++i) out << ',' << format_double(v(i));
    out << '\n';
  }
  if (!out) throw InputError("failed writing " + path.string());
}

EmbeddingTable embeddings_of(const std::vector<std::vector<Detection>>& frames) {
  EmbeddingTable table;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    for (std::size_t i = 0; i < frames[f].size(); ++i) {
      const auto& e = frames[f][i].embedding;
      if (!e) continue;
      if (table.dim == 0) table.dim = static_cast<std::size_t>(e->size());
      if (static_cast<std::size_t>(e->size()) != table.dim) {
        throw InputError("detections carry embeddings of different dimensions");
      }
      table.rows.emplace(std::make_pair(static_cast<int>(f) + 1, static_cast<int>(i)), *e);
    }
  }
  return table;
}

void attach_embeddings(std::vector<std::vector<Detection>>& frames, const EmbeddingTable& table) {
  for (const auto& [key, v] : table.rows) {
    const auto f = static_cast<std::size_t>(key.first - 1);
    const auto i = static_cast<std::size_t>(key.second);
    if (f >= frames.size() || i >= frames[f].size()) {
      throw InputError("embedding for frame " + std::to_string(key.first) + " det_index " +
                       std::to_string(key.second) + " has no detection");
    }
    frames[f][i].embedding = v;
  }
}

}  // namespace hoimtrack
