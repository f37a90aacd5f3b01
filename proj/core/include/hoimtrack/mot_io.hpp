#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hoimtrack/metrics.hpp"
#include "hoimtrack/tracker.hpp"

namespace hoimtrack {

/// Non-fatal conditions found while reading files (gaps, renormalized
/// vectors). Callers decide where to print them.
struct Diagnostics {
  std::vector<std::string> warnings;
};

/// One MOTChallenge text row:
/// frame,id,bb_left,bb_top,bb_width,bb_height,conf,x,y,z
struct MotLine {
  int frame = 1;
  int id = -1;
  double left = 0.0;
  double top = 0.0;
  double width = 0.0;
  double height = 0.0;
  double conf = 1.0;
  double x = -1.0;
  double y = -1.0;
  double z = -1.0;

  bool operator==(const MotLine&) const = default;
};

/// Parses a single row. Seven to ten fields are accepted; absent trailing
/// placeholders read as -1.
MotLine parse_mot_line(const std::string& text, std::size_t line_number);
/// Canonical text of a row, shortest round-trip decimal for every number.
std::string format_mot_line(const MotLine& line);

std::vector<MotLine> read_mot_lines(std::istream& in, const std::string& source_name);
std::vector<MotLine> read_mot_lines(const std::filesystem::path& path);

/// Groups rows into contiguous frames starting at 1. Missing frames become
/// empty frames and are reported as a warning.
Sequence to_sequence(const std::vector<MotLine>& lines, Diagnostics* diagnostics = nullptr);
/// Rows of a sequence sorted by (frame, id).
std::vector<MotLine> to_lines(const Sequence& sequence);

Sequence parse_mot(const std::filesystem::path& path, Diagnostics* diagnostics = nullptr);
void write_mot(const Sequence& sequence, const std::filesystem::path& path);

/// Detection file: rows keep their file order within a frame; that order is
/// the det_index used by the embedding sidecar.
std::vector<std::vector<Detection>> parse_detections(const std::filesystem::path& path,
                                                     Diagnostics* diagnostics = nullptr);
void write_detections(const std::vector<std::vector<Detection>>& frames,
                      const std::filesystem::path& path);

/// Sidecar of per-detection embeddings keyed by (frame, det_index), with
/// det_index zero-based within the frame.
struct EmbeddingTable {
  std::size_t dim = 0;
  std::map<std::pair<int, int>, Eigen::VectorXd> rows;
};

/// Header "frame,det_index,d" with d the dimension, then one row per
/// detection. Vectors off unit norm by more than 1e-6 are renormalized with a
/// warning.
EmbeddingTable parse_embeddings(const std::filesystem::path& path,
                                Diagnostics* diagnostics = nullptr);
EmbeddingTable parse_embeddings(std::istream& in, const std::string& source_name,
                                Diagnostics* diagnostics = nullptr);
void write_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);

/// Sidecar rows for every detection that carries an embedding.
EmbeddingTable embeddings_of(const std::vector<std::vector<Detection>>& frames);
/// Copies sidecar embeddings onto the matching detections.
void attach_embeddings(std::vector<std::vector<Detection>>& frames, const EmbeddingTable& table);

}  // namespace hoimtrack
