#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "implorenz/section.hpp"

namespace implorenz::io {

/// Comma-separated output with round-trip precision for doubles.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  CsvWriter& operator<<(double x);
  CsvWriter& operator<<(long double x) { return *this << static_cast<double>(x); }
  CsvWriter& operator<<(long long x);
  CsvWriter& operator<<(std::size_t x) { return *this << static_cast<long long>(x); }
  CsvWriter& operator<<(int x) { return *this << static_cast<long long>(x); }
  CsvWriter& operator<<(const std::string& s);
  void end_row();
  void close();

 private:
  void sep();
  std::ofstream out_;
  std::filesystem::path path_;
  std::size_t columns_;
  std::size_t col_ = 0;
};

std::string format_double(double x);

/// Little-endian float64 triples (u, v, weight).
void write_points_binary(const std::filesystem::path& path, const std::vector<SectionPoint>& points,
                         const std::vector<double>& weights);
void read_points_binary(const std::filesystem::path& path, std::vector<SectionPoint>& points,
                        std::vector<double>& weights);

void write_text(const std::filesystem::path& path, const std::string& text);

/// Minimal SVG line/scatter plot.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string xlabel, std::string ylabel);

  void add_line(const std::vector<double>& x, const std::vector<double>& y, const std::string& label);
  void add_scatter(const std::vector<double>& x, const std::vector<double>& y, const std::string& label);
  std::string render(int width = 640, int height = 420) const;
  void save(const std::filesystem::path& path) const;

 private:
  struct Series {
    std::vector<double> x, y;
    std::string label;
    bool line;
  };
  std::string title_, xlabel_, ylabel_;
  std::vector<Series> series_;
};

}  // namespace implorenz::io
