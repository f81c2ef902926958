#include "hubrl/harness/logging.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string_view>

#include "hubrl/errors.hpp"

namespace hubrl::harness {

namespace {

constexpr const char* kHeader = "episode,steps,return,final_error,wall_seconds";

std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

double parse_double(const std::string& s, const std::string& path) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error("csv: malformed number '" + s + "' in " + path);
  }
}

}  // namespace

void log_csv(const std::vector<EpisodeRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("csv: cannot open for writing: " + path);
  out << kHeader << "\n";
  for (const auto& r : records) {
    out << r.episode << ',' << r.steps << ',' << fmt_g17(r.ret) << ','
        << (r.final_error ? fmt_g17(*r.final_error) : std::string()) << ','
        << fmt_g17(r.wall_seconds) << "\n";
  }
  if (!out) throw Error("csv: write failed: " + path);
}

std::vector<EpisodeRecord> parse_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("csv: cannot open: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kHeader)
    throw Error("csv: bad header in " + path);
  std::vector<EpisodeRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto parts = split(line, ',');
    if (parts.size() != 5) throw Error("csv: bad row in " + path);
    EpisodeRecord r;
    r.episode = static_cast<int>(parse_double(parts[0], path));
    r.steps = static_cast<int>(parse_double(parts[1], path));
    r.ret = parse_double(parts[2], path);
    if (!parts[3].empty()) r.final_error = parse_double(parts[3], path);
    r.wall_seconds = parse_double(parts[4], path);
    records.push_back(r);
  }
  return records;
}

namespace {

// trailing moving average, window 5
std::vector<double> smooth(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    acc += v[i];
    if (i >= 5) acc -= v[i - 5];
    out[i] = acc / static_cast<double>(std::min<std::size_t>(i + 1, 5));
  }
  return out;
}

struct Series {
  std::vector<double> mean, lo, hi;
};

Series aggregate(const std::vector<std::vector<double>>& runs) {
  std::size_t n = 0;
  for (const auto& r : runs) n = std::max(n, r.size());
  Series s;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0, lo = 0.0, hi = 0.0;
    int cnt = 0;
    for (const auto& r : runs) {
      if (i >= r.size()) continue;
      const double v = r[i];
      if (cnt == 0) {
        lo = hi = v;
      } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      acc += v;
      ++cnt;
    }
    s.mean.push_back(acc / cnt);
    s.lo.push_back(lo);
    s.hi.push_back(hi);
  }
  return s;
}

std::string poly_points(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.2f,%.2f ", xs[i], ys[i]);
    out += buf;
  }
  return out;
}

void write_svg(const std::string& path, const std::string& title, const Series& s, bool band) {
  const double w = 860, h = 500, ml = 72, mr = 24, mt = 36, mb = 52;
  const double pw = w - ml - mr, ph = h - mt - mb;
  const std::size_t n = s.mean.size();
  double ymin = s.lo[0], ymax = s.hi[0];
  for (std::size_t i = 0; i < n; ++i) {
    ymin = std::min(ymin, s.lo[i]);
    ymax = std::max(ymax, s.hi[i]);
  }
  if (ymax - ymin < 1e-12) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto px = [&](std::size_t i) {
    return n > 1 ? ml + pw * static_cast<double>(i) / static_cast<double>(n - 1) : ml + pw / 2;
  };
  auto py = [&](double v) { return mt + ph * (1.0 - (v - ymin) / (ymax - ymin)); };

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("plot: cannot open for writing: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << ml << "\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\">" << title
      << " (moving average, window 5)</text>\n";
  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
      << "\" stroke=\"#444\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
      << mt + ph << "\" stroke=\"#444\"/>\n";
  char buf[64];
  for (int t = 0; t <= 5; ++t) {
    const double v = ymin + (ymax - ymin) * t / 5.0;
    const double y = py(v);
    std::snprintf(buf, sizeof buf, "%.4g", v);
    out << "<line x1=\"" << ml - 4 << "\" y1=\"" << y << "\" x2=\"" << ml + pw << "\" y2=\"" << y
        << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" << buf
        << "</text>\n";
  }
  const int xticks = static_cast<int>(std::min<std::size_t>(n, 6));
  for (int t = 0; t < xticks; ++t) {
    const std::size_t i =
        xticks > 1 ? static_cast<std::size_t>(t) * (n - 1) / (xticks - 1) : 0;
    out << "<text x=\"" << px(i) << "\" y=\"" << mt + ph + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << i
        << "</text>\n";
  }
  out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << h - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">episode</text>\n";
  // min/max envelope then mean line
  if (band) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < n; ++i) {
      xs.push_back(px(i));
      ys.push_back(py(s.hi[i]));
    }
    for (std::size_t i = n; i-- > 0;) {
      xs.push_back(px(i));
      ys.push_back(py(s.lo[i]));
    }
    out << "<polygon points=\"" << poly_points(xs, ys)
        << "\" fill=\"#9ecae1\" fill-opacity=\"0.45\" stroke=\"none\"/>\n";
  }
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < n; ++i) {
    xs.push_back(px(i));
    ys.push_back(py(s.mean[i]));
  }
  out << "<polyline points=\"" << poly_points(xs, ys)
      << "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.8\"/>\n";
  out << "</svg>\n";
  if (!out) throw Error("plot: write failed: " + path);
}

}  // namespace

std::vector<std::string> plot(const std::vector<std::string>& run_dirs,
                              const std::string& out_dir) {
  std::vector<std::vector<EpisodeRecord>> runs;
  for (const auto& dir : run_dirs) {
    const std::string csv = dir + "/train.csv";
    if (!std::filesystem::exists(csv)) continue;
    runs.push_back(parse_csv(csv));
  }
  if (runs.empty()) throw MissingLogsError("plot: no run directory contains train.csv");
  std::filesystem::create_directories(out_dir);

  std::vector<std::string> written;
  for (const char* metric : {"return", "steps", "final_error"}) {
    std::vector<std::vector<double>> series;
    for (const auto& run : runs) {
      std::vector<double> vals;
      for (const auto& r : run) {
        if (std::string_view(metric) == "return") {
          vals.push_back(r.ret);
        } else if (std::string_view(metric) == "steps") {
          vals.push_back(r.steps);
        } else if (r.final_error) {
          vals.push_back(*r.final_error);
        }
      }
      if (!vals.empty()) series.push_back(smooth(vals));
    }
    if (series.empty()) continue;  // final_error absent everywhere
    const std::string path = out_dir + "/" + metric + ".svg";
    write_svg(path, metric, aggregate(series), series.size() > 1);
    written.push_back(path);
  }
  return written;
}

}  // namespace hubrl::harness
