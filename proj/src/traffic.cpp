#include "vinecop/traffic.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "csv.hpp"
#include "parallel.hpp"
#include "vinecop/error.hpp"

namespace vinecop {

namespace fs = std::filesystem;

namespace {

constexpr std::array<std::pair<VehicleClass, std::string_view>, 8> kClasses{{
    {VehicleClass::Car, "car"},
    {VehicleClass::Truck, "truck"},
    {VehicleClass::Van, "van"},
    {VehicleClass::Trailer, "trailer"},
    {VehicleClass::Bus, "bus"},
    {VehicleClass::Pedestrian, "pedestrian"},
    {VehicleClass::Bicycle, "bicycle"},
    {VehicleClass::Motorcycle, "motorcycle"},
}};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::ptrdiff_t find_column(const std::vector<std::string>& header,
                           std::initializer_list<std::string_view> aliases) {
  for (const auto alias : aliases) {
    const auto it = std::find(header.begin(), header.end(), alias);
    if (it != header.end()) return it - header.begin();
  }
  return -1;
}

std::ptrdiff_t require_column(const std::vector<std::string>& header, const std::string& source,
                              std::initializer_list<std::string_view> aliases) {
  const auto j = find_column(header, aliases);
  if (j < 0) {
    std::string names;
    for (const auto alias : aliases) names += (names.empty() ? "'" : " or '") + std::string(alias) + "'";
    throw ParseError(source + ": missing column " + names);
  }
  return j;
}

long long parse_integer(const std::string& field, const std::string& source, std::size_t line,
                        const std::string& column) {
  const double v = detail::parse_double(field, source, line, column);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) {
    throw ParseError(source + ":" + std::to_string(line) + ": column '" + column +
                     "': expected an integer, got '" + field + "'");
  }
  return static_cast<long long>(v);
}

bool in_set(const std::vector<VehicleClass>& set, VehicleClass c) {
  return std::find(set.begin(), set.end(), c) != set.end();
}

std::map<long long, VehicleClass> read_meta(std::istream& in, const std::string& source) {
  detail::CsvReader reader(in, source);
  std::vector<std::string> header, fields;
  std::map<long long, VehicleClass> out;
  if (!reader.next(header)) return out;
  const auto jt = require_column(header, source, {"trackId"});
  const auto jc = require_column(header, source, {"class"});
  while (reader.next(fields)) {
    if (fields.size() != header.size()) {
      throw ParseError(source + ":" + std::to_string(reader.line()) + ": expected " +
                       std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
    }
    try {
      out[parse_integer(fields[jt], source, reader.line(), "trackId")] = class_from_name(fields[jc]);
    } catch (const ParseError& e) {
      throw ParseError(source + ":" + std::to_string(reader.line()) + ": " + e.what());
    }
  }
  return out;
}

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

// Numeric ids compare as numbers and sort before other ids.
bool recording_less(const std::string& a, const std::string& b) {
  const bool na = all_digits(a), nb = all_digits(b);
  if (na != nb) return na;
  if (na) {
    const auto strip = [](const std::string& s) {
      const auto p = s.find_first_not_of('0');
      return p == std::string::npos ? std::string() : s.substr(p);
    };
    const std::string sa = strip(a), sb = strip(b);
    if (sa.size() != sb.size()) return sa.size() < sb.size();
    if (sa != sb) return sa < sb;
  }
  return a < b;
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::string_view class_name(VehicleClass c) {
  for (const auto& [cls, name] : kClasses)
    if (cls == c) return name;
  return "?";
}

VehicleClass class_from_name(std::string_view name) {
  const std::string key = lower(name);
  for (const auto& [cls, n] : kClasses)
    if (n == key) return cls;
  if (key == "truck_bus") return VehicleClass::Truck;
  throw ParseError("unknown vehicle class '" + std::string(name) + "'");
}

std::vector<VehicleClass> motorized_classes() {
  return {VehicleClass::Car, VehicleClass::Truck,   VehicleClass::Van,
          VehicleClass::Bus, VehicleClass::Trailer, VehicleClass::Motorcycle};
}

Recording read_recording(std::istream& tracks, const std::string& source, std::istream* meta,
                         const std::string& fallback_id, double fps) {
  Recording rec;
  rec.id = fallback_id;
  detail::CsvReader reader(tracks, source);
  std::vector<std::string> header, fields;
  if (!reader.next(header)) return rec;

  const auto jt = require_column(header, source, {"trackId"});
  const auto jf = require_column(header, source, {"frame"});
  const auto jx = require_column(header, source, {"x", "xCenter"});
  const auto jy = require_column(header, source, {"y", "yCenter"});
  const auto jvx = find_column(header, {"vx", "xVelocity"});
  const auto jvy = find_column(header, {"vy", "yVelocity"});
  const auto jc = find_column(header, {"class"});
  const auto jr = find_column(header, {"recordingId"});
  const bool has_velocity = jvx >= 0 && jvy >= 0;

  std::map<long long, VehicleClass> classes;
  if (meta) classes = read_meta(*meta, source + " (meta)");

  std::map<long long, Track> by_id;
  bool have_rec_id = false;
  while (reader.next(fields)) {
    const std::size_t line = reader.line();
    if (fields.size() != header.size()) {
      throw ParseError(source + ":" + std::to_string(line) + ": expected " +
                       std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
    }
    if (jr >= 0) {
      if (!have_rec_id) {
        rec.id = fields[jr];
        have_rec_id = true;
      } else if (fields[jr] != rec.id) {
        throw ParseError(source + ":" + std::to_string(line) + ": more than one recordingId in one file");
      }
    }
    const long long id = parse_integer(fields[jt], source, line, header[jt]);
    TrajectoryRecord r;
    r.frame = parse_integer(fields[jf], source, line, header[jf]);
    r.x = detail::parse_double(fields[jx], source, line, header[jx]);
    r.y = detail::parse_double(fields[jy], source, line, header[jy]);
    if (has_velocity) {
      r.speed = std::hypot(detail::parse_double(fields[jvx], source, line, header[jvx]),
                           detail::parse_double(fields[jvy], source, line, header[jvy]));
    }
    auto [it, fresh] = by_id.try_emplace(id);
    Track& track = it->second;
    if (fresh) {
      track.id = id;
      if (jc >= 0) {
        try {
          track.cls = class_from_name(fields[jc]);
        } catch (const ParseError& e) {
          throw ParseError(source + ":" + std::to_string(line) + ": " + e.what());
        }
      }
    } else if (track.records.back().frame >= r.frame) {
      throw ParseError(source + ":" + std::to_string(line) + ": track " + std::to_string(id) +
                       ": frame " + std::to_string(r.frame) + " does not follow frame " +
                       std::to_string(track.records.back().frame));
    }
    track.records.push_back(r);
  }

  for (auto& [id, track] : by_id) {
    if (const auto it = classes.find(id); it != classes.end() && jc < 0) track.cls = it->second;
    auto& rs = track.records;
    if (!has_velocity && rs.size() > 1) {
      for (std::size_t i = 0; i < rs.size(); ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i + 1 == rs.size() ? i : i + 1;
        const double dt = static_cast<double>(rs[hi].frame - rs[lo].frame) / fps;
        rs[i].speed = std::hypot(rs[hi].x - rs[lo].x, rs[hi].y - rs[lo].y) / dt;
      }
    }
    rec.tracks.push_back(std::move(track));
  }
  return rec;
}

Recording load_recording(const std::string& path, const std::string& fallback_id, double fps) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::unique_ptr<std::ifstream> meta;
  if (ends_with(path, "_tracks.csv")) {
    const std::string meta_path = path.substr(0, path.size() - 4) + "Meta.csv";
    if (fs::exists(meta_path)) {
      meta = std::make_unique<std::ifstream>(meta_path);
      if (!*meta) throw Error(ErrorCode::Io, "cannot open '" + meta_path + "'");
    }
  }
  return read_recording(in, path, meta.get(), fallback_id, fps);
}

std::vector<int> traffic_density(const std::vector<FrameObject>& frame, double radius,
                                 const std::vector<VehicleClass>& counted) {
  std::vector<int> out(frame.size(), 0);
  for (std::size_t i = 0; i < frame.size(); ++i) {
    for (std::size_t j = 0; j < frame.size(); ++j) {
      if (i == j || !in_set(counted, frame[j].cls)) continue;
      if (std::hypot(frame[i].x - frame[j].x, frame[i].y - frame[j].y) <= radius) ++out[i];
    }
  }
  return out;
}

std::vector<double> min_distance(const std::vector<FrameObject>& frame,
                                 const std::vector<VehicleClass>& counted) {
  std::vector<double> out(frame.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < frame.size(); ++i) {
    for (std::size_t j = 0; j < frame.size(); ++j) {
      if (i == j || !in_set(counted, frame[j].cls)) continue;
      const double dist = std::hypot(frame[i].x - frame[j].x, frame[i].y - frame[j].y);
      if (std::isnan(out[i]) || dist < out[i]) out[i] = dist;
    }
  }
  return out;
}

std::vector<double> wait_time(const Track& track, const Geometry& geometry,
                              const StandstillRule& rule, double fps, WaitTimeMode mode) {
  const auto& rs = track.records;
  const std::size_t n = rs.size();
  std::vector<char> still(n, 0);
  for (std::size_t i = 0; i < n;) {
    if (!(rs[i].speed < rule.speed)) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < n && rs[j].speed < rule.speed && rs[j].frame == rs[j - 1].frame + 1) ++j;
    if (j - i >= static_cast<std::size_t>(std::max(rule.min_frames, 1)))
      std::fill(still.begin() + static_cast<std::ptrdiff_t>(i), still.begin() + static_cast<std::ptrdiff_t>(j), 1);
    i = j;
  }
  std::size_t last_inside = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::hypot(rs[i].x - geometry.center_x, rs[i].y - geometry.center_y) <= geometry.entry_radius)
      last_inside = i;
  }
  const std::size_t window = last_inside == n ? n : last_inside + 1;

  std::vector<double> out(n, 0.0);
  long long count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < window && still[i]) ++count;
    out[i] = static_cast<double>(count) / fps;
  }
  if (mode == WaitTimeMode::Total) std::fill(out.begin(), out.end(), static_cast<double>(count) / fps);
  return out;
}

ExtractConfig parse_config(std::string_view json_text, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text.begin(), json_text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Config, source + ": invalid JSON: " + e.what());
  }
  auto fail = [&](const std::string& why) -> void { throw Error(ErrorCode::Config, source + ": " + why); };
  if (!j.is_object()) fail("expected a JSON object");
  ExtractConfig cfg;
  const auto center = j.find("center");
  if (center == j.end() || !center->is_array() || center->size() != 2 || !(*center)[0].is_number() ||
      !(*center)[1].is_number()) {
    fail("\"center\" must be an array [x, y]");
  }
  cfg.geometry.center_x = (*center)[0].get<double>();
  cfg.geometry.center_y = (*center)[1].get<double>();
  const auto entry = j.find("entryRadius");
  if (entry == j.end() || !entry->is_number() || !(entry->get<double>() > 0.0))
    fail("\"entryRadius\" must be a positive number");
  cfg.geometry.entry_radius = entry->get<double>();
  auto positive = [&](const char* key, double& target) {
    const auto it = j.find(key);
    if (it == j.end()) return;
    if (!it->is_number() || !(it->get<double>() > 0.0)) fail(std::string("\"") + key + "\" must be a positive number");
    target = it->get<double>();
  };
  positive("radius", cfg.radius);
  positive("standstillSpeed", cfg.standstill.speed);
  positive("fps", cfg.fps);
  if (const auto it = j.find("standstillFrames"); it != j.end()) {
    if (!it->is_number_integer() || it->get<int>() < 1) fail("\"standstillFrames\" must be a positive integer");
    cfg.standstill.min_frames = it->get<int>();
  }
  if (const auto it = j.find("vehicleClasses"); it != j.end()) {
    if (!it->is_array()) fail("\"vehicleClasses\" must be an array of class names");
    cfg.counted.clear();
    for (const auto& c : *it) {
      if (!c.is_string()) fail("\"vehicleClasses\" must be an array of class names");
      try {
        cfg.counted.push_back(class_from_name(c.get<std::string>()));
      } catch (const ParseError& e) {
        fail(e.what());
      }
    }
  }
  return cfg;
}

ExtractConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Config, "geometry config '" + path + "' not found");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::vector<ParameterSample> extract_recording(const Recording& rec, const ExtractConfig& config) {
  struct Ref {
    std::size_t track;
    std::size_t record;
  };
  std::map<long long, std::vector<Ref>> frames;
  std::vector<std::vector<int>> density(rec.tracks.size());
  std::vector<std::vector<double>> dist(rec.tracks.size());
  for (std::size_t t = 0; t < rec.tracks.size(); ++t) {
    const auto& rs = rec.tracks[t].records;
    density[t].assign(rs.size(), 0);
    dist[t].assign(rs.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t r = 0; r < rs.size(); ++r) frames[rs[r].frame].push_back({t, r});
  }
  std::vector<FrameObject> objects;
  for (const auto& [frame, refs] : frames) {
    objects.clear();
    for (const auto& ref : refs) {
      const auto& r = rec.tracks[ref.track].records[ref.record];
      objects.push_back({r.x, r.y, rec.tracks[ref.track].cls});
    }
    const auto dens = traffic_density(objects, config.radius, config.counted);
    const auto md = min_distance(objects, config.counted);
    for (std::size_t i = 0; i < refs.size(); ++i) {
      density[refs[i].track][refs[i].record] = dens[i];
      dist[refs[i].track][refs[i].record] = md[i];
    }
  }

  std::vector<ParameterSample> out;
  for (std::size_t t = 0; t < rec.tracks.size(); ++t) {
    const Track& track = rec.tracks[t];
    if (!in_set(config.subjects, track.cls)) continue;
    const auto wait = wait_time(track, config.geometry, config.standstill, config.fps, config.wait_mode);
    for (std::size_t r = 0; r < track.records.size(); ++r) {
      if (std::isnan(dist[t][r])) continue;
      out.push_back({rec.id, track.id, track.records[r].frame, track.records[r].speed, density[t][r],
                     wait[r], dist[t][r]});
    }
  }
  return out;
}

ExtractResult extract(const std::vector<std::string>& inputs, const ExtractConfig& config) {
  ExtractResult result;
  std::vector<std::string> paths;
  for (const auto& input : inputs) {
    std::error_code ec;
    if (fs::is_directory(input, ec)) {
      std::vector<std::string> tracks, csvs;
      for (const auto& entry : fs::directory_iterator(input)) {
        if (!entry.is_regular_file()) continue;
        const std::string p = entry.path().string();
        if (ends_with(p, "_tracks.csv")) tracks.push_back(p);
        if (ends_with(p, ".csv") && !ends_with(p, "Meta.csv")) csvs.push_back(p);
      }
      const auto& chosen = tracks.empty() ? csvs : tracks;
      paths.insert(paths.end(), chosen.begin(), chosen.end());
    } else if (fs::exists(input, ec)) {
      paths.push_back(input);
    } else {
      result.errors.push_back(input + ": no such file or directory");
    }
  }
  std::sort(paths.begin(), paths.end());
  paths.erase(std::unique(paths.begin(), paths.end()), paths.end());

  std::vector<std::vector<ParameterSample>> per(paths.size());
  std::vector<std::string> errors(paths.size());
  detail::parallel_for(paths.size(), config.threads, [&](std::size_t i) {
    const std::string stem = fs::path(paths[i]).filename().string();
    std::size_t digits = 0;
    while (digits < stem.size() && std::isdigit(static_cast<unsigned char>(stem[digits]))) ++digits;
    const std::string fallback = digits > 0 ? stem.substr(0, digits) : std::to_string(i);
    try {
      per[i] = extract_recording(load_recording(paths[i], fallback, config.fps), config);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (!errors[i].empty()) {
      result.errors.push_back(errors[i].rfind(paths[i], 0) == 0 ? errors[i] : paths[i] + ": " + errors[i]);
      continue;
    }
    ++result.recordings;
    result.samples.insert(result.samples.end(), per[i].begin(), per[i].end());
  }
  std::stable_sort(result.samples.begin(), result.samples.end(),
                   [](const ParameterSample& a, const ParameterSample& b) {
                     if (a.recording != b.recording) return recording_less(a.recording, b.recording);
                     if (a.track != b.track) return a.track < b.track;
                     return a.frame < b.frame;
                   });
  return result;
}

void write_samples(const std::vector<ParameterSample>& samples, std::ostream& out) {
  out << "recordingId,trackId,frame,VelCar,TrafficCar,WaitTime,DistCar\n";
  for (const auto& s : samples) {
    out << s.recording << ',' << s.track << ',' << s.frame << ',' << format_number(s.vel_car) << ','
        << s.traffic_car << ',' << format_number(s.wait_time) << ',' << format_number(s.dist_car)
        << '\n';
  }
}

DataMatrix samples_matrix(const std::vector<ParameterSample>& samples) {
  DataMatrix m(samples.size(), {"VelCar", "TrafficCar", "WaitTime", "DistCar"});
  for (std::size_t i = 0; i < samples.size(); ++i) {
    m(i, 0) = samples[i].vel_car;
    m(i, 1) = samples[i].traffic_car;
    m(i, 2) = samples[i].wait_time;
    m(i, 3) = samples[i].dist_car;
  }
  return m;
}

}  // namespace vinecop
