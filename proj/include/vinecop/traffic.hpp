#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "vinecop/data_matrix.hpp"

namespace vinecop {

enum class VehicleClass { Car, Truck, Van, Trailer, Bus, Pedestrian, Bicycle, Motorcycle };

std::string_view class_name(VehicleClass c);
/// Case-insensitive; throws ParseError for unknown names.
VehicleClass class_from_name(std::string_view name);
/// car, truck, van, bus, trailer, motorcycle.
std::vector<VehicleClass> motorized_classes();

struct TrajectoryRecord {
  long long frame = 0;
  double x = 0.0;
  double y = 0.0;
  double speed = 0.0;
};

struct Track {
  long long id = 0;
  VehicleClass cls = VehicleClass::Car;
  std::vector<TrajectoryRecord> records;  // strictly increasing frames
};

struct Recording {
  std::string id;
  std::vector<Track> tracks;  // sorted by id
};

/// Reads a rounD-style tracks CSV. Required columns: trackId, frame and
/// x/xCenter, y/yCenter. Optional: vx/xVelocity with vy/yVelocity (speed is
/// their norm, otherwise a central difference of positions times fps),
/// class, recordingId. `meta` may supply trackId -> class; tracks without a
/// class are cars. `fallback_id` names the recording when no recordingId
/// column exists.
Recording read_recording(std::istream& tracks, const std::string& source, std::istream* meta,
                         const std::string& fallback_id, double fps = 25.0);
/// File variant; picks up a sibling `*_tracksMeta.csv` when present.
Recording load_recording(const std::string& path, const std::string& fallback_id, double fps = 25.0);

/// One vehicle in one frame.
struct FrameObject {
  double x = 0.0;
  double y = 0.0;
  VehicleClass cls = VehicleClass::Car;
};

/// Per object: number of other objects of a counted class whose center lies
/// within `radius` (inclusive).
std::vector<int> traffic_density(const std::vector<FrameObject>& frame, double radius,
                                 const std::vector<VehicleClass>& counted);

/// Per object: distance to the nearest other object of a counted class, NaN
/// when there is none.
std::vector<double> min_distance(const std::vector<FrameObject>& frame,
                                 const std::vector<VehicleClass>& counted);

enum class WaitTimeMode { Running, Total };

struct Geometry {
  double center_x = 0.0;
  double center_y = 0.0;
  double entry_radius = 0.0;
};

struct StandstillRule {
  double speed = 0.1;  // m/s, strict upper bound
  int min_frames = 3;
};

/// Standstill seconds per frame of one track. A frame is a standstill frame
/// when it belongs to a run of at least `min_frames` consecutive frames below
/// the speed threshold. Frames after the track last lies inside the entry
/// circle do not accrue; a track that never enters accrues throughout.
/// Running mode gives the cumulative value at each frame, Total repeats the
/// track total.
std::vector<double> wait_time(const Track& track, const Geometry& geometry,
                              const StandstillRule& rule, double fps = 25.0,
                              WaitTimeMode mode = WaitTimeMode::Running);

struct ExtractConfig {
  Geometry geometry;
  double radius = 10.0;
  StandstillRule standstill;
  double fps = 25.0;
  WaitTimeMode wait_mode = WaitTimeMode::Running;
  std::vector<VehicleClass> counted = motorized_classes();
  std::vector<VehicleClass> subjects = {VehicleClass::Car};
  unsigned threads = 1;
};

/// Geometry JSON: {"center": [x, y], "entryRadius": r}, with optional
/// "radius", "standstillSpeed", "standstillFrames", "fps" and
/// "vehicleClasses" overriding the defaults.
ExtractConfig parse_config(std::string_view json_text, const std::string& source = "<config>");
ExtractConfig load_config(const std::string& path);

struct ParameterSample {
  std::string recording;
  long long track = 0;
  long long frame = 0;
  double vel_car = 0.0;
  int traffic_car = 0;
  double wait_time = 0.0;
  double dist_car = 0.0;
};

/// Rows for every subject-class record that has a neighbour, ordered by
/// (recording, track, frame).
std::vector<ParameterSample> extract_recording(const Recording& rec, const ExtractConfig& config);

struct ExtractResult {
  std::vector<ParameterSample> samples;
  /// "path: message" for each recording that failed.
  std::vector<std::string> errors;
  std::size_t recordings = 0;  // processed without error
};

/// Expands directories to their `*_tracks.csv` files (or every .csv that is
/// not a meta file), processes each recording and keeps going past failures.
/// The recording id is the recordingId column, else the leading digits of
/// the file name, else the position in the sorted path list.
ExtractResult extract(const std::vector<std::string>& inputs, const ExtractConfig& config);

void write_samples(const std::vector<ParameterSample>& samples, std::ostream& out);
/// VelCar, TrafficCar, WaitTime, DistCar as a data-scale matrix.
DataMatrix samples_matrix(const std::vector<ParameterSample>& samples);

}  // namespace vinecop
