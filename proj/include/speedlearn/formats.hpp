#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "speedlearn/labelpipe.hpp"
#include "speedlearn/types.hpp"

namespace speedlearn::io {

namespace fs = std::filesystem;

// Shortest decimal text that parses back to the identical double.
std::string format_double(double v);

// Sensor logs: comma-separated text, one header line with units, one record
// per line.
//   IMU:    t[s],fx[m/s^2],fy[m/s^2],fz[m/s^2],wx[rad/s],wy[rad/s],wz[rad/s]
//   fixes:  t[s],px[m],py[m]
//   truth:  t[s],px[m],py[m],psi[rad],speed[m/s],accel[m/s^2],yaw_rate[rad/s]
inline constexpr const char* kImuHeader =
    "t[s],fx[m/s^2],fy[m/s^2],fz[m/s^2],wx[rad/s],wy[rad/s],wz[rad/s]";
inline constexpr const char* kFixHeader = "t[s],px[m],py[m]";
inline constexpr const char* kTruthHeader =
    "t[s],px[m],py[m],psi[rad],speed[m/s],accel[m/s^2],yaw_rate[rad/s]";

void write_imu_csv(const fs::path& path, std::span<const ImuSample> imu);
std::vector<ImuSample> read_imu_csv(const fs::path& path);
void write_fixes_csv(const fs::path& path, std::span<const GnssFix> fixes);
std::vector<GnssFix> read_fixes_csv(const fs::path& path);
void write_truth_csv(const fs::path& path, const Trajectory& truth);
Trajectory read_truth_csv(const fs::path& path);

struct DriveFiles {
  fs::path imu, fixes, truth;
};

// <dir>/<id>_imu.csv, <id>_fixes.csv, <id>_truth.csv
DriveFiles drive_files(const fs::path& dir, const std::string& id);
void write_drive(const fs::path& dir, const Drive& drive);
// Accepts a drive prefix (dir/id) or the path of its IMU file. Truth is loaded
// when present.
Drive read_drive(const fs::path& prefix);
// Expands directories to the drives they contain (sorted by id).
std::vector<fs::path> find_drives(std::span<const fs::path> inputs);

// Binary window dataset:
//   "SPDSET1\0", u32 window_len, u32 channels, u64 record count,
//   u16-prefixed units string, then per record: u16-prefixed drive_id,
//   i64 index, u8 valid, window_len*channels f64 inputs (row-major, one row
//   per step), window_len f64 labels; finally CRC-32 of all preceding bytes.
// All integers and floats little-endian.
inline constexpr const char* kDatasetUnits =
    "x: specific force m/s^2 (ch 0-2, gravity removed), angular rate rad/s (ch 3-5); y: speed m/s";

void write_dataset(const fs::path& path, std::span<const pipe::Lane> lanes);
// Lanes are regrouped by drive_id in order of first appearance.
std::vector<pipe::Lane> read_dataset(const fs::path& path);

}  // namespace speedlearn::io
