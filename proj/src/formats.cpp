#include "speedlearn/formats.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "binary_io.hpp"
#include "speedlearn/core.hpp"
#include "speedlearn/error.hpp"

namespace speedlearn::io {

namespace {

constexpr char kDatasetMagic[8] = {'S', 'P', 'D', 'S', 'E', 'T', '1', '\0'};

template <std::size_t N>
std::vector<std::array<double, N>> read_table(const fs::path& path, const char* header) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw Error(ErrorCode::kIoFailure, path.string() + ": expected header '" + header + "'");
  }
  std::vector<std::array<double, N>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::array<double, N> row{};
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (std::size_t c = 0; c < N; ++c) {
      auto [next, ec] = std::from_chars(p, end, row[c]);
      if (ec != std::errc() || (c + 1 < N && (next == end || *next != ',')) ||
          (c + 1 == N && next != end)) {
        throw Error(ErrorCode::kIoFailure,
                    path.string() + ":" + std::to_string(lineno) + ": malformed record");
      }
      p = next + 1;
    }
    rows.push_back(row);
  }
  return rows;
}

template <std::size_t N>
void write_table(const fs::path& path, const char* header,
                 const std::vector<std::array<double, N>>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out << header << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < N; ++c) {
      if (c) out << ',';
      out << format_double(row[c]);
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + path.string());
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), end};
}

void write_imu_csv(const fs::path& path, std::span<const ImuSample> imu) {
  std::vector<std::array<double, 7>> rows;
  rows.reserve(imu.size());
  for (const auto& s : imu) {
    rows.push_back({s.t, s.f_body.x(), s.f_body.y(), s.f_body.z(), s.omega_body.x(),
                    s.omega_body.y(), s.omega_body.z()});
  }
  write_table(path, kImuHeader, rows);
}

std::vector<ImuSample> read_imu_csv(const fs::path& path) {
  std::vector<ImuSample> out;
  for (const auto& r : read_table<7>(path, kImuHeader)) {
    out.push_back({r[0], Vec3(r[1], r[2], r[3]), Vec3(r[4], r[5], r[6])});
  }
  return out;
}

void write_fixes_csv(const fs::path& path, std::span<const GnssFix> fixes) {
  std::vector<std::array<double, 3>> rows;
  rows.reserve(fixes.size());
  for (const auto& f : fixes) rows.push_back({f.t, f.p_nav.x(), f.p_nav.y()});
  write_table(path, kFixHeader, rows);
}

std::vector<GnssFix> read_fixes_csv(const fs::path& path) {
  std::vector<GnssFix> out;
  for (const auto& r : read_table<3>(path, kFixHeader)) out.push_back({r[0], Vec2(r[1], r[2])});
  return out;
}

void write_truth_csv(const fs::path& path, const Trajectory& truth) {
  std::vector<std::array<double, 7>> rows;
  rows.reserve(truth.size());
  for (const auto& k : truth) {
    rows.push_back({k.t, k.p_nav.x(), k.p_nav.y(), k.psi, k.speed, k.accel, k.yaw_rate});
  }
  write_table(path, kTruthHeader, rows);
}

Trajectory read_truth_csv(const fs::path& path) {
  Trajectory out;
  for (const auto& r : read_table<7>(path, kTruthHeader)) {
    out.push_back({r[0], Vec2(r[1], r[2]), r[3], r[4], r[5], r[6]});
  }
  return out;
}

DriveFiles drive_files(const fs::path& dir, const std::string& id) {
  return {dir / (id + "_imu.csv"), dir / (id + "_fixes.csv"), dir / (id + "_truth.csv")};
}

void write_drive(const fs::path& dir, const Drive& drive) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot create " + dir.string());
  const auto files = drive_files(dir, drive.id);
  write_imu_csv(files.imu, drive.imu);
  write_fixes_csv(files.fixes, drive.fixes);
  if (drive.truth) write_truth_csv(files.truth, *drive.truth);
}

Drive read_drive(const fs::path& prefix) {
  std::string name = prefix.filename().string();
  constexpr std::string_view kSuffix = "_imu.csv";
  if (name.size() > kSuffix.size() && name.ends_with(kSuffix)) {
    name.resize(name.size() - kSuffix.size());
  }
  const auto files = drive_files(prefix.parent_path(), name);
  const auto imu = read_imu_csv(files.imu);
  const auto fixes = read_fixes_csv(files.fixes);
  Drive drive = align_streams(imu, fixes, name);
  if (fs::exists(files.truth)) drive.truth = read_truth_csv(files.truth);
  return drive;
}

std::vector<fs::path> find_drives(std::span<const fs::path> inputs) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(in)) {
        const auto name = entry.path().filename().string();
        if (name.ends_with("_imu.csv")) found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(in);
    }
  }
  return out;
}

void write_dataset(const fs::path& path, std::span<const pipe::Lane> lanes) {
  detail::ByteWriter w;
  w.raw(kDatasetMagic, sizeof(kDatasetMagic));
  w.put<std::uint32_t>(kWindowLen);
  w.put<std::uint32_t>(kChannels);
  std::uint64_t count = 0;
  for (const auto& lane : lanes) count += lane.windows.size();
  w.put<std::uint64_t>(count);
  w.str(kDatasetUnits);
  for (const auto& lane : lanes) {
    for (const auto& win : lane.windows) {
      w.str(win.drive_id);
      w.put<std::int64_t>(win.index);
      w.put<std::uint8_t>(win.valid ? 1 : 0);
      for (int r = 0; r < kWindowLen; ++r) {
        for (int c = 0; c < kChannels; ++c) w.put<double>(win.x(r, c));
      }
      for (int r = 0; r < kWindowLen; ++r) w.put<double>(win.y(r));
    }
  }
  w.put<std::uint32_t>(detail::crc32(w.bytes().data(), w.bytes().size()));
  detail::write_file(path, w.bytes());
}

std::vector<pipe::Lane> read_dataset(const fs::path& path) {
  const auto bytes = detail::read_file(path);
  if (bytes.size() < sizeof(kDatasetMagic) + 4) {
    throw Error(ErrorCode::kChecksumMismatch, path.string() + " is too short");
  }
  const std::size_t body = bytes.size() - 4;
  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + body, 4);
  if (detail::crc32(bytes.data(), body) != stored) {
    throw Error(ErrorCode::kChecksumMismatch, path.string() + " failed its CRC-32 check");
  }
  detail::ByteReader r(bytes.data(), body, ErrorCode::kChecksumMismatch);
  char magic[sizeof(kDatasetMagic)];
  r.raw(magic, sizeof(magic));
  if (!std::equal(std::begin(magic), std::end(magic), std::begin(kDatasetMagic))) {
    throw Error(ErrorCode::kIoFailure, path.string() + " is not a window dataset");
  }
  if (r.get<std::uint32_t>() != kWindowLen || r.get<std::uint32_t>() != kChannels) {
    throw Error(ErrorCode::kShapeMismatch, path.string() + " has an unsupported window shape");
  }
  const auto count = r.get<std::uint64_t>();
  r.str();

  std::vector<pipe::Lane> lanes;
  std::map<std::string, std::size_t> lane_of;
  for (std::uint64_t i = 0; i < count; ++i) {
    pipe::LabeledWindow win;
    win.drive_id = r.str();
    win.index = r.get<std::int64_t>();
    win.valid = r.get<std::uint8_t>() != 0;
    for (int row = 0; row < kWindowLen; ++row) {
      for (int c = 0; c < kChannels; ++c) win.x(row, c) = r.get<double>();
    }
    for (int row = 0; row < kWindowLen; ++row) win.y(row) = r.get<double>();
    auto [it, inserted] = lane_of.try_emplace(win.drive_id, lanes.size());
    if (inserted) lanes.push_back({win.drive_id, {}});
    lanes[it->second].windows.push_back(std::move(win));
  }
  if (r.remaining() != 0) throw Error(ErrorCode::kChecksumMismatch, "trailing bytes in dataset");
  return lanes;
}

}  // namespace speedlearn::io
