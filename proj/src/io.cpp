#include "mrmoco/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace mrmoco::io {

namespace {

constexpr char kImageMagic[8] = {'C', 'X', 'I', 'M', 'G', '0', '0', '1'};
constexpr char kKSpaceMagic[8] = {'K', 'S', 'P', 'C', '0', '0', '1', '\n'};
constexpr char kTrajMagic[8] = {'K', 'T', 'R', 'J', '0', '0', '1', '\n'};

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) {
  const std::uint64_t bits = get_u64(in);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

void put_complex_block(std::ostream& out, const std::vector<Complex>& data) {
  for (const auto& z : data) {
    put_f64(out, z.real());
    put_f64(out, z.imag());
  }
}

void get_complex_block(std::istream& in, std::vector<Complex>& data) {
  for (auto& z : data) {
    const double re = get_f64(in);
    const double im = get_f64(in);
    z = Complex(re, im);
  }
}

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + file.string());
  return in;
}

void expect_magic(std::istream& in, const char (&magic)[8], const std::filesystem::path& file) {
  char buf[8];
  in.read(buf, 8);
  if (!in || std::memcmp(buf, magic, 8) != 0) throw std::runtime_error("bad or unsupported file format: " + file.string());
}

void check_stream(const std::ios& s, const std::filesystem::path& file) {
  if (!s) throw std::runtime_error("truncated or failed I/O on: " + file.string());
}

void write_planes(const std::filesystem::path& file, const std::vector<const ComplexImage*>& planes) {
  auto out = open_out(file);
  out.write(kImageMagic, 8);
  put_u32(out, static_cast<std::uint32_t>(planes[0]->width));
  put_u32(out, static_cast<std::uint32_t>(planes[0]->height));
  put_u32(out, static_cast<std::uint32_t>(planes.size()));
  for (const auto* p : planes) put_complex_block(out, p->data);
  check_stream(out, file);
}

}  // namespace

void write_image(const std::filesystem::path& file, const ComplexImage& image) {
  write_planes(file, {&image});
}

ComplexImage read_image(const std::filesystem::path& file) {
  auto in = open_in(file);
  expect_magic(in, kImageMagic, file);
  const auto w = get_u32(in);
  const auto h = get_u32(in);
  const auto planes = get_u32(in);
  if (planes != 1) throw std::runtime_error("expected a single-plane image: " + file.string());
  ComplexImage img(static_cast<int>(w), static_cast<int>(h));
  get_complex_block(in, img.data);
  check_stream(in, file);
  return img;
}

void write_coil_maps(const std::filesystem::path& file, const phantom::CoilMaps& maps) {
  std::vector<const ComplexImage*> planes;
  for (const auto& m : maps.maps) planes.push_back(&m);
  write_planes(file, planes);
}

phantom::CoilMaps read_coil_maps(const std::filesystem::path& file) {
  auto in = open_in(file);
  expect_magic(in, kImageMagic, file);
  const auto w = get_u32(in);
  const auto h = get_u32(in);
  const auto planes = get_u32(in);
  if (planes < 1 || planes > 4096) throw std::runtime_error("implausible coil count in: " + file.string());
  phantom::CoilMaps maps;
  maps.num_coils = static_cast<int>(planes);
  for (std::uint32_t c = 0; c < planes; ++c) {
    ComplexImage img(static_cast<int>(w), static_cast<int>(h));
    get_complex_block(in, img.data);
    maps.maps.push_back(std::move(img));
  }
  check_stream(in, file);
  return maps;
}

void write_kspace(const std::filesystem::path& file, const acquisition::KSpaceData& y) {
  auto out = open_out(file);
  out.write(kKSpaceMagic, 8);
  put_u32(out, static_cast<std::uint32_t>(y.num_coils));
  put_u64(out, static_cast<std::uint64_t>(y.samples.size()));
  put_f64(out, y.noise_std);
  put_complex_block(out, y.samples);
  check_stream(out, file);
}

acquisition::KSpaceData read_kspace(const std::filesystem::path& file) {
  auto in = open_in(file);
  expect_magic(in, kKSpaceMagic, file);
  acquisition::KSpaceData y;
  y.num_coils = static_cast<int>(get_u32(in));
  const auto count = get_u64(in);
  y.noise_std = get_f64(in);
  if (y.num_coils < 1 || count % y.num_coils != 0) throw std::runtime_error("inconsistent k-space header: " + file.string());
  y.samples.resize(count);
  get_complex_block(in, y.samples);
  check_stream(in, file);
  return y;
}

void write_trajectory(const std::filesystem::path& file, const phantom::SampledTrajectory& traj) {
  auto out = open_out(file);
  out.write(kTrajMagic, 8);
  put_u32(out, static_cast<std::uint32_t>(traj.grid_n));
  put_u32(out, static_cast<std::uint32_t>(traj.etl));
  put_f64(out, traj.accel);
  put_u32(out, static_cast<std::uint32_t>(traj.tr_bounds.size()));
  put_u64(out, static_cast<std::uint64_t>(traj.coords.size()));
  for (const auto& r : traj.tr_bounds) {
    put_u64(out, r.begin);
    put_u64(out, r.end);
  }
  for (const auto& p : traj.coords) {
    put_f64(out, p.kx);
    put_f64(out, p.ky);
  }
  check_stream(out, file);
}

phantom::SampledTrajectory read_trajectory(const std::filesystem::path& file) {
  auto in = open_in(file);
  expect_magic(in, kTrajMagic, file);
  phantom::SampledTrajectory traj;
  traj.grid_n = static_cast<int>(get_u32(in));
  traj.etl = static_cast<int>(get_u32(in));
  traj.accel = get_f64(in);
  const auto num_trs = get_u32(in);
  const auto num_coords = get_u64(in);
  traj.tr_bounds.resize(num_trs);
  for (auto& r : traj.tr_bounds) {
    r.begin = get_u64(in);
    r.end = get_u64(in);
  }
  traj.coords.resize(num_coords);
  for (auto& p : traj.coords) {
    p.kx = get_f64(in);
    p.ky = get_f64(in);
  }
  check_stream(in, file);
  for (const auto& r : traj.tr_bounds) {
    if (r.begin > r.end || r.end > traj.coords.size()) throw std::runtime_error("corrupt trajectory ranges: " + file.string());
  }
  return traj;
}

void write_motion_table(const std::filesystem::path& file, const motion::MotionTrajectory& traj) {
  write_text(file, motion::to_table(traj));
}

motion::MotionTrajectory read_motion_table(const std::filesystem::path& file) {
  return motion::from_table(read_text(file));
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  auto out = open_out(file);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  check_stream(out, file);
}

std::string read_text(const std::filesystem::path& file) {
  auto in = open_in(file);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return text;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& file) {
  auto in = open_in(file);
  std::uint64_t hash = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    const auto got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ull;
    }
  }
  return hash;
}

std::string hash_hex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string eval_report_json(const metrics::EvalReport& report) {
  nlohmann::ordered_json j;
  j["nrmse_raw"] = report.nrmse_raw;
  j["nrmse_aligned"] = report.nrmse_aligned;
  j["alignment"] = {{"theta_deg", report.alignment.theta_deg},
                    {"phi_x_px", report.alignment.phi_x},
                    {"phi_y_px", report.alignment.phi_y}};
  j["magnitude_only"] = report.magnitude_only;
  return j.dump(2);
}

}  // namespace mrmoco::io
