#ifndef MRMOCO_IO_HPP
#define MRMOCO_IO_HPP

#include <cstdint>
#include <filesystem>
#include <string>

#include "mrmoco/acquisition.hpp"
#include "mrmoco/metrics.hpp"
#include "mrmoco/motion.hpp"
#include "mrmoco/phantom.hpp"
#include "mrmoco/types.hpp"

namespace mrmoco::io {

// All binary artifacts share the same skeleton: an 8-byte magic that carries
// the format version, a little-endian shape header, then interleaved
// real/imag 64-bit float payload. Written bytes are bit-identical across
// runs for identical inputs.

void write_image(const std::filesystem::path& file, const ComplexImage& image);
ComplexImage read_image(const std::filesystem::path& file);

void write_coil_maps(const std::filesystem::path& file, const phantom::CoilMaps& maps);
phantom::CoilMaps read_coil_maps(const std::filesystem::path& file);

void write_kspace(const std::filesystem::path& file, const acquisition::KSpaceData& y);
acquisition::KSpaceData read_kspace(const std::filesystem::path& file);

void write_trajectory(const std::filesystem::path& file, const phantom::SampledTrajectory& traj);
phantom::SampledTrajectory read_trajectory(const std::filesystem::path& file);

void write_motion_table(const std::filesystem::path& file, const motion::MotionTrajectory& traj);
motion::MotionTrajectory read_motion_table(const std::filesystem::path& file);

void write_text(const std::filesystem::path& file, const std::string& text);
std::string read_text(const std::filesystem::path& file);

// FNV-1a 64-bit content hash used by bundle manifests to detect stale or
// edited artifacts.
std::uint64_t fnv1a64_file(const std::filesystem::path& file);
std::string hash_hex(std::uint64_t hash);

// Round-trippable decimal formatting shared by all CSV/text emitters.
std::string format_double(double v);

std::string eval_report_json(const metrics::EvalReport& report);

}  // namespace mrmoco::io

#endif
