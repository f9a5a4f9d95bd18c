#pragma once

#include <filesystem>
#include <string>

#include "radarmon/nn/model.hpp"

namespace radarmon::nn {

/// Binary model container, all integers and doubles little-endian:
///   magic "RADMONNN", u32 version, u8 variant (255 = custom),
///   u32 input c/h/w, u32 layer count, per layer u8 kind + u32 fields,
///   u32 tensor count, per tensor u32 rank, u32 dims, f64 values.
inline constexpr char kModelMagic[8] = {'R', 'A', 'D', 'M', 'O', 'N', 'N', 'N'};
inline constexpr std::uint32_t kModelFormatVersion = 1;

std::string serialize_model(const CnnModel& model);
CnnModel deserialize_model(const std::string& bytes);

void save_model(const CnnModel& model, const std::filesystem::path& path);
CnnModel load_model(const std::filesystem::path& path);

}  // namespace radarmon::nn
