#pragma once

#include <filesystem>
#include <string>

#include "tmac/compile.hpp"
#include "tmac/packet.hpp"
#include "tmac/tm.hpp"

namespace tmac {

// Trained model plus the provenance every artifact carries.
struct ModelFile {
  TaStateMatrix model;
  Hyperparams hp;
  std::string config_hash;
  std::string tool_version;
};

// Binary model format (magic "TMAC", little-endian; layout in docs/formats.md).
void save_model(const std::filesystem::path& path, const ModelFile& mf);
ModelFile load_model(const std::filesystem::path& path);

// External state-matrix exchange (JSON; schema in docs/formats.md). This is
// the import path for models trained outside the tool.
ModelFile import_state_matrix_json(const std::filesystem::path& path);
void export_state_matrix_json(const std::filesystem::path& path, const ModelFile& mf);

struct CompiledFile {
  CompiledModel model;
  PacketPlan plan;
};
void save_compiled(const std::filesystem::path& path, const CompiledModel& model,
                   const PacketPlan& plan);
CompiledFile load_compiled(const std::filesystem::path& path);

std::string sparsity_to_json(const SparsityReport& report);
std::string sparsity_to_text(const SparsityReport& report);

}  // namespace tmac
