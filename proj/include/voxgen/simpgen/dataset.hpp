#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "voxgen/simpgen/sampler.hpp"
#include "voxgen/simpgen/simp.hpp"

namespace voxgen::simpgen {

// One stored training pair, x-fastest float fields.
struct DatasetSample {
  std::uint64_t id = 0;
  float volfrac = 0.0f;
  std::vector<float> strain_energy;
  std::vector<float> density;
};

struct Dataset {
  voxfem::GridDims dims;
  std::vector<DatasetSample> samples;
};

enum class Split : std::uint8_t { Train = 0, Test = 1 };

struct SampleMeta {
  std::uint64_t id = 0;
  std::uint64_t seed = 0;
  double volfrac = 0.0;
  double final_compliance = 0.0;
  int iterations = 0;
  std::uint64_t offset = 0;  // byte offset of the record in the dataset file
  Split split = Split::Train;
  bool ok = true;
  std::string error;
  voxfem::FemProblem problem;
};

struct DatasetManifest {
  std::uint16_t format_version = 1;
  voxfem::GridDims dims;
  std::uint64_t seed = 0;
  std::vector<SampleMeta> samples;

  std::size_t count_ok() const;
  void save(const std::string& path) const;
  static DatasetManifest load(const std::string& path);
};

struct GenerateConfig {
  ProblemSamplerConfig sampler;
  SimpConfig simp;
  std::uint64_t seed = 0;
  double abort_failure_fraction = 0.2;
  int threads = 1;
};

// Binary dataset file ("VOXD"): version u16, dims 3xu32, sample count u32,
// then per sample: id u64, volfrac f32, strain-energy f32[n], density f32[n].
void write_dataset(const std::string& path, const Dataset& dataset,
                   std::vector<std::uint64_t>* offsets = nullptr);
Dataset read_dataset(const std::string& path);

// Runs n (sample_problem -> run_simp) jobs and writes out_path plus the
// manifest sidecar out_path + ".manifest.json". Per-sample failures are
// recorded in the manifest; throws only if more than the configured fraction
// of samples fail. The 80/20 train/test split ranks samples by a hash of
// their id.
DatasetManifest generate_dataset(int n, const GenerateConfig& cfg, const std::string& out_path);

std::string manifest_path_for(const std::string& dataset_path);

}  // namespace voxgen::simpgen
