// Copyright 2026 The HFCF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// End-to-end construction of the hybrid frequency-colour representation of a
// face image, plus the privacy-leakage report for its planes.

#pragma once

#include <algorithm>
#include <atomic>
#include <fstream>
#include <future>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "hfcf/bdct.hpp"
#include "hfcf/colordesc.hpp"
#include "hfcf/fusion.hpp"
#include "hfcf/polyprotect.hpp"
#include "hfcf/privmetrics.hpp"
#include "hfcf/tensorio.hpp"

namespace hfcf {

struct PipelineConfig {
  HybridScheme scheme = HybridScheme::ConcatDlbp126;
  NoiseSpec noise;
  std::size_t upsample_factor = 8;
  double add_alpha = 1.0;
  // Deployment-side settings, used by the CLI.
  std::size_t protect_window = kDefaultWindow;
  std::size_t overlap = 4;
  std::string endpoint = "127.0.0.1:7070";
  std::uint64_t dealer_seed = 0;
};

// Every intermediate artefact of one pipeline run.
struct PipelineStages {
  RasterImage original;
  RasterImage upsampled;
  RasterImage ycbcr;
  DctTensor full;
  DcPlanes dc;
  DctTensor ac;
  DctTensor fused;
  DctTensor freq_sorted;
  SortPermutation freq_order;
  DlbpStack dlbp;
  DlbpStack dlbp_sorted;
  SortPermutation dlbp_order;
  std::vector<LbpCodeImage> lbp;
  HybridTensor hybrid;
  HybridTensor output;  // hybrid plus noise
};

// upsample -> YCbCr -> BDCT -> drop DC -> fuse -> energy sort; colour branch
// sorted by distance to the luma DC plane; hybrid fusion; noise.
inline PipelineStages run_stages(const RasterImage& img, const PipelineConfig& cfg) {
  if (img.space != ColorSpace::RGB || img.channels != 3) throw SpaceError("pipeline: RGB input required");
  cfg.noise.validate();
  PipelineStages s;
  s.original = img;
  s.upsampled = upsample_bilinear(img, cfg.upsample_factor);
  s.ycbcr = rgb_to_ycbcr(s.upsampled);
  s.full = forward_bdct(s.ycbcr);
  std::tie(s.dc, s.ac) = split_dc(s.full);
  s.fused = frequency_fuse(s.ac);
  std::tie(s.freq_sorted, s.freq_order) = sort_by_energy(s.fused);

  const bool need_colour_geometry = cfg.scheme != HybridScheme::FreqOnly63;
  if (need_colour_geometry && (img.height != s.freq_sorted.height() || img.width != s.freq_sorted.width()))
    throw DimError("pipeline: colour descriptors need upsample factor 8 so geometries match");
  if (uses_lbp(cfg.scheme)) {
    s.lbp = lbp_rgb(img);
    s.hybrid = hybrid_fuse(s.freq_sorted, s.lbp, cfg.scheme);
  } else if (cfg.scheme == HybridScheme::FreqOnly63) {
    s.hybrid = hybrid_freq_only(s.freq_sorted);
  } else {
    s.dlbp = dlbp_from_image(img);
    std::tie(s.dlbp_sorted, s.dlbp_order) = sort_dlbp_by_dc_similarity(s.dlbp, s.dc.y);
    s.hybrid = hybrid_fuse(s.freq_sorted, s.dlbp_sorted, cfg.scheme, cfg.add_alpha);
  }
  s.output = apply_dp_noise(s.hybrid, cfg.noise);
  return s;
}

inline HybridTensor make_hybrid(const RasterImage& img, const PipelineConfig& cfg) {
  return run_stages(img, cfg).output;
}

inline HybridTensor make_hybrid(const std::string& image_path, const PipelineConfig& cfg) {
  return make_hybrid(load_image(image_path), cfg);
}

// PSNR/SSIM of the first three sorted fused-DCT planes, the first three
// sorted DLBP planes and the R/G/B LBP code images against the original
// luma. DCT and DLBP planes are min-max normalised to [0, 255] first.
inline std::vector<MetricReport> privacy_report(const RasterImage& img, const PipelineConfig& cfg,
                                                bool include_control = false) {
  PipelineConfig dlbp_cfg = cfg;
  dlbp_cfg.scheme = HybridScheme::ConcatDlbp126;
  dlbp_cfg.noise = NoiseSpec{};
  const PipelineStages s = run_stages(img, dlbp_cfg);
  const Plane luma = rgb_to_ycbcr(img).channel(0);
  std::vector<MetricReport> out;
  for (std::size_t k = 0; k < 3; ++k)
    out.push_back(compare_planes(luma, normalize_minmax(s.freq_sorted.planes.plane(k)), "luma",
                                 "DCT#" + std::to_string(k) + "(" + s.freq_sorted.tags[k].label() + ")"));
  for (std::size_t k = 0; k < 3; ++k)
    out.push_back(compare_planes(luma, normalize_minmax(s.dlbp_sorted.planes.plane(k)), "luma",
                                 "DLBP#" + std::to_string(k) + "(" + s.dlbp_sorted.planes.labels[k] + ")"));
  for (const auto& codes : lbp_rgb(img))
    out.push_back(compare_planes(luma, codes.as_plane(), "luma", "LBP:" + codes.source_channel));
  if (include_control) out.push_back(compare_planes(luma, luma, "luma", "luma"));
  return out;
}

inline std::vector<MetricReport> privacy_report(const std::string& image_path, const PipelineConfig& cfg,
                                                bool include_control = false) {
  return privacy_report(load_image(image_path), cfg, include_control);
}

namespace detail {
inline std::string join_indices(const std::vector<std::size_t>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}
}  // namespace detail

// Single metadata line stored next to an emitted tensor.
inline std::string sidecar_line(const PipelineStages& s, const PipelineConfig& cfg) {
  std::ostringstream os;
  os << "scheme=" << to_string(s.output.scheme) << " noise=" << cfg.noise.describe() << " seed=" << cfg.noise.seed
     << " depth=" << s.output.planes.depth << " freq_order=" << detail::join_indices(s.freq_order.ordering);
  if (!s.dlbp_order.ordering.empty()) os << " dlbp_order=" << detail::join_indices(s.dlbp_order.ordering);
  os << " labels=";
  for (std::size_t k = 0; k < s.output.planes.labels.size(); ++k) os << (k ? "," : "") << s.output.planes.labels[k];
  return os.str();
}

inline void write_sidecar(const std::string& tensor_path, const std::string& line) {
  std::ofstream out(tensor_path + ".meta", std::ios::trunc);
  if (!out) throw IoError("cannot write " + tensor_path + ".meta");
  out << line << '\n';
}

// Writes one tensor per manifest line to `<image path><suffix>`, in parallel.
inline std::vector<std::string> run_batch(const std::string& manifest, const PipelineConfig& cfg,
                                          const std::string& suffix = ".hft", unsigned threads = 0) {
  std::ifstream in(manifest);
  if (!in) throw IoError("cannot open manifest " + manifest);
  std::vector<std::string> paths;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) paths.push_back(line);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::string> outputs(paths.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> workers;
  for (unsigned t = 0; t < std::min<std::size_t>(threads, paths.size()); ++t)
    workers.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i; (i = next++) < paths.size();) {
        const auto stages = run_stages(load_image(paths[i]), cfg);
        outputs[i] = paths[i] + suffix;
        write_tensor(stages.output.planes, outputs[i]);
        write_sidecar(outputs[i], sidecar_line(stages, cfg));
      }
    }));
  for (auto& w : workers) w.get();
  return outputs;
}

}  // namespace hfcf
