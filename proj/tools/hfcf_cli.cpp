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

// hfcf command-line tool.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "hfcf/hfcf.hpp"

namespace {

using namespace hfcf;

// ---------------------------------------------------------------------------
// transform

struct TransformArgs {
  std::string image, out, manifest, suffix = ".hft", scheme = "concat-dlbp", noise = "none";
  std::uint64_t seed = 0;
  double sensitivity = 1.0, alpha = 1.0;
  unsigned threads = 0;
};

PipelineConfig pipeline_config(const TransformArgs& a) {
  PipelineConfig cfg;
  cfg.scheme = parse_scheme(a.scheme);
  cfg.noise = parse_noise(a.noise, a.seed, a.sensitivity);
  cfg.add_alpha = a.alpha;
  return cfg;
}

int run_transform(const TransformArgs& a) {
  const auto cfg = pipeline_config(a);
  if (!a.manifest.empty()) {
    for (const auto& path : run_batch(a.manifest, cfg, a.suffix, a.threads)) std::cout << path << "\n";
    return 0;
  }
  if (a.image.empty()) throw ParamError("transform: give an image or --manifest");
  const auto stages = run_stages(load_image(a.image), cfg);
  const std::string out = a.out.empty() ? a.image + a.suffix : a.out;
  write_tensor(stages.output.planes, out);
  write_sidecar(out, sidecar_line(stages, cfg));
  std::cout << out << ": " << stages.output.planes.height << "x" << stages.output.planes.width << "x"
            << stages.output.planes.depth << " scheme=" << to_string(stages.output.scheme)
            << " noise=" << cfg.noise.describe() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// metrics

struct MetricsArgs {
  std::string ref, test, report, records;
  int plane = -1;
  bool control = false;
};

Plane luma_of(const std::string& path) {
  const auto img = load_image(path);
  if (img.space == ColorSpace::Gray || img.channels == 1) return img.channel(0);
  return rgb_to_ycbcr(img).channel(0);
}

Plane test_plane(const std::string& path, int plane) {
  if (plane >= 0) return normalize_minmax(read_tensor(path).plane(std::size_t(plane)));
  return luma_of(path);
}

void append_records(const std::string& path, const std::vector<MetricReport>& reports) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& r : reports) {
    nlohmann::json j;
    j["ref"] = r.ref_label;
    j["test"] = r.test_label;
    j["psnr_db"] = r.psnr_infinite() ? nlohmann::json(nullptr) : nlohmann::json(r.psnr_db);
    j["psnr_infinite"] = r.psnr_infinite();
    j["ssim"] = r.ssim;
    out << j.dump() << "\n";
  }
}

int run_metrics(const MetricsArgs& a) {
  std::vector<MetricReport> reports;
  if (!a.report.empty()) {
    reports = privacy_report(a.report, PipelineConfig{}, a.control);
  } else {
    if (a.ref.empty() || a.test.empty()) throw ParamError("metrics: give REF and TEST, or --report IMAGE");
    const std::string label = a.plane >= 0 ? a.test + "#" + std::to_string(a.plane) : a.test;
    reports.push_back(compare_planes(luma_of(a.ref), test_plane(a.test, a.plane), a.ref, label));
  }
  for (const auto& r : reports) std::cout << r.to_line() << "\n";
  append_records(a.records, reports);
  return 0;
}

// ---------------------------------------------------------------------------
// protect / enroll / query

struct ProtectArgs {
  std::string embedding, out;
  std::uint64_t seed = 0;
  std::size_t overlap = 4, window = kDefaultWindow;
};

int run_protect(const ProtectArgs& a) {
  const auto params = gen_params(a.seed, a.overlap, a.window);
  const auto p = protect(read_embedding(a.embedding), params);
  if (!a.out.empty()) write_embedding(p.values, a.out);
  std::cout << "params: " << params.to_record() << "\n"
            << "fingerprint: " << p.params_fingerprint << "\n"
            << "length: " << p.source_dim << " -> " << p.values.size() << "\n";
  if (a.out.empty())
    for (double v : p.values) std::printf("%.9g\n", v);
  return 0;
}

ParamsStore load_params_if_present(const std::string& path) {
  return std::filesystem::exists(path) ? ParamsStore::load(path) : ParamsStore{};
}

struct EnrollArgs {
  std::string gallery, params, identity, embedding;
  std::uint64_t seed = 0;
  std::size_t overlap = 4;
};

int run_enroll(const EnrollArgs& a) {
  auto params = load_params_if_present(a.params);
  auto gallery = Gallery::open(a.gallery);
  const auto p = gen_params(a.seed, a.overlap);
  const auto record = gallery.enroll(a.identity, read_embedding(a.embedding), p);
  params.put(a.identity, p);
  params.save(a.params);
  std::cout << "enrolled " << record.identity << " (" << record.values.size() << " values, fingerprint "
            << record.params_fingerprint << ")\n";
  return 0;
}

struct QueryArgs {
  std::string gallery, params, embedding, truth;
  std::size_t top = 5;
  bool secure = false;
  std::uint64_t dealer_seed = 0;
};

void print_result(const QueryResult& r) {
  for (std::size_t i = 0; i < r.ranked.size(); ++i)
    std::printf("%zu\t%s\t%.6f\n", i + 1, r.ranked[i].identity.c_str(), r.ranked[i].distance);
  if (r.truth) {
    std::size_t rank = 0;
    for (std::size_t i = 0; i < r.ranked.size() && !rank; ++i)
      if (r.ranked[i].identity == *r.truth) rank = i + 1;
    if (rank)
      std::printf("truth %s at rank %zu\n", r.truth->c_str(), rank);
    else
      std::printf("truth %s not in top %zu\n", r.truth->c_str(), r.ranked.size());
  }
}

int run_query(const QueryArgs& a) {
  const auto gallery = Gallery::open(a.gallery);
  const auto params = ParamsStore::load(a.params);
  const auto query = read_embedding(a.embedding);
  std::optional<std::string> truth;
  if (!a.truth.empty()) truth = a.truth;
  std::uint64_t dealer_seed = a.dealer_seed;
  if (a.secure && dealer_seed == 0) dealer_seed = std::random_device{}() | (std::uint64_t(std::random_device{}()) << 32);
  const auto result = a.secure ? query_1n_secure(query, gallery, provider_for(params), a.top, dealer_seed, truth)
                               : query_1n(query, gallery, provider_for(params), a.top, truth);
  print_result(result);
  return 0;
}

// ---------------------------------------------------------------------------
// dealer / smpc-serve / smpc-client

struct DealerArgs {
  std::size_t count = 0, dim = 0;
  std::uint64_t seed = 0;
  std::string client_out, server_out;
};

int run_dealer(const DealerArgs& a) {
  const auto dealt = smpc::dealer_make_triples(a.count, a.dim, a.seed);
  bytes::write_file(a.client_out, smpc::encode_triples(smpc::Party::Client, dealt.client));
  bytes::write_file(a.server_out, smpc::encode_triples(smpc::Party::Server, dealt.server));
  std::cout << "wrote " << a.count << " triples of dimension " << a.dim << "\n";
  return 0;
}

smpc::TripleStore load_triples(const std::string& path, smpc::Party expected) {
  auto [party, triples] = smpc::decode_triples(bytes::read_file(path));
  if (party != expected) throw FormatError(path + ": triple file belongs to the other party");
  return smpc::TripleStore(std::move(triples));
}

struct ServeArgs {
  std::string gallery, listen = "127.0.0.1:7070", triples;
  std::size_t sessions = 0;
};

int run_serve(const ServeArgs& a) {
  const auto gallery = Gallery::open(a.gallery);
  if (gallery.size() == 0) throw EmptyGallery("smpc-serve: gallery is empty");
  auto triples = load_triples(a.triples, smpc::Party::Server);
  smpc::SmpcServer server(gallery.enrolled_shares(), triples);
  smpc::TcpListener listener(smpc::parse_endpoint(a.listen));
  std::cout << "listening on " << smpc::parse_endpoint(a.listen).host << ":" << listener.port() << std::endl;
  std::vector<std::thread> workers;
  for (std::size_t n = 0; a.sessions == 0 || n < a.sessions; ++n) {
    auto ch = listener.accept();
    workers.emplace_back([&server, ch = std::move(ch)]() mutable {
      try {
        const auto compared = server.serve(ch);
        std::cerr << "session done: " << compared << " comparisons" << std::endl;
      } catch (const std::exception& e) {
        std::cerr << "session failed: " << e.what() << std::endl;
      }
    });
  }
  for (auto& w : workers) w.join();
  return 0;
}

struct ClientArgs {
  std::string connect = "127.0.0.1:7070", params, embedding, triples, truth;
  std::size_t top = 5;
};

// Writes back the triples this run did not use so the next run starts fresh.
void retire_used_triples(const std::string& path, const smpc::TripleStore& store, std::size_t used) {
  const auto& all = store.triples();
  std::vector<smpc::BeaverTripleShare> rest(all.begin() + std::ptrdiff_t(std::min(used, all.size())), all.end());
  if (rest.empty())
    std::filesystem::remove(path);
  else
    bytes::write_file(path, smpc::encode_triples(smpc::Party::Client, rest));
}

int run_client(const ClientArgs& a) {
  const auto params = ParamsStore::load(a.params);
  const auto ids = params.identities();
  auto triples = load_triples(a.triples, smpc::Party::Client);
  smpc::SmpcClient client(triples, RingRng::secure());
  auto ch = smpc::tcp_connect(smpc::parse_endpoint(a.connect));
  std::optional<std::string> truth;
  if (!a.truth.empty()) truth = a.truth;
  std::size_t used = ids.size();
  try {
    print_result(query_1n_remote(read_embedding(a.embedding), ids, provider_for(params), a.top, ch, client, truth));
  } catch (...) {
    retire_used_triples(a.triples, triples, used);
    throw;
  }
  retire_used_triples(a.triples, triples, used);
  return 0;
}

// ---------------------------------------------------------------------------
// selftest

int run_selftest() {
  int failures = 0;
  auto check = [&](const char* name, bool ok, const std::string& detail) {
    failures += !ok;
    std::printf("%s  %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  };
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> pix(0, 255);

  {
    double worst = 0, lo = 0, hi = 0;
    for (int i = 0; i < 3; ++i) {
      RasterImage img(64, 64, 3, ColorSpace::YCbCr);
      for (auto& v : img.data) v = pix(rng);
      const auto t = forward_bdct(img);
      for (double v : t.planes.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      const auto back = inverse_bdct(t);
      for (std::size_t k = 0; k < img.data.size(); ++k) worst = std::max(worst, std::abs(back.data[k] - img.data[k]));
    }
    check("bdct round trip", worst <= 1e-6, "max error " + std::to_string(worst));
    check("bdct bounds", lo >= -1024 && hi < 1024, "[" + std::to_string(lo) + ", " + std::to_string(hi) + ")");
  }
  {
    RasterImage img(64, 64, 3, ColorSpace::RGB);
    for (auto& v : img.data) v = pix(rng);
    PipelineConfig cfg;
    bool ok = true;
    for (auto s : {HybridScheme::FreqOnly63, HybridScheme::AddDlbp63, HybridScheme::MultDlbp63,
                   HybridScheme::ConcatDlbp126, HybridScheme::ConcatLbp66}) {
      cfg.scheme = s;
      const auto st = run_stages(img, cfg);
      ok = ok && st.ac.depth() == 189 && st.fused.depth() == 63 && st.output.planes.depth == scheme_depth(s);
      for (std::size_t i = 0; i < st.fused.height() * st.fused.width(); ++i)
        for (std::size_t f = 0; f < 63; ++f) {
          const double y = st.ac.planes.data[i * 189 + f], cb = st.ac.planes.data[i * 189 + 63 + f],
                       cr = st.ac.planes.data[i * 189 + 126 + f];
          const double m = std::max({std::abs(y), std::abs(cb), std::abs(cr)});
          ok = ok && std::abs(st.fused.planes.data[i * 63 + f]) == m;
        }
    }
    check("channel ledger and fusion", ok, "192 > 189 > 63 > {63, 66, 126}");
  }
  {
    ProtectParams p;
    p.coefficients = {2, -3, 4, 5, -1};
    p.exponents = {1, 2, 3, 4, 5};
    const std::vector<double> v = {0.5, -0.5, 0.25, 1.0, 2.0};
    const double got = protect(v, p).values[0];
    const bool lens = output_len(512, 5, 0) == 102 && output_len(512, 5, 4) == 508 && output_len(10, 5, 1) == 2;
    check("polynomial protection", got == -26.6875 && lens, "p1 = " + std::to_string(got));
  }
  {
    std::uniform_real_distribution<double> u(-8, 8);
    std::vector<double> a(256), b(256);
    for (auto& x : a) x = u(rng);
    for (auto& x : b) x = u(rng);
    std::vector<smpc::Candidate> cands = {{"a", a, {}}, {"b", a, {}}};
    const auto m = smpc::verify_session(cands, {smpc::make_enrolled_share("a", a), smpc::make_enrolled_share("b", b)}, 3);
    const double plain = cosine_distance(a, b);
    check("secure cosine", std::abs(m[0].distance) < 1e-3 && std::abs(m[1].distance - plain) < 1e-3,
          "self " + std::to_string(m[0].distance) + ", other " + std::to_string(m[1].distance) + " vs " +
              std::to_string(plain));
  }
  {
    bool ok = true;
    const std::vector<smpc::Word> w = {1, 2, ~smpc::Word(0)};
    for (const auto& f : {smpc::make_hello(1), smpc::make_triple_id(1, 2), smpc::make_words(smpc::MsgType::OpenD, 1, w),
                          smpc::make_words(smpc::MsgType::OpenE, 1, w), smpc::make_result_share(1, 5, 2.5),
                          smpc::make_error(1, "x"), smpc::make_bye(1)})
      ok = ok && smpc::decode_frame(smpc::encode_frame(f)) == f;
    check("wire round trip", ok, "7 frame types");
  }
  {
    HybridTensor zero{Tensor3(400, 250, 1), HybridScheme::FreqOnly63};
    const auto& d = apply_dp_noise(zero, parse_noise("laplace:1", 9)).planes.data;
    double mean = 0, var = 0;
    for (double v : d) mean += v;
    mean /= double(d.size());
    for (double v : d) var += (v - mean) * (v - mean);
    var /= double(d.size() - 1);
    check("laplace moments", std::abs(mean) < 0.03 && std::abs(var - 2.0) < 0.2,
          "mean " + std::to_string(mean) + ", variance " + std::to_string(var));
  }
  std::printf("%s\n", failures ? "selftest FAILED" : "selftest passed");
  return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid frequency-colour face representations, protected templates and secure matching"};
  app.require_subcommand(1);

  TransformArgs ta;
  auto* transform = app.add_subcommand("transform", "Image to hybrid frequency-colour tensor");
  transform->add_option("image", ta.image, "Input PNG or PPM image")->check(CLI::ExistingFile);
  transform->add_option("--out,-o", ta.out, "Output tensor path (default: IMAGE + suffix)");
  transform->add_option("--manifest", ta.manifest, "Text file of image paths, one per line")->check(CLI::ExistingFile);
  transform->add_option("--suffix", ta.suffix, "Output suffix in batch mode")->capture_default_str();
  transform->add_option("--threads", ta.threads, "Batch worker threads (0 = all cores)");
  transform->add_option("--scheme", ta.scheme, "freq | add | mult | concat-dlbp | concat-lbp")->capture_default_str();
  transform->add_option("--noise", ta.noise, "none | laplace:EPS | gauss:SIGMA")->capture_default_str();
  transform->add_option("--seed", ta.seed, "Noise seed");
  transform->add_option("--sensitivity", ta.sensitivity, "Laplace sensitivity")->capture_default_str();
  transform->add_option("--alpha", ta.alpha, "DLBP weight for the additive scheme")->capture_default_str();

  MetricsArgs ma;
  auto* metrics = app.add_subcommand("metrics", "PSNR/SSIM between a reference luma and a test plane");
  metrics->add_option("ref", ma.ref, "Reference image");
  metrics->add_option("test", ma.test, "Test image, or tensor with --plane");
  metrics->add_option("--plane", ma.plane, "Plane index when TEST is a tensor (min-max normalised)");
  metrics->add_option("--report", ma.report, "Full privacy report for this image")->check(CLI::ExistingFile);
  metrics->add_flag("--control", ma.control, "Append the luma-vs-luma control to the report");
  metrics->add_option("--records", ma.records, "Append JSON-lines records to this file");

  ProtectArgs pa;
  auto* prot = app.add_subcommand("protect", "Polynomial protection of an embedding");
  prot->add_option("--embedding,-e", pa.embedding, "Embedding file")->required()->check(CLI::ExistingFile);
  prot->add_option("--seed", pa.seed, "Identity seed")->required();
  prot->add_option("--overlap", pa.overlap, "Window overlap")->capture_default_str();
  prot->add_option("--window,-m", pa.window, "Window length")->capture_default_str();
  prot->add_option("--out,-o", pa.out, "Write the protected vector here");

  EnrollArgs ea;
  auto* enroll = app.add_subcommand("enroll", "Enrol one identity into a gallery store");
  enroll->add_option("--gallery,-g", ea.gallery, "Gallery store file")->required();
  enroll->add_option("--params,-p", ea.params, "Client-side parameter store")->required();
  enroll->add_option("--identity,-i", ea.identity, "Identity label")->required();
  enroll->add_option("--embedding,-e", ea.embedding, "Embedding file")->required()->check(CLI::ExistingFile);
  enroll->add_option("--seed", ea.seed, "Identity seed")->required();
  enroll->add_option("--overlap", ea.overlap, "Window overlap")->capture_default_str();

  QueryArgs qa;
  auto* query = app.add_subcommand("query", "1:N identification against a gallery");
  query->add_option("--gallery,-g", qa.gallery, "Gallery store file")->required()->check(CLI::ExistingFile);
  query->add_option("--params,-p", qa.params, "Client-side parameter store")->required()->check(CLI::ExistingFile);
  query->add_option("--embedding,-e", qa.embedding, "Query embedding")->required()->check(CLI::ExistingFile);
  query->add_option("--top,-k", qa.top, "Ranks to report")->capture_default_str();
  query->add_flag("--secure", qa.secure, "Compute distances with the two-party protocol");
  query->add_option("--dealer-seed", qa.dealer_seed, "Triple seed for --secure (default: random)");
  query->add_option("--truth", qa.truth, "Expected identity");

  DealerArgs da;
  auto* dealer = app.add_subcommand("dealer", "Generate Beaver triples for both parties");
  dealer->add_option("--count,-n", da.count, "Number of triples")->required();
  dealer->add_option("--dim,-d", da.dim, "Vector dimension")->required();
  dealer->add_option("--seed", da.seed, "Dealer seed")->required();
  dealer->add_option("--client-out", da.client_out, "Client triple file")->required();
  dealer->add_option("--server-out", da.server_out, "Server triple file")->required();

  ServeArgs sa;
  auto* serve = app.add_subcommand("smpc-serve", "Serve secure comparisons over TCP");
  serve->add_option("--gallery,-g", sa.gallery, "Gallery store file")->required()->check(CLI::ExistingFile);
  serve->add_option("--listen,-l", sa.listen, "host:port (port 0 picks a free port)")->capture_default_str();
  serve->add_option("--triples,-t", sa.triples, "Server triple file")->required()->check(CLI::ExistingFile);
  serve->add_option("--sessions", sa.sessions, "Exit after this many sessions (0 = run forever)");

  ClientArgs ca;
  auto* client = app.add_subcommand("smpc-client", "Secure 1:N query against an smpc-serve instance");
  client->add_option("--connect,-c", ca.connect, "host:port")->capture_default_str();
  client->add_option("--params,-p", ca.params, "Client-side parameter store")->required()->check(CLI::ExistingFile);
  client->add_option("--embedding,-e", ca.embedding, "Query embedding")->required()->check(CLI::ExistingFile);
  client->add_option("--triples,-t", ca.triples, "Client triple file; used triples are removed")
      ->required()
      ->check(CLI::ExistingFile);
  client->add_option("--top,-k", ca.top, "Ranks to report")->capture_default_str();
  client->add_option("--truth", ca.truth, "Expected identity");

  auto* selftest = app.add_subcommand("selftest", "Run the built-in invariant checks");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*transform) return run_transform(ta);
    if (*metrics) return run_metrics(ma);
    if (*prot) return run_protect(pa);
    if (*enroll) return run_enroll(ea);
    if (*query) return run_query(qa);
    if (*dealer) return run_dealer(da);
    if (*serve) return run_serve(sa);
    if (*client) return run_client(ca);
    if (*selftest) return run_selftest();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
