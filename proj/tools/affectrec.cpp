// Copyright 2026 The affectrec Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// affectrec: operator entry points for the whole pipeline.
//
// Exit codes: 0 success, 2 input error, 3 domain error, 4 integrity error.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <pthread.h>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "affectrec/affectrec.hpp"
#include "affectrec/service/http.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace affectrec;

namespace {

struct Common {
  bool json_output = false;
};

// --- shared helpers ---------------------------------------------------------

void require_file(const std::string& path, const char* what) {
  if (!fs::exists(path)) fail(ErrorKind::io, std::string(what) + " not found: " + path);
}

LoadOptions load_options(const std::string& lexicon_path, bool stability_filter,
                         std::optional<VALexicon>& lexicon) {
  LoadOptions opts;
  opts.apply_stability_filter = stability_filter;
  if (!lexicon_path.empty()) {
    require_file(lexicon_path, "lexicon");
    lexicon = VALexicon::load(lexicon_path);
    opts.lexicon = &*lexicon;
  }
  return opts;
}

Catalog open_catalog(const std::string& music, const std::string& paintings, const std::string& lexicon_path,
                     bool stability_filter) {
  require_file(music, "music catalog");
  require_file(paintings, "painting catalog");
  std::optional<VALexicon> lexicon;
  return load_catalog(music, paintings, load_options(lexicon_path, stability_filter, lexicon));
}

std::unordered_set<std::string> read_allowlist(const std::string& path) {
  require_file(path, "allowlist");
  std::ifstream in(path);
  std::unordered_set<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    const auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    ids.insert(line.substr(start));
  }
  return ids;
}

json parse_json_file(const std::string& path, const char* what) {
  require_file(path, what);
  try {
    return json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    fail(ErrorKind::parse, path + ": " + e.what());
  }
}

/// Accepts [{"item_id", "rating", "attention_check"?}] or {"ratings": [...]}.
std::vector<PreferenceRating> read_ratings(const std::string& path) {
  json j = parse_json_file(path, "ratings file");
  if (j.is_object() && j.contains("ratings")) j = j["ratings"];
  require(j.is_array(), ErrorKind::parse, path + ": expected an array of ratings");
  std::vector<PreferenceRating> out;
  for (const auto& r : j) {
    require(r.is_object() && r.contains("item_id") && r["item_id"].is_string() && r.contains("rating") &&
                r["rating"].is_number_integer(),
            ErrorKind::parse, path + ": each rating needs 'item_id' and integer 'rating'");
    PreferenceRating pr{r["item_id"].get<std::string>(), r["rating"].get<int>(),
                        r.value("attention_check", false)};
    validate_rating(pr);
    out.push_back(std::move(pr));
  }
  return out;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    io::write_file(path, text);
  }
}

fs::path index_path(const fs::path& dir, Engine e) { return dir / (std::string(to_string(e)) + ".afix"); }

std::vector<Engine> engines_from(const std::string& list) {
  if (list == "all") return {std::begin(kAllEngines), std::end(kAllEngines)};
  std::vector<Engine> out;
  std::stringstream in(list);
  std::string name;
  while (std::getline(in, name, ',')) out.push_back(parse_engine(name));
  require(!out.empty(), ErrorKind::invalid_parameter, "no engine selected");
  return out;
}

// --- subcommands ------------------------------------------------------------

struct SynthArgs {
  SynthConfig cfg;
  std::string out;
};

int cmd_synth(const SynthArgs& a, const Common& c) {
  const Catalog cat = synth_catalog(a.cfg);
  const fs::path dir(a.out);
  save_records(dir / "music.jsonl", cat.music());
  save_records(dir / "paintings.jsonl", cat.paintings());
  if (c.json_output) {
    std::cout << json{{"music", (dir / "music.jsonl").string()},
                      {"paintings", (dir / "paintings.jsonl").string()},
                      {"n_music", cat.music().size()},
                      {"n_paintings", cat.paintings().size()}}
                     .dump()
              << "\n";
  } else {
    std::cout << "wrote " << cat.music().size() << " music and " << cat.paintings().size()
              << " painting records to " << dir.string() << "\n";
  }
  return 0;
}

struct PreprocessArgs {
  std::string music, paintings, lexicon, out;
  bool no_stability_filter = false;
  std::uint64_t seed = 0;
  double sigma = 0.5, margin = 0.5, step_size = 1e-3;
  int epochs = 50, patience = 5, batch = 64;
  std::vector<int> ae_hidden{1024, 512};
  int embed_dim = 256, proj_hidden = 256, joint_dim = 128;
};

int cmd_preprocess(const PreprocessArgs& a, const Common& c) {
  PipelineConfig cfg;
  cfg.ae_hidden = a.ae_hidden;
  cfg.embed_dim = a.embed_dim;
  cfg.adam.step_size = a.step_size;
  cfg.autoencoder_train.max_epochs = a.epochs;
  cfg.autoencoder_train.patience = a.patience;
  cfg.autoencoder_train.batch_size = a.batch;
  cfg.projection.sigma = a.sigma;
  cfg.projection.margin = a.margin;
  cfg.projection.hidden_dim = a.proj_hidden;
  cfg.projection.joint_dim = a.joint_dim;
  cfg.projection.adam = cfg.adam;
  cfg.projection.train = cfg.autoencoder_train;
  cfg = cfg.seeded(a.seed);
  require(a.embed_dim > 0 && std::all_of(a.ae_hidden.begin(), a.ae_hidden.end(), [](int d) { return d > 0; }),
          ErrorKind::invalid_parameter, "layer sizes must be positive");
  cfg.autoencoder_train.validate();
  cfg.adam.validate();
  cfg.projection.validate();

  const Catalog cat = open_catalog(a.music, a.paintings, a.lexicon, !a.no_stability_filter);
  const PreprocessedBundle bundle = preprocess_cdr(cat, cfg);
  save_bundle(a.out, bundle);

  const json manifest = json::parse(io::read_file(fs::path(a.out) / "manifest.json"));
  if (c.json_output) {
    std::cout << json{{"bundle", a.out}, {"files", manifest["files"]},
                      {"modality_weights",
                       {{"music", bundle.provenance.at("lambda_music")},
                        {"painting", bundle.provenance.at("lambda_painting")}}}}
                     .dump()
              << "\n";
  } else {
    std::cout << "bundle " << a.out << " (" << bundle.music_ids.size() << " music, "
              << bundle.painting_ids.size() << " paintings)\n";
    for (const auto& [name, sum] : manifest["files"].items()) {
      std::printf("  %-36s %s\n", name.c_str(), sum.get<std::string>().c_str());
    }
  }
  return 0;
}

struct BuildArgs {
  std::string bundle, music, paintings, lexicon, out, engine = "all", salieri_metric = "cosine";
  bool dump_csv = false;
};

int cmd_build_index(const BuildArgs& a, const Common& c) {
  const auto engines = engines_from(a.engine);
  const auto metric = a.salieri_metric == "euclidean" ? SalieriMetric::euclidean : SalieriMetric::cosine;
  std::optional<PreprocessedBundle> bundle;
  std::optional<Catalog> catalog;
  if (!a.bundle.empty()) {
    require_file(a.bundle, "bundle directory");
    bundle = load_bundle(a.bundle);
  } else {
    require(!a.music.empty() && !a.paintings.empty(), ErrorKind::invalid_parameter,
            "build-index needs --bundle, or --music and --paintings for haydn/visual");
    catalog = open_catalog(a.music, a.paintings, a.lexicon, true);
  }

  json report = json::array();
  for (Engine e : engines) {
    SimilarityIndex index;
    if (bundle) {
      index = build_index(e, *bundle, metric);
    } else if (e == Engine::haydn) {
      index = build_haydn_index(*catalog);
    } else if (e == Engine::visual) {
      index = build_visual_index(catalog->ids(Modality::painting), catalog->features(Modality::painting));
    } else {
      fail(ErrorKind::invalid_parameter,
           "engine '" + std::string(to_string(e)) + "' needs a preprocessed --bundle");
    }
    const fs::path path = index_path(a.out, e);
    save_index(path, index);
    report.push_back({{"engine", std::string(to_string(e))},
                      {"path", path.string()},
                      {"rows", index.row_ids().size()},
                      {"cols", index.col_ids().size()}});
    if (a.dump_csv) {
      std::cout << index_to_csv(index);
    } else if (!c.json_output) {
      std::cout << "wrote " << path.string() << " (" << index.row_ids().size() << " x " << index.col_ids().size()
                << ")\n";
    }
  }
  if (c.json_output && !a.dump_csv) std::cout << report.dump() << "\n";
  return 0;
}

struct RecommendArgs {
  std::string index, ratings, paintings, lexicon, allowlist;
  std::size_t n = 3;
  bool no_curate = false;
};

/// Candidate restriction identical to the service's: curated paintings,
/// intersected with the allowlist when one is given.
std::optional<std::unordered_set<std::string>> candidate_set(const std::string& paintings_path,
                                                             const std::string& lexicon_path,
                                                             const std::string& allowlist_path, bool curate) {
  if (paintings_path.empty() && allowlist_path.empty()) return std::nullopt;
  std::optional<std::unordered_set<std::string>> allow;
  if (!allowlist_path.empty()) allow = read_allowlist(allowlist_path);
  if (paintings_path.empty()) return allow;
  require_file(paintings_path, "painting catalog");
  std::optional<VALexicon> lexicon;
  const auto file = read_records(paintings_path, Modality::painting, load_options(lexicon_path, true, lexicon));
  std::unordered_set<std::string> out;
  for (const auto& r : file.records) {
    if (curate && !therapeutic_curation_filter(r.va)) continue;
    if (allow && !allow->contains(r.id)) continue;
    out.insert(r.id);
  }
  return out;
}

int cmd_recommend(const RecommendArgs& a, const Common& c) {
  require_file(a.index, "index");
  const SimilarityIndex index = load_index(a.index);
  const auto ratings = read_ratings(a.ratings);
  RecommendOptions opts;
  opts.allowed = candidate_set(a.paintings, a.lexicon, a.allowlist, !a.no_curate);
  const RecommendationList list = recommend(index, ratings, a.n, opts);
  if (c.json_output) {
    std::cout << to_json(list).dump() << "\n";
    return 0;
  }
  std::printf("%-6s %-24s %s\n", "rank", "painting", "aggregate");
  for (std::size_t i = 0; i < list.entries.size(); ++i) {
    std::printf("%-6zu %-24s %.9f\n", i + 1, list.entries[i].painting_id.c_str(), list.entries[i].aggregate_distance);
  }
  if (list.truncated) std::printf("(only %zu candidates)\n", list.entries.size());
  return 0;
}

struct OverlapArgs {
  std::string index_a, index_b, ratings;
  std::size_t k = 3;
};

int cmd_overlap(const OverlapArgs& a, const Common& c) {
  require_file(a.index_a, "index");
  require_file(a.index_b, "index");
  const auto ia = load_index(a.index_a);
  const auto ib = load_index(a.index_b);
  const auto ratings = read_ratings(a.ratings);
  auto report = ranking_overlap(full_ranking(ia, ratings), full_ranking(ib, ratings), a.k);
  report.label_a = std::string(to_string(ia.engine()));
  report.label_b = std::string(to_string(ib.engine()));
  std::cout << (c.json_output ? to_json(report).dump() + "\n" : to_text(report));
  return 0;
}

struct ProbeArgs {
  std::string index, music, paintings, lexicon;
};

int cmd_probe(const ProbeArgs& a, const Common& c) {
  require_file(a.index, "index");
  const auto index = load_index(a.index);
  const Catalog cat = open_catalog(a.music, a.paintings, a.lexicon, true);
  const auto report = retrieval_probe(index, cat.cluster_labels());
  std::cout << (c.json_output ? to_json(report).dump() + "\n" : to_text(report));
  return 0;
}

struct ExportArgs {
  std::string index, log, out;
};

int cmd_export_csv(const ExportArgs& a, const Common&) {
  require_file(a.index, "index");
  write_output(a.out, index_to_csv(load_index(a.index)));
  return 0;
}

int cmd_export_sessions(const ExportArgs& a, const Common&) {
  require_file(a.log, "event log");
  json out = json::object();
  for (const auto& [id, s] : service::replay(service::EventLog::read(a.log))) out[id] = service::to_json(s);
  write_output(a.out, out.dump(2) + "\n");
  return 0;
}

struct ServeArgs {
  std::string listen = "127.0.0.1:8080", indices, engine = "all", music, paintings, lexicon, allowlist, log;
  bool no_curate_music = false;
};

std::pair<std::string, int> split_listen(const std::string& listen) {
  const auto colon = listen.rfind(':');
  require(colon != std::string::npos, ErrorKind::invalid_parameter, "--listen expects host:port");
  int port = -1;
  try {
    port = std::stoi(listen.substr(colon + 1));
  } catch (const std::exception&) {
  }
  require(port >= 0 && port <= 65535, ErrorKind::invalid_parameter, "invalid port in --listen");
  return {listen.substr(0, colon), port};
}

int cmd_serve(const ServeArgs& a, const Common&) {
  const auto [host, port] = split_listen(a.listen);
  const auto engines = engines_from(a.engine);
  require(!a.log.empty(), ErrorKind::invalid_parameter, "--log is required");

  // Refuse to start unless every requested index is present and valid.
  std::map<Engine, SimilarityIndex> indices;
  for (Engine e : engines) {
    const fs::path p = index_path(a.indices, e);
    if (!fs::exists(p)) fail(ErrorKind::io, "index for engine '" + std::string(to_string(e)) + "' not found: " + p.string());
    indices.emplace(e, load_index(p));
  }
  Catalog cat = open_catalog(a.music, a.paintings, a.lexicon, true);
  for (const auto& [e, index] : indices) {
    for (const auto& id : index.row_ids()) {
      require(cat.find(id) != nullptr, ErrorKind::integrity,
              std::string(to_string(e)) + " index row '" + id + "' is not in the catalog");
    }
  }

  service::ServiceOptions opts;
  opts.curate_music = !a.no_curate_music;
  if (!a.allowlist.empty()) opts.painting_allowlist = read_allowlist(a.allowlist);

  std::vector<json> previous;
  if (fs::exists(a.log)) previous = service::EventLog::read(a.log);
  auto log = std::make_shared<service::EventLog>(a.log);
  service::SessionService svc(std::move(cat), std::move(indices), log, opts);
  svc.restore(previous);

  httplib::Server server;
  service::mount_routes(server, svc);
  const int bound = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) fail(ErrorKind::io, "cannot listen on " + a.listen);

  // Signals were blocked in main; this thread turns them into a clean stop.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
  });

  std::printf("listening on %s:%d\n", host.c_str(), bound);
  std::fflush(stdout);
  server.listen_after_bind();
  // listen_after_bind also returns if the socket fails; wake the waiter.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  log->flush();
  std::printf("stopped; event log flushed to %s\n", a.log.c_str());
  return 0;
}

int report_error(const Common& c, const std::string& code, const std::string& message, int exit_code) {
  if (c.json_output) {
    std::cerr << json{{"error", {{"code", code}, {"message", message}}}}.dump() << "\n";
  } else {
    std::cerr << "error (" << code << "): " << message << "\n";
  }
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  // Block termination signals before any thread starts so serve's waiter
  // thread is the only one that receives them.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  // The subcommand is the first argument that is not a global flag.
  bool serving = false;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]).rfind("--", 0) == 0) continue;
    serving = std::string(argv[i]) == "serve";
    break;
  }
  if (serving) pthread_sigmask(SIG_BLOCK, &set, nullptr);

  CLI::App app{"affect-aware cross-domain recommendation pipeline"};
  app.require_subcommand(1);
  Common common;
  app.add_flag("--json", common.json_output, "machine-readable output");

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "write a synthetic clustered catalog");
  s->add_option("--seed", synth.cfg.seed);
  s->add_option("--music-count", synth.cfg.n_music)->check(CLI::PositiveNumber);
  s->add_option("--painting-count", synth.cfg.n_paintings)->check(CLI::PositiveNumber);
  s->add_option("--clusters", synth.cfg.n_clusters)->check(CLI::PositiveNumber);
  s->add_option("--music-dim", synth.cfg.feature_dim_m)->check(CLI::PositiveNumber);
  s->add_option("--painting-dim", synth.cfg.feature_dim_p)->check(CLI::PositiveNumber);
  s->add_option("--text-dim", synth.cfg.text_dim)->check(CLI::NonNegativeNumber);
  s->add_option("--va-noise", synth.cfg.va_noise)->check(CLI::NonNegativeNumber);
  s->add_option("--feature-noise", synth.cfg.feature_noise)->check(CLI::NonNegativeNumber);
  s->add_option("--out", synth.out, "output directory")->required();

  PreprocessArgs pre;
  auto* p = app.add_subcommand("preprocess", "train autoencoders and projection head, write a bundle");
  p->add_option("--music", pre.music)->required();
  p->add_option("--paintings", pre.paintings)->required();
  p->add_option("--lexicon", pre.lexicon, "word-level V-A lexicon (TSV) for emotion-labelled records");
  p->add_flag("--no-stability-filter", pre.no_stability_filter);
  p->add_option("--seed", pre.seed);
  p->add_option("--sigma", pre.sigma);
  p->add_option("--margin", pre.margin);
  p->add_option("--epochs", pre.epochs);
  p->add_option("--patience", pre.patience);
  p->add_option("--batch-size", pre.batch);
  p->add_option("--step-size", pre.step_size);
  p->add_option("--ae-hidden", pre.ae_hidden, "autoencoder hidden widths")->delimiter(',');
  p->add_option("--embed-dim", pre.embed_dim);
  p->add_option("--proj-hidden", pre.proj_hidden);
  p->add_option("--joint-dim", pre.joint_dim);
  p->add_option("--out", pre.out, "bundle directory")->required();

  BuildArgs build;
  auto* b = app.add_subcommand("build-index", "write AFIX similarity indices");
  b->add_option("--bundle", build.bundle);
  b->add_option("--music", build.music, "catalog for haydn/visual without a bundle");
  b->add_option("--paintings", build.paintings);
  b->add_option("--lexicon", build.lexicon);
  b->add_option("--engine", build.engine, "all or a comma list of mozart,haydn,salieri,visual");
  b->add_option("--salieri-metric", build.salieri_metric)->check(CLI::IsMember({"cosine", "euclidean"}));
  b->add_flag("--dump-csv", build.dump_csv, "print each index as CSV");
  b->add_option("--out", build.out, "index directory")->required();

  RecommendArgs rec;
  auto* r = app.add_subcommand("recommend", "rank paintings for a ratings file");
  r->add_option("--index", rec.index)->required();
  r->add_option("--ratings", rec.ratings)->required();
  r->add_option("--n", rec.n)->check(CLI::PositiveNumber);
  r->add_option("--paintings", rec.paintings, "restrict candidates to curated paintings of this catalog");
  r->add_option("--lexicon", rec.lexicon);
  r->add_option("--allowlist", rec.allowlist);
  r->add_flag("--no-curate", rec.no_curate, "skip the curation filter on candidates");

  auto* ev = app.add_subcommand("evaluate", "offline comparison reports");
  ev->require_subcommand(1);
  OverlapArgs ov;
  auto* evo = ev->add_subcommand("overlap", "top-k overlap of two engines for one ratings file");
  evo->add_option("--index-a", ov.index_a)->required();
  evo->add_option("--index-b", ov.index_b)->required();
  evo->add_option("--ratings", ov.ratings)->required();
  evo->add_option("--k", ov.k)->check(CLI::PositiveNumber);
  ProbeArgs pr;
  auto* evp = ev->add_subcommand("probe", "cluster retrieval accuracy of an index");
  evp->add_option("--index", pr.index)->required();
  evp->add_option("--music", pr.music)->required();
  evp->add_option("--paintings", pr.paintings)->required();
  evp->add_option("--lexicon", pr.lexicon);

  auto* ex = app.add_subcommand("export", "export indices or sessions");
  ex->require_subcommand(1);
  ExportArgs exa;
  auto* exc = ex->add_subcommand("csv", "index as CSV");
  exc->add_option("--index", exa.index)->required();
  exc->add_option("--out", exa.out);
  auto* exs = ex->add_subcommand("sessions", "replay an event log into session records");
  exs->add_option("--log", exa.log)->required();
  exs->add_option("--out", exa.out);

  ServeArgs srv;
  auto* sv = app.add_subcommand("serve", "run the HTTP session service");
  sv->add_option("--listen", srv.listen, "host:port; port 0 picks a free port")->envname("AFFECTREC_LISTEN");
  sv->add_option("--indices", srv.indices, "directory of <engine>.afix files")->required()->envname("AFFECTREC_INDICES");
  sv->add_option("--engine", srv.engine);
  sv->add_option("--music", srv.music)->required()->envname("AFFECTREC_MUSIC");
  sv->add_option("--paintings", srv.paintings)->required()->envname("AFFECTREC_PAINTINGS");
  sv->add_option("--lexicon", srv.lexicon);
  sv->add_option("--allowlist", srv.allowlist)->envname("AFFECTREC_ALLOWLIST");
  sv->add_option("--log", srv.log)->required()->envname("AFFECTREC_LOG");
  sv->add_flag("--no-curate-music", srv.no_curate_music);

  // Lets the global --json flag appear after the subcommand too.
  for (auto* sub : {s, p, b, r, ev, evo, evp, ex, exc, exs, sv}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorCategory::input);
  }

  try {
    if (*s) return cmd_synth(synth, common);
    if (*p) return cmd_preprocess(pre, common);
    if (*b) return cmd_build_index(build, common);
    if (*r) return cmd_recommend(rec, common);
    if (*evo) return cmd_overlap(ov, common);
    if (*evp) return cmd_probe(pr, common);
    if (*exc) return cmd_export_csv(exa, common);
    if (*exs) return cmd_export_sessions(exa, common);
    if (*sv) return cmd_serve(srv, common);
  } catch (const Error& e) {
    return report_error(common, std::string(to_string(e.kind())), e.what(), static_cast<int>(e.category()));
  } catch (const fs::filesystem_error& e) {
    return report_error(common, "io", e.what(), static_cast<int>(ErrorCategory::input));
  } catch (const json::exception& e) {
    return report_error(common, "parse", e.what(), static_cast<int>(ErrorCategory::input));
  } catch (const std::exception& e) {
    return report_error(common, "internal", e.what(), 1);
  }
  return 0;
}
