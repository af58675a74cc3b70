// hpctk/hpctk_main.cc

// Copyright 2026  The hpctk authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hpctk/corpus.h"
#include "hpctk/error.h"
#include "hpctk/eval.h"
#include "hpctk/hpc.h"
#include "hpctk/transfer.h"
#include "hpctk/waveform.h"

namespace {

using namespace hpctk;

// All outputs go through a temp-file + rename so concurrent pipelines never
// see partial files.
void WriteFileAtomic(const std::string &path, const std::string &content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open output file: " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("failed to write: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

struct CommonOptions {
  std::string hierarchy = "hpc0";
  std::string stats_path;
  double f0_min = 55.0;
  double f0_max = 500.0;

  PitchConfig Pitch() const {
    PitchConfig cfg;
    cfg.f0_min = f0_min;
    cfg.f0_max = f0_max;
    return cfg;
  }
};

void AddCommonFlags(CLI::App *cmd, CommonOptions *opts, bool stats_required) {
  cmd->add_option("--hierarchy", opts->hierarchy,
                  "Hierarchy preset: hpc0, hpc1 or hpc2")
      ->check(CLI::IsMember({"hpc0", "hpc1", "hpc2"}));
  auto *stats = cmd->add_option("--stats", opts->stats_path,
                                "Corpus statistics JSON file");
  if (stats_required) stats->required();
  cmd->add_option("--f0-min", opts->f0_min, "Pitch search floor in Hz");
  cmd->add_option("--f0-max", opts->f0_max, "Pitch search ceiling in Hz");
}

void PrintSanityWarnings(const std::string &path,
                         const UtteranceAlignment &align) {
  for (const auto &w : AlignmentSanity(align))
    std::cerr << "warning: " << path << ": " << w.message << "\n";
}

int RunExtract(const std::string &wav_path, const std::string &align_path,
               const std::string &out_path, const CommonOptions &opts,
               const std::string &speaker, const std::string &format) {
  const Waveform wav = LoadWav(wav_path);
  const UtteranceAlignment align = LoadAlignmentFile(align_path);
  PrintSanityWarnings(align_path, align);
  const HierarchySpec hierarchy = HierarchySpec::Preset(opts.hierarchy);
  const SpeakerMode mode =
      speaker.empty() ? SpeakerMode::Unseen() : SpeakerMode::Seen(speaker);

  HpcMatrix m;
  if (opts.stats_path.empty()) {
    if (!speaker.empty())
      throw Error("--speaker requires --stats (the speaker median table)");
    m.values = ExtractRawHpc(wav, align, hierarchy, mode, nullptr,
                             opts.Pitch());
    m.hierarchy = hierarchy;
    m.normalized = false;
  } else {
    const CorpusStats stats = LoadCorpusStats(opts.stats_path);
    m = ExtractHpc(wav, align, hierarchy, stats, mode, opts.Pitch());
  }
  WriteFileAtomic(out_path,
                  format == "json" ? HpcMatrixToJson(m) : HpcMatrixToCsv(m));
  return 0;
}

int RunStats(const std::string &manifest_path, const std::string &out_path,
             const CommonOptions &opts, int jobs) {
  const auto entries = ReadManifest(manifest_path);
  const CorpusStats stats = BuildCorpusStats(
      entries, HierarchySpec::Preset(opts.hierarchy), opts.Pitch(), jobs);
  WriteFileAtomic(out_path, CorpusStatsToJson(stats));
  return 0;
}

int RunTransfer(const std::string &src_wav_path, const std::string &src_align_path,
                const std::string &car_wav_path, const std::string &car_align_path,
                const std::string &out_wav_path, const std::string &plan_path,
                const CommonOptions &opts, const std::string &mode_name) {
  const Waveform source = LoadWav(src_wav_path);
  const UtteranceAlignment source_align = LoadAlignmentFile(src_align_path);
  const Waveform carrier = LoadWav(car_wav_path);
  const UtteranceAlignment carrier_align = LoadAlignmentFile(car_align_path);
  PrintSanityWarnings(src_align_path, source_align);
  PrintSanityWarnings(car_align_path, carrier_align);
  const CorpusStats stats = LoadCorpusStats(opts.stats_path);
  const TransferMode mode = TransferModeFromName(mode_name);

  std::vector<std::string> target;
  for (int pi : carrier_align.NonSilencePhones())
    target.push_back(carrier_align.phones[pi].label);

  std::vector<std::string> warnings;
  const TransferPlan plan =
      PlanTransfer(source, source_align, target, mode,
                   HierarchySpec::Preset(opts.hierarchy), stats, opts.Pitch(),
                   &warnings);
  for (const auto &w : warnings) std::cerr << "warning: " << w << "\n";

  const TransplantResult result =
      Transplant(carrier, carrier_align, plan, opts.Pitch());
  WriteFileAtomic(out_wav_path, EncodeWav(result.audio));
  if (!plan_path.empty()) WriteFileAtomic(plan_path, TransferPlanToJson(plan));
  return 0;
}

int RunCompare(const std::vector<std::string> &files,
               const std::string &out_path, const CommonOptions &opts,
               const std::string &format, const std::string &batch_path,
               int jobs) {
  const HierarchySpec hierarchy = HierarchySpec::Preset(opts.hierarchy);
  const CorpusStats stats = LoadCorpusStats(opts.stats_path);

  if (!batch_path.empty()) {
    std::ifstream in(batch_path);
    if (!in) throw Error("cannot open pair list: " + batch_path);
    const std::filesystem::path base =
        std::filesystem::path(batch_path).parent_path();
    const auto resolve = [&](std::string p) {
      const std::filesystem::path fp(p);
      return fp.is_absolute() ? fp.string() : (base / fp).string();
    };
    struct Pair {
      std::string a_wav, a_align, b_wav, b_align;
    };
    std::vector<Pair> pairs;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::stringstream ss(line);
      std::vector<std::string> f;
      std::string field;
      while (std::getline(ss, field, ',')) f.push_back(field);
      if (f.size() != 4)
        throw Error(batch_path +
                    ": pair lines must be 'a_wav,a_align,b_wav,b_align'");
      pairs.push_back({resolve(f[0]), resolve(f[1]), resolve(f[2]),
                       resolve(f[3])});
    }
    std::vector<SimilarityReport> reports(pairs.size());
    RunParallel(static_cast<int>(pairs.size()), jobs, [&](int i) {
      const Pair &p = pairs[i];
      reports[i] = CompareProsody(
          LoadWav(p.a_wav), LoadAlignmentFile(p.a_align), LoadWav(p.b_wav),
          LoadAlignmentFile(p.b_align), hierarchy, stats, opts.Pitch());
    });
    std::ostringstream csv;
    csv << "a_wav,b_wav,f0_correlation,duration_rmse,hpc_distance,overall\n";
    for (size_t i = 0; i < pairs.size(); ++i) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g",
                    reports[i].f0_correlation, reports[i].duration_rmse,
                    reports[i].hpc_distance, reports[i].overall);
      csv << pairs[i].a_wav << ',' << pairs[i].b_wav << ',' << buf << '\n';
    }
    WriteFileAtomic(out_path, csv.str());
    return 0;
  }

  const SimilarityReport r = CompareProsody(
      LoadWav(files[0]), LoadAlignmentFile(files[1]), LoadWav(files[2]),
      LoadAlignmentFile(files[3]), hierarchy, stats, opts.Pitch());
  const std::string text =
      format == "json" ? SimilarityReportToJson(r) : SimilarityReportToText(r);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    WriteFileAtomic(out_path, text);
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Hierarchical prosody control toolkit: extraction, corpus "
               "statistics, parallel prosody transfer and objective "
               "similarity metrics"};
  app.require_subcommand(1);

  // extract
  auto *extract = app.add_subcommand(
      "extract", "Extract an HPC matrix from a wav + alignment");
  std::string ex_wav, ex_align, ex_out, ex_speaker, ex_format = "csv";
  CommonOptions ex_opts;
  extract->add_option("wav", ex_wav, "Input wav file")->required();
  extract->add_option("alignment", ex_align, "TextGrid or alignment JSON")
      ->required();
  extract->add_option("-o,--output", ex_out, "Output matrix file")->required();
  AddCommonFlags(extract, &ex_opts, false);
  extract->add_option("--speaker", ex_speaker,
                      "Seen-speaker id (default: unseen mode)");
  extract->add_option("--format", ex_format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));

  // stats
  auto *stats_cmd = app.add_subcommand(
      "stats", "Compute corpus statistics from a manifest");
  std::string st_manifest, st_out;
  CommonOptions st_opts;
  int st_jobs = 1;
  stats_cmd->add_option("manifest", st_manifest,
                        "CSV manifest: speaker_id,wav_path,textgrid_path")
      ->required();
  stats_cmd->add_option("-o,--output", st_out, "Output stats JSON")->required();
  AddCommonFlags(stats_cmd, &st_opts, false);
  stats_cmd->add_option("--jobs", st_jobs, "Parallel workers");

  // transfer
  auto *transfer = app.add_subcommand(
      "transfer", "Transfer prosody from a source recording onto a carrier");
  std::string tr_src_wav, tr_src_align, tr_car_wav, tr_car_align;
  std::string tr_out, tr_plan, tr_mode = "d1";
  CommonOptions tr_opts;
  transfer->add_option("source_wav", tr_src_wav, "Source wav")->required();
  transfer->add_option("source_alignment", tr_src_align, "Source alignment")
      ->required();
  transfer->add_option("carrier_wav", tr_car_wav, "Carrier wav")->required();
  transfer->add_option("carrier_alignment", tr_car_align, "Carrier alignment")
      ->required();
  transfer->add_option("-o,--output", tr_out, "Output wav")->required();
  transfer->add_option("--plan", tr_plan, "Also write the transfer plan JSON");
  AddCommonFlags(transfer, &tr_opts, true);
  transfer->add_option("--mode", tr_mode, "d0 = HPC import, d1 = HPC and "
                       "duration import")
      ->check(CLI::IsMember({"d0", "d1"}));

  // compare
  auto *compare = app.add_subcommand(
      "compare", "Objective prosody similarity between parallel utterances");
  std::vector<std::string> cp_files;
  std::string cp_out, cp_format = "text", cp_batch;
  CommonOptions cp_opts;
  int cp_jobs = 1;
  compare->add_option("files", cp_files,
                      "a_wav a_alignment b_wav b_alignment")
      ->expected(0, 4);
  compare->add_option("-o,--output", cp_out, "Output file (default: stdout)");
  AddCommonFlags(compare, &cp_opts, true);
  compare->add_option("--format", cp_format, "Report format")
      ->check(CLI::IsMember({"json", "text"}));
  compare->add_option("--batch", cp_batch,
                      "CSV of utterance pairs; writes one CSV row per pair");
  compare->add_option("--jobs", cp_jobs, "Parallel workers (batch mode)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (extract->parsed())
      return RunExtract(ex_wav, ex_align, ex_out, ex_opts, ex_speaker,
                        ex_format);
    if (stats_cmd->parsed()) return RunStats(st_manifest, st_out, st_opts,
                                             st_jobs);
    if (transfer->parsed())
      return RunTransfer(tr_src_wav, tr_src_align, tr_car_wav, tr_car_align,
                         tr_out, tr_plan, tr_opts, tr_mode);
    if (compare->parsed()) {
      if (cp_batch.empty() && cp_files.size() != 4)
        throw Error("compare needs four positional files or --batch");
      if (!cp_batch.empty() && cp_out.empty())
        throw Error("batch compare requires -o");
      return RunCompare(cp_files, cp_out, cp_opts, cp_format, cp_batch,
                        cp_jobs);
    }
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
