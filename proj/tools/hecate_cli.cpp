// hecate command-line frontend: pack/unpack/list/slice, referential
// diff+apply, and a wall-clock benchmark harness.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hecate/hecate.hpp"

namespace {

hecate::Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) hecate::fail(hecate::Errc::io_error, "cannot open " + path);
  in.seekg(0, std::ios::end);
  std::streamoff len = in.tellg();
  in.seekg(0);
  hecate::Bytes data(static_cast<std::size_t>(len));
  if (len > 0) in.read(reinterpret_cast<char*>(data.data()), len);
  if (!in) hecate::fail(hecate::Errc::io_error, "cannot read " + path);
  return data;
}

void write_file(const std::string& path, hecate::ByteView data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) hecate::fail(hecate::Errc::io_error, "cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out) hecate::fail(hecate::Errc::io_error, "cannot write " + path);
}

hecate::CodecId nuc_codec_from_name(const std::string& name) {
  if (name == "bwt") return hecate::CodecId::bwt_cm;
  if (name == "mix") return hecate::CodecId::markov_mix;
  if (name == "lz") return hecate::CodecId::lz_ext;
  if (name == "raw") return hecate::CodecId::raw;
  hecate::fail(hecate::Errc::invalid_config, "unknown nucleotide codec: " + name);
}

double now_ns() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::nano>(clock::now().time_since_epoch()).count();
}

struct PackFlags {
  std::string nuc_codec = "bwt";
  std::string profile = "lite";
  std::uint64_t block_size = hecate::kDefaultBlockSize;
  unsigned threads = 1;

  hecate::CompressConfig config() const {
    hecate::CompressConfig cfg;
    cfg.nuc = nuc_codec_from_name(nuc_codec);
    cfg.profile = profile == "full" ? hecate::MixProfile::full : hecate::MixProfile::lite;
    cfg.block_size = block_size;
    cfg.threads = threads;
    return cfg;
  }
};

void add_pack_flags(CLI::App* cmd, PackFlags& pf) {
  cmd->add_option("--nuc-codec", pf.nuc_codec, "nucleotide codec: bwt|mix|lz|raw")
      ->check(CLI::IsMember({"bwt", "mix", "lz", "raw"}));
  cmd->add_option("--profile", pf.profile, "expert profile: lite|full")
      ->check(CLI::IsMember({"lite", "full"}));
  cmd->add_option("--block-size", pf.block_size, "raw block size in bytes");
  cmd->add_option("--threads", pf.threads, "worker threads");
}

void print_list(const hecate::ContainerIndex& idx) {
  std::printf("container version %u flags 0x%02x profile %s\n", idx.version, idx.flags,
              idx.profile == hecate::MixProfile::full ? "full" : "lite");
  if (idx.flags & hecate::kFlagReferential)
    std::printf("reference %s hash %016llx\n", idx.ref_name.c_str(),
                static_cast<unsigned long long>(idx.ref_hash));
  for (const auto& s : idx.streams) {
    std::uint64_t comp = 0;
    for (const auto& b : s.blocks) comp += b.comp_size;
    std::printf("stream %-14s codec %-10s blocks %3zu raw %10llu comp %10llu\n",
                hecate::stream_name(s.id), hecate::codec_name(s.codec), s.blocks.size(),
                static_cast<unsigned long long>(s.raw_total()),
                static_cast<unsigned long long>(comp));
    for (std::size_t b = 0; b < s.blocks.size(); ++b)
      std::printf("  block %3zu offset %10llu comp %10llu raw %10llu checksum %016llx\n", b,
                  static_cast<unsigned long long>(s.blocks[b].offset),
                  static_cast<unsigned long long>(s.blocks[b].comp_size),
                  static_cast<unsigned long long>(s.blocks[b].raw_size),
                  static_cast<unsigned long long>(s.blocks[b].checksum));
  }
  std::printf("records %zu\n", idx.records.size());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hecate: stream-factorized FASTA/FASTQ compression"};
  app.require_subcommand(1);

  std::string input, output, reference;
  std::uint64_t record = 0;
  std::string range = "0:0";
  int repeat = 10;
  std::string lit_codec = "lz";
  PackFlags pf;

  auto* pack = app.add_subcommand("pack", "compress a FASTA/FASTQ file");
  pack->add_option("input", input)->required();
  pack->add_option("-o,--output", output)->required();
  add_pack_flags(pack, pf);

  auto* unpack = app.add_subcommand("unpack", "decompress a container");
  unpack->add_option("input", input)->required();
  unpack->add_option("-o,--output", output)->required();
  unpack->add_option("--threads", pf.threads, "worker threads");

  auto* list = app.add_subcommand("list", "print the stream table and block index");
  list->add_option("input", input)->required();

  auto* slice = app.add_subcommand("slice", "extract a nucleotide range of one record");
  slice->add_option("input", input)->required();
  slice->add_option("--record", record)->required();
  slice->add_option("--range", range, "half-open symbol range lo:hi")->required();
  slice->add_option("-o,--output", output);

  auto* refpack = app.add_subcommand("refpack", "compress against a reference");
  refpack->add_option("input", input)->required();
  refpack->add_option("--reference", reference)->required();
  refpack->add_option("-o,--output", output)->required();
  refpack->add_option("--lit-codec", lit_codec, "literal codec: lz|bwt")
      ->check(CLI::IsMember({"lz", "bwt"}));
  refpack->add_option("--block-size", pf.block_size);
  refpack->add_option("--threads", pf.threads);

  auto* refunpack = app.add_subcommand("refunpack", "reconstruct a referential container");
  refunpack->add_option("input", input)->required();
  refunpack->add_option("--reference", reference)->required();
  refunpack->add_option("-o,--output", output)->required();
  refunpack->add_option("--threads", pf.threads);

  auto* bench = app.add_subcommand("bench", "measure ratio and wall-clock throughput");
  bench->add_option("input", input)->required();
  bench->add_option("--repeat", repeat, "runs to average");
  add_pack_flags(bench, pf);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (pack->parsed()) {
      hecate::Bytes data = read_file(input);
      hecate::Bytes packed = hecate::compress_file(hecate::to_view(data), pf.config());
      write_file(output, hecate::to_view(packed));
      std::printf("%llu -> %llu bytes (%.4f bpb)\n",
                  static_cast<unsigned long long>(data.size()),
                  static_cast<unsigned long long>(packed.size()),
                  hecate::bits_per_byte(packed.size(), data.size()));
    } else if (unpack->parsed()) {
      hecate::Bytes packed = read_file(input);
      hecate::Bytes data = hecate::decompress_file(hecate::to_view(packed), pf.threads);
      write_file(output, hecate::to_view(data));
    } else if (list->parsed()) {
      hecate::Bytes packed = read_file(input);
      hecate::ContainerReader rd(hecate::to_view(packed));
      print_list(rd.index());
    } else if (slice->parsed()) {
      auto colon = range.find(':');
      if (colon == std::string::npos)
        hecate::fail(hecate::Errc::invalid_config, "range must be lo:hi");
      std::uint64_t lo = std::stoull(range.substr(0, colon));
      std::uint64_t hi = std::stoull(range.substr(colon + 1));
      hecate::Bytes packed = read_file(input);
      hecate::ContainerReader rd(hecate::to_view(packed));
      hecate::Bytes piece = rd.slice(record, lo, hi);
      if (output.empty()) {
        std::fwrite(piece.data(), 1, piece.size(), stdout);
        std::fputc('\n', stdout);
      } else {
        write_file(output, hecate::to_view(piece));
      }
    } else if (refpack->parsed()) {
      hecate::Bytes target = read_file(input);
      hecate::Bytes ref = read_file(reference);
      hecate::CompressConfig cfg = pf.config();
      cfg.ref_literals = lit_codec == "bwt" ? hecate::CodecId::bwt_cm : hecate::CodecId::lz_ext;
      hecate::Bytes packed =
          hecate::refpack(hecate::to_view(target), hecate::to_view(ref), reference, cfg);
      write_file(output, hecate::to_view(packed));
      std::uint64_t lit_bytes = 0;
      hecate::ContainerReader rd(hecate::to_view(packed));
      for (const auto& s : rd.index().streams)
        if ((s.id & 0xf0) == hecate::kLiteralStreamBase) lit_bytes += s.raw_total();
      double proxy = target.empty() ? 0.0
                                    : static_cast<double>(lit_bytes) /
                                          static_cast<double>(target.size());
      std::printf("%llu -> %llu bytes (%.4f bpb), literal fraction %.4f, "
                  "substitution-channel bound at that rate %.4f bits/symbol\n",
                  static_cast<unsigned long long>(target.size()),
                  static_cast<unsigned long long>(packed.size()),
                  hecate::bits_per_byte(packed.size(), target.size()), proxy,
                  hecate::conditional_entropy_bound(std::min(1.0, proxy), 4.0));
    } else if (refunpack->parsed()) {
      hecate::Bytes packed = read_file(input);
      hecate::Bytes ref = read_file(reference);
      hecate::Bytes data =
          hecate::refunpack(hecate::to_view(packed), hecate::to_view(ref), pf.threads);
      write_file(output, hecate::to_view(data));
    } else if (bench->parsed()) {
      hecate::Bytes data = read_file(input);
      hecate::CompressConfig cfg = pf.config();
      hecate::BenchReport rep;
      rep.repeats = repeat;
      rep.input_bytes = data.size();
      hecate::Bytes packed;
      double enc_ns = 0, dec_ns = 0;
      for (int i = 0; i < repeat; ++i) {
        double t0 = now_ns();
        packed = hecate::compress_file(hecate::to_view(data), cfg);
        enc_ns += now_ns() - t0;
      }
      hecate::Bytes check;
      for (int i = 0; i < repeat; ++i) {
        double t0 = now_ns();
        check = hecate::decompress_file(hecate::to_view(packed), cfg.threads);
        dec_ns += now_ns() - t0;
      }
      if (check != data) hecate::fail(hecate::Errc::corrupt_payload, "round-trip mismatch");
      rep.output_bytes = packed.size();
      if (!data.empty()) {
        rep.encode_ns_per_byte = enc_ns / repeat / static_cast<double>(data.size());
        rep.decode_ns_per_byte = dec_ns / repeat / static_cast<double>(data.size());
      }
      std::printf("%s\n", rep.to_text().c_str());
      std::fputs(rep.to_kv().c_str(), stdout);
    }
  } catch (const hecate::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: io: %s\n", e.what());
    return 1;
  }
  return 0;
}
