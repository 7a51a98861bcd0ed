#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fed/aggregation.hpp"

namespace fed {

/// Low-level FEDS container.
///
/// Layout (all integers little-endian, floats IEEE-754 binary32 LE):
///
///   "FED1"                      magic, the trailing digit is the format version
///   u32 dim
///   u32 label_count, then label_count x (u32 byte_len, UTF-8 bytes)
///   sections, each: u8 type, u64 count, count records
///     1 samples          u64 id, u32 label_id, dim x f32
///     2 centroids        u32 label_id, u32 member_count, dim x f32
///     3 ivf assignments  u64 id, u32 partition
///   u32 CRC-32 (IEEE) of every preceding byte
///
/// Empty sections are not written.
namespace feds {

enum class SectionType : std::uint8_t { Samples = 1, Centroids = 2, IvfAssignments = 3 };

struct SampleRecord {
  std::uint64_t id = 0;
  std::uint32_t label_id = 0;
  std::vector<float> vector;
  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

struct CentroidRecord {
  std::uint32_t label_id = 0;
  std::uint32_t member_count = 0;
  std::vector<float> vector;
  friend bool operator==(const CentroidRecord&, const CentroidRecord&) = default;
};

struct AssignmentRecord {
  std::uint64_t id = 0;
  std::uint32_t partition = 0;
  friend bool operator==(const AssignmentRecord&, const AssignmentRecord&) = default;
};

struct File {
  std::uint32_t dim = 0;
  std::vector<std::string> label_table;
  std::vector<SampleRecord> samples;
  std::vector<CentroidRecord> centroids;
  std::vector<AssignmentRecord> assignments;
  friend bool operator==(const File&, const File&) = default;
};

std::vector<std::uint8_t> encode(const File& file);

/// Verifies magic, framing and CRC. Label references are not checked here.
/// A damaged file whose declared records run past the end reports
/// TruncatedFile; any other checksum failure reports CrcMismatch.
File decode(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);

/// Writes to `<path>.tmp` then renames over `path`.
void write_bytes_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

std::uint32_t crc32(std::span<const std::uint8_t> bytes) noexcept;

}  // namespace feds

struct StoredSample {
  std::uint64_t id = 0;
  std::string label;
  EmbeddingVector vector;
  friend bool operator==(const StoredSample&, const StoredSample&) = default;
};

struct StoreContents {
  std::uint32_t dim = 0;
  std::vector<std::string> label_table;  // sorted; label_id = position
  std::vector<StoredSample> samples;     // id ascending
  std::vector<ClassCentroid> centroids;  // label ascending
  friend bool operator==(const StoreContents&, const StoreContents&) = default;
};

/// Canonical encoding of a labeled store. The label table is the sorted union
/// of sample and centroid labels, so identical logical input always yields
/// identical bytes.
std::vector<std::uint8_t> encode_store(std::uint32_t dim, std::span<const StoredSample> samples,
                                       std::span<const ClassCentroid> centroids);

void write_store(const std::filesystem::path& path, std::uint32_t dim, std::span<const StoredSample> samples,
                 std::span<const ClassCentroid> centroids);

struct LabeledSample {
  std::uint64_t id = 0;
  std::string label;
  DocumentEmbedding document;
};

void write_store(const std::filesystem::path& path, std::uint32_t dim, std::span<const LabeledSample> samples,
                 std::span<const ClassCentroid> centroids);

StoreContents decode_store(std::span<const std::uint8_t> bytes);
StoreContents read_store(const std::filesystem::path& path);

}  // namespace fed
