#include "fed/store.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <set>

namespace fed {
namespace feds {

namespace {

constexpr std::uint8_t kMagic[4] = {'F', 'E', 'D', '1'};
constexpr std::size_t kTrailerSize = 4;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void raw(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }

  std::vector<std::uint8_t> finish() && {
    u32(crc32(out_));
    return std::move(out_);
  }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> body) : body_(body) {}

  bool at_end() const noexcept { return pos_ == body_.size(); }
  std::size_t remaining() const noexcept { return body_.size() - pos_; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw Error(ErrorCode::TruncatedFile, std::string("file ends inside ") + what + " at offset " +
                                                std::to_string(pos_));
    }
  }
  std::uint8_t u8(const char* what) {
    need(1, what);
    return body_[pos_++];
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(body_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(body_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
  std::string bytes(std::size_t n, const char* what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(body_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  /// Guards a `count x record_size` allocation against the bytes actually present.
  void need_records(std::uint64_t count, std::size_t record_size, const char* what) const {
    if (record_size != 0 && count > remaining() / record_size) {
      throw Error(ErrorCode::TruncatedFile, std::string(what) + " section declares " + std::to_string(count) +
                                                " records but only " + std::to_string(remaining()) +
                                                " bytes remain");
    }
  }

 private:
  std::span<const std::uint8_t> body_;
  std::size_t pos_ = 0;
};

void check_magic(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw Error(ErrorCode::TruncatedFile, "file shorter than magic");
  if (std::memcmp(bytes.data(), kMagic, 3) != 0) throw Error(ErrorCode::BadMagic, "not a FEDS file");
  if (bytes[3] != kMagic[3]) {
    throw Error(ErrorCode::UnsupportedVersion, std::string("FEDS version '") + static_cast<char>(bytes[3]) + "'");
  }
}

File parse_body(std::span<const std::uint8_t> body) {
  Reader r(body);
  r.need(4, "magic");
  r.bytes(4, "magic");
  File f;
  f.dim = r.u32("header");
  const std::uint32_t nlabels = r.u32("label table");
  r.need_records(nlabels, 4, "label table");
  f.label_table.reserve(nlabels);
  for (std::uint32_t i = 0; i < nlabels; ++i) {
    const std::uint32_t len = r.u32("label length");
    f.label_table.push_back(r.bytes(len, "label"));
  }

  const std::size_t vec_bytes = std::size_t{4} * f.dim;
  while (!r.at_end()) {
    const std::uint8_t type = r.u8("section header");
    const std::uint64_t count = r.u64("section header");
    switch (static_cast<SectionType>(type)) {
      case SectionType::Samples:
        r.need_records(count, 12 + vec_bytes, "samples");
        for (std::uint64_t i = 0; i < count; ++i) {
          SampleRecord s;
          s.id = r.u64("sample");
          s.label_id = r.u32("sample");
          s.vector.resize(f.dim);
          for (auto& x : s.vector) x = r.f32("sample");
          f.samples.push_back(std::move(s));
        }
        break;
      case SectionType::Centroids:
        r.need_records(count, 8 + vec_bytes, "centroids");
        for (std::uint64_t i = 0; i < count; ++i) {
          CentroidRecord c;
          c.label_id = r.u32("centroid");
          c.member_count = r.u32("centroid");
          c.vector.resize(f.dim);
          for (auto& x : c.vector) x = r.f32("centroid");
          f.centroids.push_back(std::move(c));
        }
        break;
      case SectionType::IvfAssignments:
        r.need_records(count, 12, "ivf assignments");
        for (std::uint64_t i = 0; i < count; ++i) {
          AssignmentRecord a;
          a.id = r.u64("assignment");
          a.partition = r.u32("assignment");
          f.assignments.push_back(a);
        }
        break;
      default:
        throw Error(ErrorCode::UnsupportedVersion, "unknown section type " + std::to_string(type));
    }
  }
  return f;
}

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> bytes) noexcept {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  std::size_t off = 0;
  while (off < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - off, 1u << 30));
    crc = ::crc32(crc, bytes.data() + off, chunk);
    off += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<std::uint8_t> encode(const File& file) {
  Writer w;
  w.raw(kMagic);
  w.u32(file.dim);
  w.u32(static_cast<std::uint32_t>(file.label_table.size()));
  for (const auto& label : file.label_table) {
    w.u32(static_cast<std::uint32_t>(label.size()));
    w.raw({reinterpret_cast<const std::uint8_t*>(label.data()), label.size()});
  }
  auto check_dim = [&](std::size_t n) {
    if (n != file.dim) {
      throw Error(ErrorCode::InconsistentDim, "record of dim " + std::to_string(n) + " in a dim " +
                                                  std::to_string(file.dim) + " file");
    }
  };
  if (!file.samples.empty()) {
    w.u8(static_cast<std::uint8_t>(SectionType::Samples));
    w.u64(file.samples.size());
    for (const auto& s : file.samples) {
      check_dim(s.vector.size());
      w.u64(s.id);
      w.u32(s.label_id);
      for (float x : s.vector) w.f32(x);
    }
  }
  if (!file.centroids.empty()) {
    w.u8(static_cast<std::uint8_t>(SectionType::Centroids));
    w.u64(file.centroids.size());
    for (const auto& c : file.centroids) {
      check_dim(c.vector.size());
      w.u32(c.label_id);
      w.u32(c.member_count);
      for (float x : c.vector) w.f32(x);
    }
  }
  if (!file.assignments.empty()) {
    w.u8(static_cast<std::uint8_t>(SectionType::IvfAssignments));
    w.u64(file.assignments.size());
    for (const auto& a : file.assignments) {
      w.u64(a.id);
      w.u32(a.partition);
    }
  }
  return std::move(w).finish();
}

File decode(std::span<const std::uint8_t> bytes) {
  check_magic(bytes);
  if (bytes.size() < 4 + 4 + 4 + kTrailerSize) throw Error(ErrorCode::TruncatedFile, "file shorter than header");

  const auto body = bytes.first(bytes.size() - kTrailerSize);
  const auto trailer = bytes.last(kTrailerSize);
  std::uint32_t stored = 0;
  for (int i = 0; i < 4; ++i) stored |= static_cast<std::uint32_t>(trailer[i]) << (8 * i);

  if (crc32(body) != stored) {
    try {
      parse_body(body);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::TruncatedFile) throw;
    }
    throw Error(ErrorCode::CrcMismatch, "checksum does not match contents");
  }
  return parse_body(body);
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoError, "read failed for '" + path.string() + "'");
  return data;
}

void write_bytes_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot create '" + tmp.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot rename onto '" + path.string() + "'");
  }
}

}  // namespace feds

namespace {

std::vector<float> to_floats(const EmbeddingVector& v) { return {v.values().begin(), v.values().end()}; }

}  // namespace

std::vector<std::uint8_t> encode_store(std::uint32_t dim, std::span<const StoredSample> samples,
                                       std::span<const ClassCentroid> centroids) {
  if (dim == 0) throw Error(ErrorCode::InconsistentDim, "store dim must be positive");

  std::set<std::string> labels;
  std::set<std::uint64_t> ids;
  for (const auto& s : samples) {
    if (s.vector.dim() != dim) {
      throw Error(ErrorCode::InconsistentDim, "sample " + std::to_string(s.id) + " has dim " +
                                                  std::to_string(s.vector.dim()));
    }
    if (!ids.insert(s.id).second) throw Error(ErrorCode::DuplicateId, "sample id " + std::to_string(s.id));
    labels.insert(s.label);
  }
  std::set<std::string> centroid_labels;
  for (const auto& c : centroids) {
    if (c.vector.dim() != dim) {
      throw Error(ErrorCode::InconsistentDim, "centroid '" + c.label + "' has dim " +
                                                  std::to_string(c.vector.dim()));
    }
    if (!centroid_labels.insert(c.label).second) {
      throw Error(ErrorCode::DuplicateLabel, "centroid label '" + c.label + "' repeated");
    }
    labels.insert(c.label);
  }

  feds::File f;
  f.dim = dim;
  f.label_table.assign(labels.begin(), labels.end());
  std::map<std::string_view, std::uint32_t> label_id;
  for (std::uint32_t i = 0; i < f.label_table.size(); ++i) label_id[f.label_table[i]] = i;

  f.samples.reserve(samples.size());
  for (const auto& s : samples) f.samples.push_back({s.id, label_id.at(s.label), to_floats(s.vector)});
  std::sort(f.samples.begin(), f.samples.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

  f.centroids.reserve(centroids.size());
  for (const auto& c : centroids) f.centroids.push_back({label_id.at(c.label), c.member_count, to_floats(c.vector)});
  // label_table is sorted, so label_id order is label order
  std::sort(f.centroids.begin(), f.centroids.end(),
            [](const auto& a, const auto& b) { return a.label_id < b.label_id; });

  return feds::encode(f);
}

void write_store(const std::filesystem::path& path, std::uint32_t dim, std::span<const StoredSample> samples,
                 std::span<const ClassCentroid> centroids) {
  const auto bytes = encode_store(dim, samples, centroids);
  feds::write_bytes_atomic(path, bytes);
}

void write_store(const std::filesystem::path& path, std::uint32_t dim, std::span<const LabeledSample> samples,
                 std::span<const ClassCentroid> centroids) {
  std::vector<StoredSample> flat;
  flat.reserve(samples.size());
  for (const auto& s : samples) flat.push_back({s.id, s.label, s.document.vector});
  write_store(path, dim, std::span<const StoredSample>(flat), centroids);
}

StoreContents decode_store(std::span<const std::uint8_t> bytes) {
  feds::File f = feds::decode(bytes);
  if (f.dim == 0) throw Error(ErrorCode::InconsistentDim, "store dim is zero");

  const auto nlabels = f.label_table.size();
  auto check_ref = [&](std::uint32_t id, const std::string& what) {
    if (id >= nlabels) {
      throw Error(ErrorCode::BadLabelRef, what + " references label " + std::to_string(id) + " of " +
                                              std::to_string(nlabels));
    }
  };

  StoreContents out;
  out.dim = f.dim;
  out.samples.reserve(f.samples.size());
  for (auto& s : f.samples) {
    check_ref(s.label_id, "sample " + std::to_string(s.id));
    out.samples.push_back({s.id, f.label_table[s.label_id], EmbeddingVector(std::move(s.vector))});
  }
  // Index files reuse the centroid section for coarse centroids keyed by partition.
  if (f.assignments.empty()) {
    out.centroids.reserve(f.centroids.size());
    for (auto& c : f.centroids) {
      check_ref(c.label_id, "centroid");
      out.centroids.push_back({EmbeddingVector(std::move(c.vector)), f.label_table[c.label_id], c.member_count});
    }
  }
  out.label_table = std::move(f.label_table);
  return out;
}

StoreContents read_store(const std::filesystem::path& path) { return decode_store(feds::read_bytes(path)); }

}  // namespace fed
