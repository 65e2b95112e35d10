#include "ghne/epitome_file.hpp"

#include <cmath>
#include <limits>

#include "ghne/error.hpp"
#include "ghne/file_io.hpp"
#include "little_endian.hpp"

namespace ghne {
namespace {

constexpr std::string_view kMagic = "GHNE";
constexpr std::uint32_t kMaxRank = 32;
constexpr std::size_t kEntryBytes = sizeof(double) + sizeof(std::uint64_t);

[[noreturn]] void fail(FormatError::Kind kind, const std::string& what) {
  throw FormatError(kind, "epitome file: " + what);
}

// Bounds-checked little-endian reader over the byte stream.
class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T read(const char* field) {
    if (bytes_.size() - pos_ < sizeof(T)) {
      fail(FormatError::Kind::kTruncated, std::string("truncated while reading ") + field);
    }
    const T value = le::get<T>(bytes_, pos_);
    pos_ += sizeof(T);
    return value;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::size_t checked_product(std::size_t a, std::size_t b) {
  std::size_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    fail(FormatError::Kind::kInvalidHeader, "declared size overflows");
  }
  return out;
}

}  // namespace

std::string encode_epitome(const Bank& bank) {
  const Shape& shape = bank.shape();
  std::string out;
  out.reserve(32 + 8 * shape.rank() + bank.members().size() * shape.size() * kEntryBytes);
  out.append(kMagic);
  le::put<std::uint32_t>(out, kEpitomeFormatVersion);
  le::put<std::uint64_t>(out, bank.filters());
  le::put<std::uint64_t>(out, bank.channels());
  le::put<std::uint32_t>(out, static_cast<std::uint32_t>(shape.rank()));
  for (std::size_t e : shape.extents()) le::put<std::uint64_t>(out, e);
  for (const auto& member : bank.members()) {
    for (std::size_t i = 0; i < member.size(); ++i) {
      le::put<double>(out, member.g()[i]);
      le::put<std::uint64_t>(out, member.s()[i]);
    }
  }
  return out;
}

Bank decode_epitome(std::string_view bytes) {
  // Magic first, before anything is sized or allocated.
  const std::size_t probe = std::min(bytes.size(), kMagic.size());
  if (bytes.substr(0, probe) != kMagic.substr(0, probe)) {
    fail(FormatError::Kind::kBadMagic, "bad magic bytes (expected \"GHNE\")");
  }
  if (bytes.size() < kMagic.size()) fail(FormatError::Kind::kTruncated, "truncated magic");

  Reader in(bytes.substr(kMagic.size()));
  const auto version = in.read<std::uint32_t>("version");
  if (version != kEpitomeFormatVersion) {
    fail(FormatError::Kind::kUnsupportedVersion,
         "unsupported version " + std::to_string(version));
  }
  const auto filters = in.read<std::uint64_t>("filters");
  const auto channels = in.read<std::uint64_t>("channels");
  const auto rank = in.read<std::uint32_t>("rank");
  if (filters == 0 || channels == 0) {
    fail(FormatError::Kind::kInvalidHeader, "filters and channels must be >= 1");
  }
  if (rank == 0 || rank > kMaxRank) {
    fail(FormatError::Kind::kInvalidHeader, "rank " + std::to_string(rank) + " out of range");
  }
  std::vector<std::size_t> extents(rank);
  std::size_t per_member = 1;
  for (auto& e : extents) {
    e = in.read<std::uint64_t>("extents");
    if (e == 0) fail(FormatError::Kind::kInvalidHeader, "zero extent");
    per_member = checked_product(per_member, e);
  }
  const std::size_t members = checked_product(filters, channels);
  const std::size_t entries = checked_product(members, per_member);
  const std::size_t needed = checked_product(entries, kEntryBytes);
  if (in.remaining() < needed) {
    fail(FormatError::Kind::kTruncated, "entry stream holds " + std::to_string(in.remaining()) +
                                            " bytes, header declares " + std::to_string(needed));
  }
  if (in.remaining() > needed) {
    fail(FormatError::Kind::kTrailingData,
         std::to_string(in.remaining() - needed) + " bytes after the entry stream");
  }

  const Shape shape(extents);
  std::vector<Epitome> bank_members;
  bank_members.reserve(members);
  for (std::size_t k = 0; k < members; ++k) {
    std::vector<Scalar> g(per_member);
    std::vector<Count> s(per_member);
    for (std::size_t i = 0; i < per_member; ++i) {
      g[i] = in.read<double>("g");
      s[i] = in.read<std::uint64_t>("s");
      if (!std::isfinite(g[i])) fail(FormatError::Kind::kInvalidValue, "non-finite g");
      if (s[i] == 0) fail(FormatError::Kind::kInvalidValue, "zero count");
    }
    bank_members.emplace_back(shape, std::move(g), std::move(s));
  }
  return Bank(filters, channels, std::move(bank_members));
}

void save_epitome(const Bank& bank, const std::filesystem::path& path) {
  write_file_atomic(path, encode_epitome(bank));
}

void save_epitome(const DeepEpitome& deep, const std::filesystem::path& path) {
  save_epitome(deep.bank, path);
}

Bank load_epitome(const std::filesystem::path& path) {
  return decode_epitome(read_file(path));
}

}  // namespace ghne
