#include "ghne/csv.hpp"

#include <array>
#include <charconv>

#include "ghne/file_io.hpp"

namespace ghne {

std::string format_scalar(Scalar value) {
  std::array<char, 32> buffer{};
  const auto result = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  return std::string(buffer.data(), result.ptr);
}

std::string histogram_csv(const Histogram& histogram) {
  std::string out = "bin,lo,hi,count\n";
  for (std::size_t i = 0; i < histogram.counts.size(); ++i) {
    out += std::to_string(i) + ',' + format_scalar(histogram.bin_edges[i]) + ',' +
           format_scalar(histogram.bin_edges[i + 1]) + ',' +
           std::to_string(histogram.counts[i]) + '\n';
  }
  return out;
}

namespace {

void append_histogram_rows(std::string& out, const std::string& prefix, const Histogram& h) {
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out += prefix + "histogram," + std::to_string(i) + ',' + format_scalar(h.bin_edges[i]) +
           ',' + format_scalar(h.bin_edges[i + 1]) + ',' + std::to_string(h.counts[i]) + '\n';
  }
}

}  // namespace

std::string stats_csv(const StatsReport& report) {
  std::string out = "scope,filter,channel,metric,bin,lo,hi,value\n";
  if (report.members.empty()) return out;
  for (const auto& member : report.members) {
    const std::string prefix = "member," + std::to_string(member.filter) + ',' +
                               std::to_string(member.channel) + ',';
    append_histogram_rows(out, prefix, member.histogram);
    out += prefix + "fuzziness,,,," + format_scalar(member.fuzziness) + '\n';
  }
  append_histogram_rows(out, "aggregate,,,", report.aggregate);
  out += "aggregate,,,fuzziness,,,," + format_scalar(report.aggregate_fuzziness) + '\n';
  return out;
}

std::string fuzziness_csv(const std::vector<LayerFuzziness>& series) {
  std::string out = "layer,shape,fuzziness\n";
  for (const auto& row : series) {
    out += std::to_string(row.layer) + ',' + row.shape.to_string() + ',' +
           format_scalar(row.fuzziness) + '\n';
  }
  return out;
}

std::string features_csv(const Bank& bank, bool negate) {
  const Shape& shape = bank.shape();
  std::string out = "filter,channel";
  for (std::size_t axis = 0; axis < shape.rank(); ++axis) out += ",i" + std::to_string(axis);
  out += ",value\n";

  std::vector<std::size_t> index(shape.rank());
  for (std::size_t m = 0; m < bank.filters(); ++m) {
    for (std::size_t c = 0; c < bank.channels(); ++c) {
      const Epitome& e = bank.member(m, c);
      std::fill(index.begin(), index.end(), 0);
      for (std::size_t i = 0; i < e.size(); ++i) {
        out += std::to_string(m) + ',' + std::to_string(c);
        for (std::size_t v : index) out += ',' + std::to_string(v);
        const Scalar value = negate ? -e.mean(i) : e.mean(i);
        out += ',' + format_scalar(value) + '\n';
        for (std::size_t axis = shape.rank(); axis-- > 0;) {
          if (++index[axis] < shape.extent(axis)) break;
          index[axis] = 0;
        }
      }
    }
  }
  return out;
}

void write_csv(const Histogram& histogram, const std::filesystem::path& path) {
  write_file_atomic(path, histogram_csv(histogram));
}

void write_csv(const StatsReport& report, const std::filesystem::path& path) {
  write_file_atomic(path, stats_csv(report));
}

void write_csv(const std::vector<LayerFuzziness>& series, const std::filesystem::path& path) {
  write_file_atomic(path, fuzziness_csv(series));
}

}  // namespace ghne
