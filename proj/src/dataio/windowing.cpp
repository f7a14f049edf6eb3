#include "physaug/windowing.hpp"

#include <map>

#include "physaug/errors.hpp"

namespace physaug::dataio {

std::size_t window_count(std::size_t frames, std::size_t size, std::size_t stride) {
  if (size == 0 || stride == 0) throw InvalidArgument("window size and stride must be at least 1");
  if (frames < size) return 0;
  return (frames - size) / stride + 1;
}

std::uint32_t majority_label(std::span<const std::uint32_t> labels) {
  if (labels.empty()) throw InvalidArgument("majority_label of an empty span");
  std::map<std::uint32_t, std::size_t> counts;
  for (auto l : labels) ++counts[l];
  std::uint32_t best = counts.begin()->first;
  std::size_t best_count = 0;
  // Ascending key order, strict comparison: ties keep the smaller id.
  for (const auto& [label, n] : counts) {
    if (n > best_count) {
      best = label;
      best_count = n;
    }
  }
  return best;
}

std::vector<WindowSpan> window_labels(std::span<const std::uint32_t> labels, std::size_t size, std::size_t stride) {
  const std::size_t n = window_count(labels.size(), size, stride);
  std::vector<WindowSpan> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t start = i * stride;
    out.push_back({start, size, majority_label(labels.subspan(start, size))});
  }
  return out;
}

std::vector<stda::SignalWindow> window_traces(std::span<const quatkin::SensorTrace> traces,
                                              std::span<const std::uint32_t> labels, std::size_t size,
                                              std::size_t stride) {
  for (const auto& tr : traces) {
    if (tr.frames() != labels.size() || tr.gyro.size() != labels.size()) {
      throw LengthError("trace '" + tr.sensor_id + "' length differs from the label track");
    }
  }
  std::vector<stda::SignalWindow> out;
  for (const WindowSpan& w : window_labels(labels, size, stride)) {
    stda::SignalWindow win;
    win.label = w.label;
    win.data.resize(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(6 * traces.size()));
    for (std::size_t s = 0; s < traces.size(); ++s) {
      win.sample_rate_hz = traces[s].sample_rate_hz;
      for (std::size_t t = 0; t < size; ++t) {
        const auto row = static_cast<Eigen::Index>(t);
        const auto col = static_cast<Eigen::Index>(6 * s);
        win.data.block<1, 3>(row, col) = traces[s].accel[w.start + t].transpose();
        win.data.block<1, 3>(row, col + 3) = traces[s].gyro[w.start + t].transpose();
      }
    }
    out.push_back(std::move(win));
  }
  return out;
}

}  // namespace physaug::dataio
