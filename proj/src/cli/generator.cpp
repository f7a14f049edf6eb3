#include "physaug/cli.hpp"

#include <algorithm>
#include <thread>

#include "physaug/errors.hpp"
#include "physaug/rng.hpp"
#include "physaug/trace_csv.hpp"

namespace physaug::cli {

Dataset load_dataset(const RunConfig& cfg) {
  Dataset d;
  d.mode = cfg.mode;
  if (cfg.mode == policy::Mode::Ppda || cfg.trace_paths.empty()) {
    if (cfg.bundle_path.empty()) throw InvalidArgument("--bundle is required");
    d.bundle = dataio::load_bundle(cfg.bundle_path);
  }
  if (cfg.mode == policy::Mode::Ppda) {
    if (!cfg.trace_paths.empty()) throw InvalidArgument("PPDA mode synthesizes from --bundle; --trace is not used");
    if (cfg.window < 3) throw InvalidArgument("PPDA windows need at least 3 frames");
    d.spans = dataio::window_labels(d.bundle->labels, cfg.window, cfg.stride);
    return d;
  }
  std::vector<quatkin::SensorTrace> traces;
  std::vector<std::uint32_t> labels;
  if (cfg.trace_paths.empty()) {
    traces = d.bundle->bundle.synthesize(cfg.seed);
    labels = d.bundle->labels;
  } else {
    for (const auto& p : cfg.trace_paths) {
      auto part = dataio::read_trace_csv(p);
      traces.insert(traces.end(), part.begin(), part.end());
    }
    if (cfg.labels_path.empty()) throw InvalidArgument("--labels is required with --trace");
    labels = dataio::read_labels(cfg.labels_path);
  }
  d.windows = dataio::window_traces(traces, labels, cfg.window, cfg.stride);
  return d;
}

BatchGenerator::BatchGenerator(Dataset data, std::size_t batch_size, std::uint64_t seed, std::size_t workers)
    : data_(std::move(data)), batch_size_(batch_size), seed_(seed), workers_(std::max<std::size_t>(workers, 1)) {
  if (batch_size_ == 0) throw InvalidArgument("batch size must be at least 1");
  if (data_.size() == 0) throw InvalidArgument("no windows: the recording is shorter than one window");
}

std::size_t BatchGenerator::batches_per_epoch() const { return (data_.size() + batch_size_ - 1) / batch_size_; }

std::vector<std::size_t> BatchGenerator::epoch_order(std::uint64_t epoch) const {
  std::vector<std::size_t> order(data_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  // Fisher-Yates on the keyed stream so the order is identical on every platform.
  KeyedStream s = KeyedStream(seed_).child("epoch").child(epoch);
  for (std::size_t i = order.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(s.next_u64() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

ProducedBatch BatchGenerator::make(const policy::PolicyState& state, std::uint64_t k) const {
  if (state.space.mode != data_.mode) throw InvalidArgument("policy mode does not match the dataset mode");
  const std::size_t per_epoch = batches_per_epoch();
  const std::uint64_t epoch = k / per_epoch;
  const std::size_t first = static_cast<std::size_t>(k % per_epoch) * batch_size_;
  const std::size_t count = std::min(batch_size_, data_.size() - first);
  const auto order = epoch_order(epoch);

  const KeyedStream batch_stream = KeyedStream(seed_).child("batch").child(k);
  ProducedBatch out;
  out.subpolicy = static_cast<std::uint32_t>(policy::sample(state, batch_stream.child("subpolicy").key()));
  const policy::SubPolicy& sp = state.subpolicies[out.subpolicy];

  std::vector<stda::SignalWindow> windows(count);
  const std::size_t threads = std::max<std::size_t>(std::min(workers_, count), 1);
  std::vector<std::exception_ptr> errors(threads);
  auto work = [&](std::size_t worker) {
    try {
      for (std::size_t i = worker; i < count; i += threads) {
        const std::size_t idx = order[first + i];
        const std::uint64_t seed = batch_stream.child("window").child(i).key();
        if (data_.mode == policy::Mode::Ppda) {
          const auto& span = data_.spans[idx];
          const policy::BundleWindow bw{&data_.bundle->bundle, span.start, span.size, span.label};
          windows[i] = policy::apply_ppda(state.space, sp, bw, seed);
        } else {
          windows[i] = policy::apply_stda(state.space, sp, data_.windows[idx], seed);
        }
      }
    } catch (...) {
      errors[worker] = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  out.batch = dataio::make_batch(windows);
  return out;
}

std::vector<std::uint8_t> batch_message(const ProducedBatch& b) {
  const auto frame = dataio::encode_batch(b.batch);
  return dataio::frame_message(dataio::batch_message_body(b.subpolicy, frame));
}

}  // namespace physaug::cli
