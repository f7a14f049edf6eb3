#include "physaug/policy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "physaug/errors.hpp"
#include "physaug/rng.hpp"

namespace physaug::policy {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool belongs(const Augmentation& a, Category c, Mode mode) {
  switch (c) {
    case Category::Amplitude:
      return std::holds_alternative<MagnitudeScale>(a) || std::holds_alternative<MagnitudeWarp>(a);
    case Category::Speed:
      return std::holds_alternative<TimeScale>(a) || std::holds_alternative<TimeWarp>(a);
    case Category::Placement:
      return mode == Mode::Ppda ? std::holds_alternative<PlacementShift>(a) : std::holds_alternative<Rotation>(a);
    case Category::Hardware:
      return mode == Mode::Ppda ? std::holds_alternative<NoiseBias>(a) : std::holds_alternative<Jitter>(a);
  }
  return false;
}

const Augmentation* chosen(const PolicySpace& space, const SubPolicy& sp, Category c) {
  const auto idx = sp.choice[static_cast<std::size_t>(c)];
  if (!idx) return nullptr;
  const auto& opts = space.options[static_cast<std::size_t>(c)];
  if (*idx >= opts.size()) {
    throw InvalidArgument("sub-policy option " + std::to_string(*idx) + " out of range for category " +
                          category_name(c, space.mode));
  }
  return &opts[*idx];
}

double sample_beta(const TimeScale& ts, std::uint64_t seed) {
  if (!(ts.beta_lo > 0.0) || ts.beta_hi < ts.beta_lo) throw InvalidArgument("time scale range must be 0 < lo <= hi");
  if (ts.beta_lo == ts.beta_hi) return ts.beta_lo;
  KeyedStream s = KeyedStream(seed).child("beta");
  return s.uniform(ts.beta_lo, ts.beta_hi);
}

const ppda::MotionBundle& checked_bundle(const BundleWindow& w) {
  if (!w.bundle) throw InvalidArgument("bundle window has no bundle");
  if (w.size < 3) throw InvalidArgument("bundle window needs at least 3 frames");
  if (w.start + w.size > w.bundle->dynamics.frames()) throw LengthError("bundle window exceeds the motion length");
  return *w.bundle;
}

}  // namespace

std::string mode_name(Mode mode) { return mode == Mode::Ppda ? "ppda" : "stda"; }

std::string category_name(Category c, Mode mode) {
  static constexpr std::array<const char*, 4> ppda_names{"amplitude", "speed", "placement", "hardware"};
  static constexpr std::array<const char*, 4> stda_names{"magnitude", "time", "rotation", "jitter"};
  const auto i = static_cast<std::size_t>(c);
  return mode == Mode::Ppda ? ppda_names[i] : stda_names[i];
}

std::string describe(const Augmentation& a) {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const MagnitudeScale& m) { os << "scale(sigma=" << m.sigma << ")"; },
                 [&](const MagnitudeWarp& m) { os << "warp(sigma=" << m.sigma << ",K=" << m.knots << ")"; },
                 [&](const TimeScale& t) { os << "scale(beta~U[" << t.beta_lo << "," << t.beta_hi << "])"; },
                 [&](const TimeWarp& t) { os << "warp(K=" << t.knots << ",r=" << t.max_speed_ratio << ")"; },
                 [&](const PlacementShift& p) {
                   os << "perturb(+-" << p.config.orient_range_deg.transpose() << " deg";
                   if (p.config.axial_range_deg) os << ",axial+-" << *p.config.axial_range_deg;
                   if (!p.config.flip_axes.empty()) os << ",flips";
                   os << ")";
                 },
                 [&](const Rotation& r) { os << "rotate(+-" << r.range_deg << " deg)"; },
                 [&](const NoiseBias& n) { os << "noise_bias(sigma=" << n.sigma << ",b=" << n.bias_range << ")"; },
                 [&](const Jitter& j) { os << "jitter(sigma=" << j.sigma << ")"; },
             },
             a);
  return os.str();
}

void PolicySpace::validate() const {
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    for (const auto& a : options[c]) {
      if (!belongs(a, static_cast<Category>(c), mode)) {
        throw InvalidArgument("option " + describe(a) + " does not belong to category " +
                              category_name(static_cast<Category>(c), mode) + " in " + mode_name(mode) + " mode");
      }
    }
  }
}

bool SubPolicy::is_identity() const {
  for (const auto& c : choice) {
    if (c) return false;
  }
  return true;
}

std::string describe(const PolicySpace& space, const SubPolicy& sp) {
  if (sp.is_identity()) return "identity";
  std::string out;
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    const Augmentation* a = chosen(space, sp, static_cast<Category>(c));
    if (!a) continue;
    if (!out.empty()) out += " + ";
    out += category_name(static_cast<Category>(c), space.mode) + ":" + describe(*a);
  }
  return out;
}

void PolicyState::refresh() {
  const double k = static_cast<double>(weights.size());
  double sum = 0.0;
  for (double w : weights) sum += w;
  probabilities.resize(weights.size());
  // Equal weights map to exactly 1/k whatever the floor.
  if (std::adjacent_find(weights.begin(), weights.end(), std::not_equal_to<>()) == weights.end()) {
    std::fill(probabilities.begin(), probabilities.end(), 1.0 / k);
    return;
  }
  for (std::size_t i = 0; i < weights.size(); ++i) probabilities[i] = (1.0 - floor) * weights[i] / sum + floor / k;
}

PolicyState build_binary(const PolicySpace& space, const SubPolicy& aug) {
  space.validate();
  if (aug.is_identity()) throw InvalidArgument("binary policy needs a non-identity augmentation");
  for (std::size_t c = 0; c < kCategoryCount; ++c) chosen(space, aug, static_cast<Category>(c));
  PolicyState st;
  st.kind = Kind::Binary;
  st.space = space;
  st.subpolicies = {SubPolicy{}, aug};
  st.weights = {0.5, 0.5};
  st.probabilities = {0.5, 0.5};
  return st;
}

PolicyState build_combinatorial(const PolicySpace& space) {
  space.validate();
  PolicyState st;
  st.kind = Kind::Combinatorial;
  st.space = space;
  std::array<std::size_t, kCategoryCount> counts{};
  std::size_t total = 1;
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    counts[c] = space.options[c].size() + 1;
    total *= counts[c];
  }
  st.subpolicies.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    SubPolicy sp;
    std::size_t rest = flat;
    for (std::size_t c = kCategoryCount; c-- > 0;) {
      const std::size_t digit = rest % counts[c];
      rest /= counts[c];
      if (digit > 0) sp.choice[c] = digit - 1;
    }
    st.subpolicies.push_back(sp);
  }
  const double p = 1.0 / static_cast<double>(total);
  st.weights.assign(total, p);
  st.probabilities.assign(total, p);
  return st;
}

std::size_t sample_from(std::span<const double> probabilities, std::uint64_t seed) {
  if (probabilities.empty()) throw InvalidArgument("cannot sample from an empty distribution");
  KeyedStream s = KeyedStream(seed).child("subpolicy");
  const double u = s.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    acc += probabilities[i];
    if (u < acc) return i;
  }
  // Rounding left the cumulative sum just below 1; take the last positive entry.
  for (std::size_t i = probabilities.size(); i-- > 0;) {
    if (probabilities[i] > 0.0) return i;
  }
  return probabilities.size() - 1;
}

std::size_t sample(const PolicyState& state, std::uint64_t seed) { return sample_from(state.probabilities, seed); }

PolicyState update_weights(const PolicyState& state, std::span<const Reward> rewards) {
  if (rewards.empty()) return state;
  const std::size_t k = state.size();
  std::vector<double> sum(k, 0.0);
  std::vector<std::size_t> count(k, 0);
  for (const Reward& r : rewards) {
    if (r.index >= k) throw InvalidArgument("reward index " + std::to_string(r.index) + " out of range");
    if (!std::isfinite(r.value)) throw InvalidArgument("reward for index " + std::to_string(r.index) + " is not finite");
    sum[r.index] += r.value;
    ++count[r.index];
  }
  PolicyState next = state;
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (count[i] > 0) next.weights[i] *= std::exp(state.learning_rate * sum[i] / static_cast<double>(count[i]));
    total += next.weights[i];
  }
  for (double& w : next.weights) w = std::max(w / total, std::numeric_limits<double>::min());
  next.refresh();
  return next;
}

std::uint64_t category_seed(std::uint64_t seed, Category c) {
  return KeyedStream(seed).child("category").child(static_cast<std::uint64_t>(c)).key();
}

std::uint64_t synthesis_seed(std::uint64_t seed) { return KeyedStream(seed).child("synthesis").key(); }

stda::SignalWindow pack_traces(std::span<const quatkin::SensorTrace> traces, std::size_t size, std::uint32_t label) {
  stda::SignalWindow out;
  out.label = label;
  out.data.resize(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(6 * traces.size()));
  for (std::size_t s = 0; s < traces.size(); ++s) {
    const auto& tr = traces[s];
    if (tr.frames() < size) throw LengthError("trace '" + tr.sensor_id + "' is shorter than the window");
    out.sample_rate_hz = tr.sample_rate_hz;
    const auto col = static_cast<Eigen::Index>(6 * s);
    for (std::size_t t = 0; t < size; ++t) {
      const auto row = static_cast<Eigen::Index>(t);
      out.data.block<1, 3>(row, col) = tr.accel[t].transpose();
      out.data.block<1, 3>(row, col + 3) = tr.gyro[t].transpose();
    }
  }
  return out;
}

stda::SignalWindow simulate_window(const BundleWindow& w, std::uint64_t seed) {
  const ppda::MotionBundle& b = checked_bundle(w);
  const auto motion = b.dynamics.slice(w.start, w.size);
  const auto traces = quatkin::synthesize_imu(b.body, motion, b.placement, b.hardware, synthesis_seed(seed));
  auto out = pack_traces(traces, w.size, w.label);
  out.sample_rate_hz = b.dynamics.sample_rate_hz;
  return out;
}

stda::SignalWindow apply_stda(const PolicySpace& space, const SubPolicy& sp, const stda::SignalWindow& x,
                              std::uint64_t seed) {
  if (space.mode != Mode::Stda) throw InvalidArgument("apply_stda needs an STDA policy space");
  stda::SignalWindow out = x;

  if (const Augmentation* a = chosen(space, sp, Category::Amplitude)) {
    const std::uint64_t s = category_seed(seed, Category::Amplitude);
    if (const auto* m = std::get_if<MagnitudeScale>(a)) out = stda::magnitude_scale(out, m->sigma, s);
    if (const auto* m = std::get_if<MagnitudeWarp>(a)) out = stda::magnitude_warp(out, m->sigma, m->knots, s);
  }
  if (const Augmentation* a = chosen(space, sp, Category::Speed)) {
    const std::uint64_t s = category_seed(seed, Category::Speed);
    if (const auto* t = std::get_if<TimeScale>(a)) {
      out = stda::fit_length(stda::time_scale(out, sample_beta(*t, s)), x.frames());
    }
    if (const auto* t = std::get_if<TimeWarp>(a)) out = stda::time_warp(out, t->knots, t->max_speed_ratio, s);
  }
  if (const Augmentation* a = chosen(space, sp, Category::Placement)) {
    const auto& r = std::get<Rotation>(*a);
    out = stda::rotate_by(out, stda::random_rotation(category_seed(seed, Category::Placement),
                                                     r.range_deg * std::numbers::pi / 180.0));
  }
  if (const Augmentation* a = chosen(space, sp, Category::Hardware)) {
    out = stda::jitter(out, std::get<Jitter>(*a).sigma, category_seed(seed, Category::Hardware));
  }
  out.label = x.label;
  return out;
}

stda::SignalWindow apply_ppda(const PolicySpace& space, const SubPolicy& sp, const BundleWindow& w,
                              std::uint64_t seed) {
  if (space.mode != Mode::Ppda) throw InvalidArgument("apply_ppda needs a PPDA policy space");
  const ppda::MotionBundle& b = checked_bundle(w);

  const Augmentation* amplitude = chosen(space, sp, Category::Amplitude);
  const Augmentation* speed = chosen(space, sp, Category::Speed);
  const Augmentation* placement = chosen(space, sp, Category::Placement);
  const Augmentation* hardware = chosen(space, sp, Category::Hardware);

  // A uniform speed-up reads past the window end; include that context when
  // the recording has it so the replay does not stall on the last frame.
  std::optional<double> beta;
  std::size_t span = w.size;
  if (speed) {
    if (const auto* t = std::get_if<TimeScale>(speed)) {
      beta = sample_beta(*t, category_seed(seed, Category::Speed));
      if (*beta > 1.0) {
        const double needed = std::ceil(static_cast<double>(w.size - 1) * *beta) + 1.0;
        const std::size_t available = b.dynamics.frames() - w.start;
        span = std::min(available, std::max(w.size, static_cast<std::size_t>(needed)));
      }
    }
  }

  quatkin::MotionSequence motion = b.dynamics.slice(w.start, span);

  if (amplitude) {
    const std::uint64_t s = category_seed(seed, Category::Amplitude);
    if (const auto* m = std::get_if<MagnitudeScale>(amplitude)) motion = ppda::amplitude_scale(motion, m->sigma, s);
    if (const auto* m = std::get_if<MagnitudeWarp>(amplitude)) {
      motion = ppda::amplitude_warp(motion, m->sigma, m->knots, s);
    }
  }
  if (speed) {
    if (beta) {
      motion = ppda::speed_resample(motion, ppda::UniformSpeed{*beta});
    } else {
      const auto& t = std::get<TimeWarp>(*speed);
      motion = ppda::speed_resample(
          motion, stda::make_time_warp(motion.frames(), t.knots, t.max_speed_ratio,
                                       category_seed(seed, Category::Speed)));
    }
  }
  if (motion.frames() != w.size) motion = motion.slice(0, w.size);

  quatkin::PlacementMap pmap = b.placement;
  if (placement) {
    pmap = ppda::placement_perturb(pmap, std::get<PlacementShift>(*placement).config,
                                   category_seed(seed, Category::Placement));
  }
  quatkin::HardwareProfile hw = b.hardware;
  if (hardware) {
    const auto& nb = std::get<NoiseBias>(*hardware);
    hw = ppda::hardware_perturb(ppda::complete_hardware(hw, pmap), nb.sigma, nb.bias_range,
                                category_seed(seed, Category::Hardware));
  }

  const auto traces = quatkin::synthesize_imu(b.body, motion, pmap, hw, synthesis_seed(seed));
  auto out = pack_traces(traces, w.size, w.label);
  out.sample_rate_hz = b.dynamics.sample_rate_hz;
  return out;
}

stda::SignalWindow apply(const PolicySpace& space, const SubPolicy& sp, const ApplyInput& input, std::uint64_t seed) {
  if (space.mode == Mode::Stda) {
    const auto* x = std::get_if<stda::SignalWindow>(&input);
    if (!x) throw InvalidArgument("STDA mode needs a signal window input");
    return apply_stda(space, sp, *x, seed);
  }
  const auto* w = std::get_if<BundleWindow>(&input);
  if (!w) throw InvalidArgument("PPDA mode needs a bundle window input");
  return apply_ppda(space, sp, *w, seed);
}

}  // namespace physaug::policy
