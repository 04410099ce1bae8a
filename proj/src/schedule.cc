#include "asyncdyn/schedule.h"

#include <sstream>

#include "asyncdyn/action_space.h"
#include "asyncdyn/error.h"

namespace asyncdyn {

ActivationSet ActivationSet::of(std::initializer_list<std::size_t> nodes) {
  ActivationSet set;
  for (std::size_t node : nodes) set |= single(node);
  return set;
}

ActivationSet ActivationSet::from_labels(const std::vector<int>& labels) {
  ActivationSet set;
  for (int label : labels) {
    if (label < 1 || static_cast<std::size_t>(label) > kMaxNodes) {
      fail(ErrorKind::kInvalidInput,
           "node label " + std::to_string(label) + " is out of range");
    }
    set |= single(static_cast<std::size_t>(label - 1));
  }
  return set;
}

std::vector<std::size_t> ActivationSet::members() const {
  std::vector<std::size_t> out;
  for (std::uint64_t rest = bits_; rest != 0; rest &= rest - 1) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(rest)));
  }
  return out;
}

std::vector<int> ActivationSet::labels() const {
  std::vector<int> out;
  for (std::size_t node : members()) out.push_back(static_cast<int>(node) + 1);
  return out;
}

std::string ActivationSet::to_string() const {
  std::ostringstream out;
  out << '{';
  bool first = true;
  for (int label : labels()) {
    if (!first) out << ',';
    out << label;
    first = false;
  }
  out << '}';
  return out.str();
}

namespace {

void validate_sets(const std::vector<ActivationSet>& sets, std::size_t n,
                   const char* what) {
  for (const auto& set : sets) {
    if (!set.within(n)) {
      fail(ErrorKind::kInvalidInput, std::string(what) + " activation set " +
                                         set.to_string() +
                                         " names a node outside 1.." +
                                         std::to_string(n));
    }
  }
}

// Uniform double in [0, 1) from the top 53 bits, independent of the
// standard library's distribution implementations.
double unit_draw(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

Schedule::Schedule(ScheduleSpec spec, std::size_t node_count)
    : spec_(std::move(spec)), node_count_(node_count) {
  if (node_count_ == 0 || node_count_ > kMaxNodes) {
    fail(ErrorKind::kInvalidInput, "schedule needs 1.." +
                                       std::to_string(kMaxNodes) + " nodes");
  }
  std::visit(Overloaded{
                 [&](const schedules::ExplicitList& s) {
                   validate_sets(s.sets, node_count_, "explicit");
                 },
                 [&](const schedules::Periodic& s) {
                   if (s.cycle.empty()) {
                     fail(ErrorKind::kInvalidInput,
                          "periodic schedule needs a nonempty cycle");
                   }
                   validate_sets(s.prefix, node_count_, "prefix");
                   validate_sets(s.cycle, node_count_, "cycle");
                 },
                 [&](const schedules::SeededRandom& s) {
                   if (!(s.p >= 0.0 && s.p <= 1.0)) {
                     fail(ErrorKind::kInvalidInput,
                          "activation probability must lie in [0, 1]");
                   }
                 },
                 [&](const schedules::SeededRFair& s) {
                   if (s.r < 1) {
                     fail(ErrorKind::kInvalidInput, "r must be at least 1");
                   }
                 },
                 [](const schedules::Synchronous&) {},
                 [](const schedules::RoundRobin&) {},
             },
             spec_);
}

bool Schedule::finitely_phased() const {
  return std::holds_alternative<schedules::Periodic>(spec_) ||
         std::holds_alternative<schedules::Synchronous>(spec_) ||
         std::holds_alternative<schedules::RoundRobin>(spec_);
}

bool Schedule::is_finite() const {
  return std::holds_alternative<schedules::ExplicitList>(spec_);
}

std::optional<std::size_t> Schedule::finite_length() const {
  if (const auto* list = std::get_if<schedules::ExplicitList>(&spec_)) {
    return list->sets.size();
  }
  return std::nullopt;
}

ScheduleStream::ScheduleStream(const Schedule& schedule)
    : schedule_(schedule), idle_(schedule.node_count(), 0) {
  if (const auto* s = std::get_if<schedules::SeededRandom>(&schedule_.spec())) {
    engine_.seed(s->seed);
  } else if (const auto* f =
                 std::get_if<schedules::SeededRFair>(&schedule_.spec())) {
    engine_.seed(f->seed);
  }
}

ActivationSet ScheduleStream::next() {
  const std::size_t n = schedule_.node_count();
  const std::uint64_t t = position_++;
  return std::visit(
      Overloaded{
          [&](const schedules::ExplicitList& s) {
            return t < s.sets.size() ? s.sets[t] : ActivationSet{};
          },
          [&](const schedules::Periodic& s) {
            if (t < s.prefix.size()) return s.prefix[t];
            return s.cycle[(t - s.prefix.size()) % s.cycle.size()];
          },
          [&](const schedules::SeededRandom& s) {
            ActivationSet set;
            for (std::size_t i = 0; i < n; ++i) {
              if (unit_draw(engine_) < s.p) set |= ActivationSet::single(i);
            }
            return set;
          },
          [&](const schedules::SeededRFair& s) {
            ActivationSet set;
            for (std::size_t i = 0; i < n; ++i) {
              const bool coin = (engine_() >> 63) != 0;
              // idle_[i] counts consecutive steps without node i; reaching r
              // would open a window of r steps that misses it.
              if (coin || idle_[i] + 1 >= s.r) {
                set |= ActivationSet::single(i);
                idle_[i] = 0;
              } else {
                ++idle_[i];
              }
            }
            return set;
          },
          [&](const schedules::Synchronous&) { return ActivationSet::all(n); },
          [&](const schedules::RoundRobin&) {
            return ActivationSet::single(static_cast<std::size_t>(t % n));
          },
      },
      schedule_.spec());
}

std::optional<std::uint64_t> ScheduleStream::phase() const {
  const std::size_t n = schedule_.node_count();
  const auto& spec = schedule_.spec();
  if (const auto* p = std::get_if<schedules::Periodic>(&spec)) {
    if (position_ < p->prefix.size()) return std::nullopt;
    return (position_ - p->prefix.size()) % p->cycle.size();
  }
  if (std::holds_alternative<schedules::Synchronous>(spec)) return 0;
  if (std::holds_alternative<schedules::RoundRobin>(spec)) {
    return position_ % n;
  }
  return std::nullopt;
}

std::vector<ActivationSet> schedule_prefix(const Schedule& schedule,
                                           std::size_t length) {
  ScheduleStream stream(schedule);
  std::vector<ActivationSet> out;
  out.reserve(length);
  for (std::size_t t = 0; t < length; ++t) out.push_back(stream.next());
  return out;
}

bool check_r_fair(const std::vector<ActivationSet>& prefix, int r,
                  std::size_t node_count) {
  if (r < 1) fail(ErrorKind::kInvalidInput, "r must be at least 1");
  // A window of r entries starting at t misses node i iff i is absent from
  // r consecutive sets, so track the current run of absences per node.
  std::vector<int> absent(node_count, 0);
  for (const auto& set : prefix) {
    for (std::size_t i = 0; i < node_count; ++i) {
      absent[i] = set.contains(i) ? 0 : absent[i] + 1;
      if (absent[i] >= r) return false;
    }
  }
  return true;
}

bool covers_all(const std::vector<ActivationSet>& sets,
                std::size_t node_count) {
  ActivationSet all;
  for (const auto& set : sets) all |= set;
  return (all.bits() & ActivationSet::all(node_count).bits()) ==
         ActivationSet::all(node_count).bits();
}

}  // namespace asyncdyn
