#include "iooracle/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "iooracle/error.hpp"
#include "iooracle/machine.hpp"

namespace iooracle::lattice {

LatticeSet::LatticeSet(std::vector<Point> points) : points_(std::move(points)) {
  std::sort(points_.begin(), points_.end());
  points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
}

void LatticeSet::insert(Point p) {
  auto it = std::lower_bound(points_.begin(), points_.end(), p);
  if (it == points_.end() || *it != p) points_.insert(it, p);
}

bool LatticeSet::contains(Point p) const {
  return std::binary_search(points_.begin(), points_.end(), p);
}

namespace {

void sort_unique(std::vector<Pair>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

double lw_bound_of(std::span<const Point> pts) {
  Projections p;
  p.ax.reserve(pts.size());
  p.ay.reserve(pts.size());
  p.az.reserve(pts.size());
  for (const Point& q : pts) {
    p.ax.emplace_back(q.y, q.z);
    p.ay.emplace_back(q.x, q.z);
    p.az.emplace_back(q.x, q.y);
  }
  sort_unique(p.ax);
  sort_unique(p.ay);
  sort_unique(p.az);
  return std::sqrt(static_cast<double>(p.ax.size()) * static_cast<double>(p.ay.size()) *
                   static_cast<double>(p.az.size()));
}

}  // namespace

Projections projections(const LatticeSet& v) {
  Projections p;
  for (const Point& q : v.points()) {
    p.ax.emplace_back(q.y, q.z);
    p.ay.emplace_back(q.x, q.z);
    p.az.emplace_back(q.x, q.y);
  }
  sort_unique(p.ax);
  sort_unique(p.ay);
  sort_unique(p.az);
  return p;
}

LwResult lw_check(const LatticeSet& v) {
  LwResult r;
  r.size = v.size();
  const Projections p = projections(v);
  const double prod = static_cast<double>(p.ax.size()) * static_cast<double>(p.ay.size()) *
                      static_cast<double>(p.az.size());
  r.bound = std::sqrt(prod);
  // compare squares, the product is an exact integer
  r.holds = static_cast<double>(r.size) * static_cast<double>(r.size) <= prod;
  return r;
}

ClassCounts classify_operands(std::span<const OperandPeriod> periods) {
  ClassCounts c;
  for (const OperandPeriod& p : periods) {
    const bool s1 = p.source == Source::s1;
    const bool d1 = p.destination == Destination::d1;
    if (s1 && d1) ++c.s1d1;
    else if (s1) ++c.s1d2;
    else if (d1) ++c.s2d1;
    else ++c.s2d2;
  }
  return c;
}

namespace {

Operand from_raw(std::uint64_t raw) {
  constexpr std::uint64_t bit = std::uint64_t{1} << 63;
  return (raw & bit) ? Operand::scratch(raw & ~bit) : Operand::slow(raw);
}

struct OpenPeriod {
  Source source = Source::s1;
  bool written = false;
  bool g_input = false;
  bool g_output = false;
};

class Partitioner {
 public:
  Partitioner(std::uint64_t M, PartitionOptions options) : M_(M), options_(options) {}

  void run(const Trace& trace) {
    for (const TraceEvent& e : trace) step(e);
    if (current_.transfer_count > 0 || current_.flop_count > 0 || segments_.empty()) {
      close_segment(current_.transfer_count == M_);
    }
  }

  std::vector<SegmentStats> take() { return std::move(segments_); }

 private:
  void step(const TraceEvent& e) {
    switch (e.kind) {
      case EventKind::read:
        for (std::uint64_t w = 0; w < e.len; ++w) {
          transfer();
          open_[Operand::slow(e.base + w).raw()] = OpenPeriod{Source::s1};
        }
        break;
      case EventKind::write:
        for (std::uint64_t w = 0; w < e.len; ++w) {
          transfer();
          open_[Operand::slow(e.base + w).raw()].written = true;
        }
        break;
      case EventKind::evict:
        for (std::uint64_t w = 0; w < e.len; ++w) close(Operand::slow(e.base + w));
        break;
      case EventKind::claim:
        for (std::uint64_t w = 0; w < e.len; ++w) {
          open_[Operand::slow(e.base + w).raw()] = OpenPeriod{Source::s2};
        }
        break;
      case EventKind::alloc:
        for (std::uint64_t w = 0; w < e.len; ++w) {
          open_[Operand::scratch(e.base + w).raw()] = OpenPeriod{Source::s2};
        }
        break;
      case EventKind::release:
        for (std::uint64_t w = 0; w < e.len; ++w) close(Operand::scratch(e.base + w));
        break;
      case EventKind::imposed_read:
        transfer();
        open_[e.output.raw()].source = Source::s1;
        break;
      case EventKind::imposed_write:
        transfer();
        open_[e.output.raw()].written = true;
        break;
      case EventKind::flop:
        ++current_.flop_count;
        if (e.g_op) {
          ++current_.g_op_count;
          for (std::size_t i = 0; i < e.input_count; ++i) open_[e.inputs[i].raw()].g_input = true;
          open_[e.output.raw()].g_output = true;
          if (options_.lattice) points_.push_back(Point{e.label.i, e.label.j, e.label.k});
        }
        break;
    }
  }

  // A full segment stays open until the next transfer, so trailing
  // arithmetic belongs to it.
  void transfer() {
    if (current_.transfer_count == M_) {
      close_segment(true);
      for (auto& [raw, p] : open_) p = OpenPeriod{Source::s1};
    }
    ++current_.transfer_count;
  }

  void finish(Operand op, const OpenPeriod& p, Destination d) {
    OperandPeriod period{op, p.source, d, p.g_input, p.g_output};
    const ClassCounts one = classify_operands(std::span<const OperandPeriod>(&period, 1));
    current_.classes.s1d1 += one.s1d1;
    current_.classes.s1d2 += one.s1d2;
    current_.classes.s2d1 += one.s2d1;
    current_.classes.s2d2 += one.s2d2;
    if (one.s2d2 && (p.g_input || p.g_output)) ++current_.s2d2_g;
    if (options_.keep_periods) current_.periods.push_back(period);
  }

  void close(Operand op) {
    auto it = open_.find(op.raw());
    if (it == open_.end()) return;
    finish(op, it->second, it->second.written ? Destination::d1 : Destination::d2);
    open_.erase(it);
  }

  void close_segment(bool complete) {
    for (const auto& [raw, p] : open_) finish(from_raw(raw), p, Destination::d1);
    current_.complete = complete;
    current_.index = segments_.size();
    if (options_.lattice) {
      LatticeSet v(std::move(points_));
      current_.lw_bound = lw_bound_of(v.points());
      points_.clear();
    }
    segments_.push_back(std::move(current_));
    current_ = SegmentStats{};
  }

  std::uint64_t M_;
  PartitionOptions options_;
  std::unordered_map<std::uint64_t, OpenPeriod> open_;
  SegmentStats current_;
  std::vector<Point> points_;
  std::vector<SegmentStats> segments_;
};

}  // namespace

std::vector<SegmentStats> segment_partition(const Trace& trace, std::uint64_t M,
                                            PartitionOptions options) {
  if (M < 1) throw Error(Errc::invalid_params, "segment length M must be >= 1");
  replay(trace, M);
  Partitioner p(M, options);
  p.run(trace);
  return p.take();
}

namespace {

struct Life {
  bool created = false;
  bool sourced = false;
  bool written = false;
  bool g_input = false;
  bool g_output = false;
  std::size_t created_at = 0;
};

}  // namespace

ImposedTrace impose_io(const Trace& trace) {
  std::unordered_map<std::uint64_t, Life> live;
  std::vector<std::vector<Operand>> before(trace.size());  // imposed writes
  std::vector<std::vector<Operand>> after(trace.size());   // imposed reads
  ImposedTrace out;

  auto end_life = [&](Operand op, std::size_t at) {
    auto it = live.find(op.raw());
    if (it == live.end()) return;
    const Life& l = it->second;
    if (l.created && !l.sourced && !l.written && (l.g_input || l.g_output)) {
      if (l.g_output) {
        before[at].push_back(op);
        ++out.imposed_writes;
      } else {
        after[l.created_at].push_back(op);
        ++out.imposed_reads;
      }
    }
    live.erase(it);
  };

  for (std::size_t i = 0; i < trace.size(); ++i) {
    const TraceEvent& e = trace[i];
    switch (e.kind) {
      case EventKind::read:
        for (std::uint64_t w = 0; w < e.len; ++w) live[Operand::slow(e.base + w).raw()] = Life{};
        break;
      case EventKind::claim:
        for (std::uint64_t w = 0; w < e.len; ++w) {
          live[Operand::slow(e.base + w).raw()] = Life{true, false, false, false, false, i};
        }
        break;
      case EventKind::alloc:
        for (std::uint64_t w = 0; w < e.len; ++w) {
          live[Operand::scratch(e.base + w).raw()] = Life{true, false, false, false, false, i};
        }
        break;
      case EventKind::write:
        for (std::uint64_t w = 0; w < e.len; ++w) live[Operand::slow(e.base + w).raw()].written = true;
        break;
      case EventKind::imposed_read: live[e.output.raw()].sourced = true; break;
      case EventKind::imposed_write: live[e.output.raw()].written = true; break;
      case EventKind::evict:
        for (std::uint64_t w = 0; w < e.len; ++w) end_life(Operand::slow(e.base + w), i);
        break;
      case EventKind::release:
        for (std::uint64_t w = 0; w < e.len; ++w) end_life(Operand::scratch(e.base + w), i);
        break;
      case EventKind::flop:
        if (e.g_op) {
          for (std::size_t k = 0; k < e.input_count; ++k) live[e.inputs[k].raw()].g_input = true;
          live[e.output.raw()].g_output = true;
        }
        break;
    }
  }

  out.trace.reserve(trace.size() + out.imposed_reads + out.imposed_writes);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    for (Operand op : before[i]) {
      TraceEvent w;
      w.kind = EventKind::imposed_write;
      w.output = op;
      out.trace.push_back(w);
    }
    out.trace.push_back(trace[i]);
    for (Operand op : after[i]) {
      TraceEvent r;
      r.kind = EventKind::imposed_read;
      r.output = op;
      out.trace.push_back(r);
    }
  }
  return out;
}

}  // namespace iooracle::lattice
