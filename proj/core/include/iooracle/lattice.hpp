#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "iooracle/trace.hpp"

namespace iooracle::lattice {

struct Point {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t z = 0;
  auto operator<=>(const Point&) const = default;
};

/// Finite set of integer triples, kept sorted and duplicate-free.
class LatticeSet {
 public:
  LatticeSet() = default;
  explicit LatticeSet(std::vector<Point> points);

  void insert(Point p);
  bool contains(Point p) const;
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  std::span<const Point> points() const { return points_; }

 private:
  std::vector<Point> points_;
};

using Pair = std::pair<std::int64_t, std::int64_t>;

struct Projections {
  std::vector<Pair> ax;  // (y, z)
  std::vector<Pair> ay;  // (x, z)
  std::vector<Pair> az;  // (x, y)
};

Projections projections(const LatticeSet& v);

struct LwResult {
  bool holds = true;
  double bound = 0;
  std::size_t size = 0;
};

/// |V| <= sqrt(|A_x| |A_y| |A_z|).
LwResult lw_check(const LatticeSet& v);

enum class Source : std::uint8_t { s1, s2 };
enum class Destination : std::uint8_t { d1, d2 };

struct OperandPeriod {
  Operand operand;
  Source source = Source::s1;
  Destination destination = Destination::d1;
  bool g_input = false;   // read by a g-op during the period
  bool g_output = false;  // written by a g-op during the period
};

struct ClassCounts {
  std::uint64_t s1d1 = 0;
  std::uint64_t s1d2 = 0;
  std::uint64_t s2d1 = 0;
  std::uint64_t s2d2 = 0;

  std::uint64_t s1() const { return s1d1 + s1d2; }
  std::uint64_t d1() const { return s1d1 + s2d1; }
  std::uint64_t non_s2d2() const { return s1d1 + s1d2 + s2d1; }
  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

ClassCounts classify_operands(std::span<const OperandPeriod> periods);

struct SegmentStats {
  std::size_t index = 0;
  bool complete = false;
  std::uint64_t transfer_count = 0;  // words
  std::uint64_t flop_count = 0;
  std::uint64_t g_op_count = 0;
  ClassCounts classes;
  /// Only g-participating S2/D2 periods; the ones impose_io removes.
  std::uint64_t s2d2_g = 0;
  std::vector<OperandPeriod> periods;  // filled when PartitionOptions::keep_periods
  double lw_bound = 0;                 // filled when PartitionOptions::lattice
};

struct PartitionOptions {
  bool keep_periods = false;
  /// Also evaluate the Loomis-Whitney bound of each segment's g-op (i,j,k) set.
  bool lattice = false;
};

/// Splits a trace into segments of exactly M word transfers. Messages that
/// straddle a boundary are split word by word. The trace is replayed through a
/// fresh machine first; an illegal trace raises Errc::trace_mismatch.
std::vector<SegmentStats> segment_partition(const Trace& trace, std::uint64_t M,
                                            PartitionOptions options = {});

struct ImposedTrace {
  Trace trace;
  std::uint64_t imposed_reads = 0;
  std::uint64_t imposed_writes = 0;
};

/// Adds one-word transfers so that no operand taking part in a g-op is both
/// created and discarded: a write before the discard when it holds a g-op
/// result, otherwise a read right after its creation.
ImposedTrace impose_io(const Trace& trace);

}  // namespace iooracle::lattice
