#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "stream_al/linalg.hpp"

namespace stream_al {

/// One unlabeled stream observation and its arrival index.
struct StreamPoint {
  std::uint64_t index = 0;
  Vector x;
};

/// Ordered source of unlabeled observations. Deterministic for a fixed seed
/// or file.
class StreamSource {
 public:
  virtual ~StreamSource() = default;
  /// Next point in arrival order, or nullopt when the stream is exhausted.
  virtual std::optional<StreamPoint> next() = 0;
  virtual std::size_t dimension() const = 0;
};

/// Returns the response for a stream arrival index. Pure: the same index
/// always yields the same label. Throws OracleError for unknown indices.
class LabelOracle {
 public:
  virtual ~LabelOracle() = default;
  virtual double label(std::uint64_t index) const = 0;
};

struct TestSet {
  std::vector<Vector> points;
  Vector labels;
};

/// Everything one replication needs: the free initial design, the stream with
/// its oracle, and a held-out test set. All raw (unwhitened).
struct ScenarioInstance {
  std::vector<Vector> design_points;
  Vector design_labels;
  std::unique_ptr<StreamSource> stream;
  std::shared_ptr<const LabelOracle> oracle;
  TestSet test;
};

/// Factory of replications. The produced data must be a pure function of the
/// seed so that every strategy arm sees the same stream.
class Scenario {
 public:
  virtual ~Scenario() = default;
  virtual std::size_t dimension() const = 0;
  virtual ScenarioInstance instantiate(std::uint64_t seed, std::size_t design_size,
                                       std::size_t test_size) const = 0;
};

}  // namespace stream_al
