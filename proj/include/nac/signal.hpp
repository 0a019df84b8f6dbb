#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace nac {

// Vector-valued signal sampled on a strictly increasing time grid.
// Column i of `values` is the sample at `times[i]`.
struct SampledSignal {
  std::vector<double> times;
  Eigen::MatrixXd values;  // dim x N

  int dim() const { return static_cast<int>(values.rows()); }
  int size() const { return static_cast<int>(times.size()); }
  double t_begin() const { return times.front(); }
  double t_end() const { return times.back(); }

  Eigen::VectorXd at(int i) const { return values.col(i); }

  void validate() const {
    if (times.empty()) throw std::invalid_argument("SampledSignal: empty time grid");
    if (static_cast<int>(times.size()) != values.cols())
      throw std::invalid_argument("SampledSignal: times/values length mismatch");
    for (size_t i = 1; i < times.size(); ++i)
      if (!(times[i] > times[i - 1]))
        throw std::invalid_argument("SampledSignal: times not strictly increasing");
    if (!values.allFinite())
      throw std::invalid_argument("SampledSignal: non-finite sample");
  }
};

}  // namespace nac
