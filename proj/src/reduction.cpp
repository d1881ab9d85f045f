#include "umauc/reduction.hpp"

#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace umauc {

std::vector<std::uint8_t> surrogate_labels(int bag_id, int m) {
  if (m < 2) throw std::invalid_argument("surrogate_labels: need m >= 2");
  if (bag_id < 1 || bag_id > m)
    throw std::invalid_argument("surrogate_labels: bag id out of range");
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(m - 1), 0);
  for (int k = bag_id; k <= m - 1; ++k)
    bits[static_cast<std::size_t>(k - 1)] = 1;
  return bits;
}

ReductionPlan::ReductionPlan(std::span<const std::int64_t> sizes)
    : m_(static_cast<int>(sizes.size())), sizes_(sizes.begin(), sizes.end()) {
  if (m_ < 2) throw std::invalid_argument("ReductionPlan: need at least 2 bags");
  prefix_.assign(static_cast<std::size_t>(m_) + 1, 0);
  for (int i = 0; i < m_; ++i) {
    if (sizes_[static_cast<std::size_t>(i)] < 1)
      throw std::invalid_argument("ReductionPlan: bag sizes must be >= 1");
    prefix_[static_cast<std::size_t>(i) + 1] =
        prefix_[static_cast<std::size_t>(i)] + sizes_[static_cast<std::size_t>(i)];
  }
}

double ReductionPlan::p(int k) const {
  if (k < 1 || k > m_ - 1)
    throw std::invalid_argument("ReductionPlan::p: label out of range");
  return static_cast<double>(prefix_[static_cast<std::size_t>(k)]) /
         static_cast<double>(total());
}

double ReductionPlan::r(int i, int j, int k) const {
  if (k < 1 || k > m_ - 1)
    throw std::invalid_argument("ReductionPlan::r: label out of range");
  if (i < 1 || i > k || j <= k || j > m_)
    throw std::invalid_argument("ReductionPlan::r: need i <= k < j");
  const double front = static_cast<double>(prefix_[static_cast<std::size_t>(k)]);
  const double rear = static_cast<double>(total() - prefix_[static_cast<std::size_t>(k)]);
  return static_cast<double>(sizes_[static_cast<std::size_t>(i - 1)]) *
         static_cast<double>(sizes_[static_cast<std::size_t>(j - 1)]) /
         (front * rear);
}

PairWeights ReductionPlan::um_weights() const {
  PairWeights z(m_);
  for (int i = 1; i < m_; ++i)
    for (int j = i + 1; j <= m_; ++j) {
      double sum = 0.0;
      for (int k = i; k < j; ++k) sum += r(i, j, k);
      z.at(i, j) = sum / static_cast<double>(m_ - 1);
    }
  return z;
}

std::string ReductionPlan::to_json() const {
  nlohmann::json out;
  out["m"] = m_;
  out["sizes"] = sizes_;
  nlohmann::json p_arr = nlohmann::json::array();
  for (int k = 1; k <= m_ - 1; ++k) p_arr.push_back(p(k));
  out["p"] = p_arr;
  nlohmann::json pairs = nlohmann::json::array();
  const PairWeights z = um_weights();
  for (int i = 1; i < m_; ++i)
    for (int j = i + 1; j <= m_; ++j)
      pairs.push_back({{"i", i}, {"j", j}, {"z", z.at(i, j)}});
  out["z_pairs"] = pairs;
  return out.dump(2);
}

double aggregate_scores(std::span<const double> head_scores) {
  if (head_scores.empty())
    throw std::invalid_argument("aggregate_scores: empty head vector");
  double sum = 0.0;
  for (double s : head_scores) sum += s;
  return sum / static_cast<double>(head_scores.size());
}

}  // namespace umauc
