#include "ifrl/signal_math.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>
#include <unordered_map>

#include "ifrl/error.hpp"

namespace ifrl::signal {
namespace {

[[noreturn]] void invalid_record(const TokenRecord& r, const std::string& what) {
  throw Error(ErrorCode::kInvalidRecord,
              "record (" + r.sample_id + ", " + std::to_string(r.position) + "): " + what);
}

class NeumaierSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must be finite");
}

}  // namespace

void validate(const TokenRecord& r) {
  if (!std::isfinite(r.nll) || !std::isfinite(r.entropy) || !std::isfinite(r.logp)) {
    invalid_record(r, "nll, entropy and logp must be finite");
  }
  if (r.nll < 0.0) invalid_record(r, "nll must be >= 0");
  if (r.entropy < 0.0) invalid_record(r, "entropy must be >= 0");
  if (r.logp > 0.0) invalid_record(r, "logp must be <= 0");
  if (std::abs(r.nll + r.logp) > kNllLogpTolerance) invalid_record(r, "nll must equal -logp");
  if (r.position < 0) invalid_record(r, "position must be >= 0");
  if (r.advantage && !std::isfinite(*r.advantage)) invalid_record(r, "advantage must be finite");
}

void validate_batch(std::span<const TokenRecord> batch) {
  std::vector<const TokenRecord*> order;
  order.reserve(batch.size());
  for (const auto& r : batch) {
    validate(r);
    order.push_back(&r);
  }
  std::sort(order.begin(), order.end(), [](const TokenRecord* a, const TokenRecord* b) {
    return std::tie(a->sample_id, a->position) < std::tie(b->sample_id, b->position);
  });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (order[i - 1]->sample_id == order[i]->sample_id &&
        order[i - 1]->position == order[i]->position) {
      invalid_record(*order[i], "duplicate (sample_id, position)");
    }
  }
}

double compensated_sum(std::span<const double> values) {
  NeumaierSum s;
  for (double v : values) s.add(v);
  return s.value();
}

double compensated_mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return compensated_sum(values) / static_cast<double>(values.size());
}

double entropy(std::span<const double> dist) {
  if (dist.empty()) throw Error(ErrorCode::kNotNormalized, "distribution is empty");
  NeumaierSum total;
  NeumaierSum h;
  for (double p : dist) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(ErrorCode::kNotNormalized, "probabilities must be finite and non-negative");
    }
    total.add(p);
    if (p > 0.0) h.add(-p * std::log(p));
  }
  if (std::abs(total.value() - 1.0) > 1e-6) {
    throw Error(ErrorCode::kNotNormalized,
                "probabilities sum to " + std::to_string(total.value()));
  }
  return h.value();
}

double quantile_linear(std::span<const double> values, double q) {
  if (values.empty()) throw Error(ErrorCode::kEmptyBatch, "quantile of an empty set");
  if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "quantile must lie in [0, 1]");
  std::vector<double> v(values.begin(), values.end());
  const double h = static_cast<double>(v.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(lo), v.end());
  const double x_lo = v[lo];
  if (frac == 0.0 || lo + 1 >= v.size()) return x_lo;
  const double x_hi = *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(lo) + 1, v.end());
  return x_lo + frac * (x_hi - x_lo);
}

SelectionResult sft_select(std::span<const TokenRecord> batch, double r_percent, double alpha,
                           QuantileReading reading) {
  if (batch.empty()) throw Error(ErrorCode::kEmptyBatch, "selection batch is empty");
  if (!(r_percent > 0.0 && r_percent <= 100.0)) {
    throw Error(ErrorCode::kBadPercent, "r_percent must lie in (0, 100], got " + std::to_string(r_percent));
  }
  require_finite(alpha, "alpha");
  validate_batch(batch);

  const std::size_t n = batch.size();
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) scores[i] = selection_score(batch[i], alpha);

  const double fraction = r_percent / 100.0;
  const double q = reading == QuantileReading::kSelectedFraction ? 1.0 - fraction : fraction;
  const double keep_fraction = 1.0 - q;

  SelectionResult out;
  out.r_percent = r_percent;
  out.alpha = alpha;
  out.threshold = quantile_linear(scores, q);

  std::vector<std::size_t> chosen;
  std::vector<std::size_t> tied;
  for (std::size_t i = 0; i < n; ++i) {
    if (scores[i] > out.threshold) {
      chosen.push_back(i);
    } else if (scores[i] == out.threshold) {
      tied.push_back(i);
    }
  }

  const auto target = static_cast<std::size_t>(std::llround(keep_fraction * static_cast<double>(n)));
  if (chosen.size() < target && !tied.empty()) {
    std::sort(tied.begin(), tied.end(), [&](std::size_t a, std::size_t b) {
      return std::tie(batch[a].sample_id, batch[a].position) <
             std::tie(batch[b].sample_id, batch[b].position);
    });
    const std::size_t admit = std::min(target - chosen.size(), tied.size());
    chosen.insert(chosen.end(), tied.begin(), tied.begin() + static_cast<std::ptrdiff_t>(admit));
    out.tie_admitted = admit;
  }

  out.selected.reserve(chosen.size());
  for (std::size_t i : chosen) out.selected.push_back(batch[i].key());
  std::sort(out.selected.begin(), out.selected.end());
  out.selected_fraction = static_cast<double>(out.selected.size()) / static_cast<double>(n);
  return out;
}

double entropy_sft_loss(std::span<const TokenRecord> batch, const SelectionResult& selection) {
  if (selection.selected.empty()) throw Error(ErrorCode::kEmptySelection, "no tokens selected");
  NeumaierSum total;
  std::size_t matched = 0;
  for (const auto& r : batch) {
    if (std::binary_search(selection.selected.begin(), selection.selected.end(), r.key())) {
      total.add(r.nll);
      ++matched;
    }
  }
  if (matched != selection.selected.size()) {
    throw Error(ErrorCode::kInvalidArgument, "selection refers to tokens missing from the batch");
  }
  return total.value() / static_cast<double>(matched);
}

std::vector<double> grpo_advantages(std::span<const double> group_rewards) {
  if (group_rewards.size() < 2) {
    throw Error(ErrorCode::kGroupTooSmall, "GRPO groups need at least two rewards");
  }
  for (double r : group_rewards) require_finite(r, "group reward");
  const double n = static_cast<double>(group_rewards.size());
  const double mean = compensated_mean(group_rewards);
  NeumaierSum sq;
  for (double r : group_rewards) sq.add((r - mean) * (r - mean));
  const double std_dev = std::sqrt(sq.value() / n);

  std::vector<double> out(group_rewards.size(), 0.0);
  if (std_dev < kMinGroupStd) return out;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (group_rewards[i] - mean) / std_dev;
  return out;
}

std::vector<double> tea_covariance(std::span<const TokenRecord> records, CovarianceScope scope) {
  if (records.empty()) throw Error(ErrorCode::kEmptyBatch, "covariance over an empty rollout batch");
  for (const auto& r : records) {
    if (!r.advantage) {
      throw Error(ErrorCode::kMissingAdvantage,
                  "record (" + r.sample_id + ", " + std::to_string(r.position) + ") has no advantage");
    }
  }

  std::vector<double> out(records.size());
  auto fill = [&](const std::vector<std::size_t>& idx) {
    NeumaierSum logp_sum;
    NeumaierSum adv_sum;
    for (std::size_t i : idx) {
      logp_sum.add(records[i].logp);
      adv_sum.add(*records[i].advantage);
    }
    const double n = static_cast<double>(idx.size());
    const double logp_mean = logp_sum.value() / n;
    const double adv_mean = adv_sum.value() / n;
    for (std::size_t i : idx) {
      out[i] = (records[i].logp - logp_mean) * (*records[i].advantage - adv_mean);
    }
  };

  if (scope == CovarianceScope::kBatch) {
    std::vector<std::size_t> all(records.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    fill(all);
  } else {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < records.size(); ++i) groups[records[i].sample_id].push_back(i);
    for (const auto& [_, idx] : groups) fill(idx);
  }
  return out;
}

std::vector<double> softmax(std::span<const double> values, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(ErrorCode::kBadTemperature, "tau must be positive, got " + std::to_string(tau));
  }
  if (values.empty()) return {};
  for (double v : values) require_finite(v, "softmax input");
  const double max = *std::max_element(values.begin(), values.end());
  std::vector<double> out(values.size());
  NeumaierSum z;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = std::exp((values[i] - max) / tau);
    z.add(out[i]);
  }
  const double norm = z.value();
  for (double& v : out) v /= norm;
  return out;
}

std::vector<double> tea_coefficients(std::span<const double> cov, double tau, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw Error(ErrorCode::kInvalidArgument, "coefficient cap c must be positive");
  }
  auto w = softmax(cov, tau);
  if (w.empty()) throw Error(ErrorCode::kEmptyBatch, "no tokens in rollout batch");
  const double cap = c / static_cast<double>(w.size());
  for (double& v : w) v = std::min(v, cap);
  return w;
}

TeaResult tea_loss(std::span<const TokenRecord> records, double tau, double c, CovarianceScope scope) {
  TeaResult out;
  out.covariances = tea_covariance(records, scope);
  out.coefficients = tea_coefficients(out.covariances, tau, c);
  NeumaierSum acc;
  for (std::size_t i = 0; i < records.size(); ++i) acc.add(out.coefficients[i] * records[i].entropy);
  out.l_tea = static_cast<double>(records.size()) * acc.value();
  return out;
}

double combined_objective(double l_grpo, double l_tea, double lambda) {
  require_finite(l_grpo, "l_grpo");
  require_finite(l_tea, "l_tea");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::kInvalidArgument, "lambda must be finite and non-negative");
  }
  return l_grpo - lambda * l_tea;
}

std::vector<EntropyReportRow> token_entropy_report(std::span<const TokenRecord> records,
                                                   std::size_t top_k, std::size_t min_freq) {
  struct Acc {
    NeumaierSum sum;
    std::size_t count = 0;
  };
  std::unordered_map<std::string, Acc> groups;
  for (const auto& r : records) {
    if (!r.token_text) continue;
    auto& g = groups[*r.token_text];
    g.sum.add(r.entropy);
    ++g.count;
  }

  std::vector<EntropyReportRow> rows;
  rows.reserve(groups.size());
  for (const auto& [text, acc] : groups) {
    if (acc.count < min_freq) continue;
    rows.push_back({text, acc.sum.value() / static_cast<double>(acc.count), acc.count});
  }
  std::sort(rows.begin(), rows.end(), [](const EntropyReportRow& a, const EntropyReportRow& b) {
    if (a.mean_entropy != b.mean_entropy) return a.mean_entropy > b.mean_entropy;
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.token_text < b.token_text;
  });
  if (rows.size() > top_k) rows.resize(top_k);
  return rows;
}

}  // namespace ifrl::signal
