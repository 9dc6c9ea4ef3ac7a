#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace survplaus {

// Which bound an incomplete observation carries: Right means only a lower
// bound on the event value is known, Left means only an upper bound.
enum class CensoringSide { Right, Left };

inline const char* to_string(CensoringSide side) {
  return side == CensoringSide::Right ? "right" : "left";
}

// One observed pair (t, d): d = 1 for an exact observation, d = 0 when t is
// only a censoring bound.
struct CensoredObservation {
  double time = 0.0;
  int status = 0;
};

// An ordered sample of censored observations with a uniform censoring side.
class SurvivalDataset {
 public:
  SurvivalDataset(std::vector<CensoredObservation> observations,
                  CensoringSide side = CensoringSide::Right)
      : observations_(std::move(observations)), side_(side) {
    if (observations_.empty()) {
      throw std::invalid_argument("SurvivalDataset: empty dataset");
    }
    for (std::size_t i = 0; i < observations_.size(); ++i) {
      const auto& obs = observations_[i];
      if (!(obs.time > 0.0) || !std::isfinite(obs.time)) {
        throw std::invalid_argument(
            "SurvivalDataset: observation " + std::to_string(i + 1) +
            " has non-positive time");
      }
      if (obs.status != 0 && obs.status != 1) {
        throw std::invalid_argument(
            "SurvivalDataset: observation " + std::to_string(i + 1) +
            " has status outside {0,1}");
      }
    }
  }

  const std::vector<CensoredObservation>& observations() const {
    return observations_;
  }
  CensoringSide censoring_side() const { return side_; }
  std::size_t size() const { return observations_.size(); }

  std::size_t event_count() const {
    std::size_t k = 0;
    for (const auto& obs : observations_) k += static_cast<std::size_t>(obs.status);
    return k;
  }

  std::size_t censored_count() const { return size() - event_count(); }

  // Same times, statuses flipped; the reversed-role view where the censoring
  // variable plays the event.
  SurvivalDataset with_flipped_status() const {
    std::vector<CensoredObservation> flipped(observations_);
    for (auto& obs : flipped) obs.status = 1 - obs.status;
    return SurvivalDataset(std::move(flipped), side_);
  }

 private:
  std::vector<CensoredObservation> observations_;
  CensoringSide side_;
};

}  // namespace survplaus
