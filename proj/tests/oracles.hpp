#pragma once

// Independent reference implementations used as test oracles. They follow
// the written rules directly and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace oracle {

struct Component {
  float w, m, v;
};

struct GmmSettings {
  int k = 3;
  float alpha = 0.01f, match_k = 2.5f, fraction = 0.7f, init_var = 2500.0f, floor = 4.0f, replace = 0.05f;
  bool zero_missing = true;
};

// One pixel of the adaptive mixture, rules spelled out step by step.
struct Pixel {
  std::vector<Component> mix;
  bool observed = false;

  void seed(float x, const GmmSettings& s) {
    mix.assign(s.k, Component{0.0f, 0.0f, s.init_var});
    mix[0] = {1.0f, x, s.init_var};
  }

  // Returns true if the pixel is foreground.
  bool update(float x, const GmmSettings& s) {
    if (s.zero_missing && x == 0.0f) return false;
    if (!observed) {
      seed(x, s);
      observed = true;
      return false;
    }
    int hit = -1;
    for (int i = 0; i < s.k && hit < 0; ++i) {
      const float d = x - mix[i].m;
      if (mix[i].w > 0.0f && d * d <= s.match_k * s.match_k * mix[i].v) hit = i;
    }
    if (hit >= 0) {
      for (auto& c : mix) c.w = (1.0f - s.alpha) * c.w;
      auto& h = mix[hit];
      h.w = h.w + s.alpha;
      const float rho = std::min(std::max(s.alpha / h.w, s.alpha), 1.0f);
      h.m = (1.0f - rho) * h.m + rho * x;
      const float d = x - h.m;
      h.v = std::max((1.0f - rho) * h.v + rho * (d * d), s.floor);
    } else {
      mix.back() = {s.replace, x, s.init_var};
    }
    float total = 0.0f;
    for (const auto& c : mix) total += c.w;
    const float scale = 1.0f / total;
    for (auto& c : mix) c.w = c.w * scale;

    std::vector<int> order(s.k);
    for (int i = 0; i < s.k; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return double(mix[a].w) / std::sqrt(double(mix[a].v)) > double(mix[b].w) / std::sqrt(double(mix[b].v));
    });
    std::vector<Component> sorted;
    int rank = -1;
    for (int r = 0; r < s.k; ++r) {
      sorted.push_back(mix[order[r]]);
      if (order[r] == hit) rank = r;
    }
    mix = sorted;
    int background = s.k;
    float cum = 0.0f;
    for (int b = 0; b < s.k; ++b) {
      cum += mix[b].w;
      if (cum > s.fraction) {
        background = b + 1;
        break;
      }
    }
    return hit < 0 || rank >= background;
  }
};

// Binary morphology straight from the definition, out-of-grid = 0.
inline std::vector<std::uint8_t> morph(const std::vector<std::uint8_t>& m, int w, int h, bool erode) {
  std::vector<std::uint8_t> out(m.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bool all = true, any = false;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int xx = x + dx, yy = y + dy;
          const bool v = xx >= 0 && yy >= 0 && xx < w && yy < h && m[yy * w + xx];
          all = all && v;
          any = any || v;
        }
      }
      out[y * w + x] = erode ? all : any;
    }
  }
  return out;
}

inline std::vector<std::uint8_t> smooth(const std::vector<std::uint8_t>& m, int w, int h) {
  const auto opened = morph(morph(m, w, h, true), w, h, false);
  return morph(morph(opened, w, h, false), w, h, true);
}

// Maximal runs [s, e] over zero-padded counts with c[s-1] < c[s],
// c[t] <= c[t+1] for s <= t < e and c[e] > c[e+1], found by trying every
// start and end and keeping those not contained in another qualifying run.
inline std::vector<std::pair<std::size_t, std::size_t>> event_runs(const std::vector<int>& counts) {
  const auto n = static_cast<long>(counts.size());
  const auto c = [&](long i) { return i < 0 || i >= n ? 0 : counts[static_cast<std::size_t>(i)]; };
  const auto qualifies = [&](long s, long e) {
    if (!(c(s - 1) < c(s)) || !(c(e) > c(e + 1))) return false;
    for (long t = s; t < e; ++t) {
      if (!(c(t) <= c(t + 1))) return false;
    }
    return true;
  };
  std::vector<std::pair<long, long>> runs;
  for (long s = 0; s < n; ++s) {
    for (long e = s; e < n; ++e) {
      if (qualifies(s, e)) runs.emplace_back(s, e);
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> maximal;
  for (const auto& r : runs) {
    bool inside = false;
    for (const auto& o : runs) {
      if (o != r && o.first <= r.first && r.second <= o.second) inside = true;
    }
    if (!inside) maximal.emplace_back(r.first, r.second);
  }
  return maximal;
}

inline std::int64_t at(const std::vector<std::int64_t>& a, long t) {
  return t < 0 || t >= static_cast<long>(a.size()) ? 0 : a[static_cast<std::size_t>(t)];
}

inline std::vector<bool> cole(const std::vector<std::int64_t>& a) {
  std::vector<bool> wake;
  for (long t = 0; t < static_cast<long>(a.size()); ++t) {
    const double d = 0.001 * (106.0 * at(a, t - 4) + 54.0 * at(a, t - 3) + 58.0 * at(a, t - 2) + 76.0 * at(a, t - 1) +
                              230.0 * at(a, t) + 74.0 * at(a, t + 1) + 67.0 * at(a, t + 2));
    wake.push_back(!(d < 1.0));
  }
  return wake;
}

inline std::vector<bool> sadeh(const std::vector<std::int64_t>& a) {
  std::vector<bool> wake;
  for (long t = 0; t < static_cast<long>(a.size()); ++t) {
    double sum = 0.0;
    int nat = 0;
    for (long i = t - 5; i <= t + 5; ++i) {
      sum += static_cast<double>(at(a, i));
      nat += at(a, i) >= 50 && at(a, i) < 100;
    }
    const double avg = sum / 11.0;
    double mean6 = 0.0;
    for (long i = t - 5; i <= t; ++i) mean6 += static_cast<double>(at(a, i));
    mean6 /= 6.0;
    double ss = 0.0;
    for (long i = t - 5; i <= t; ++i) ss += (at(a, i) - mean6) * (at(a, i) - mean6);
    const double sd = std::sqrt(ss / 5.0);
    const double ps = 7.601 - 0.065 * avg - 1.08 * nat - 0.056 * sd - 0.703 * std::log(at(a, t) + 1.0);
    wake.push_back(!(ps >= 0.0));
  }
  return wake;
}

}  // namespace oracle

// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path = std::filesystem::temp_directory_path() / ("sleepmon_" + tag + "_" + std::to_string(rng()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};
