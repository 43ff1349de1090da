#include "scs/diff.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

namespace scs {

namespace {

class Differ {
 public:
  Differ(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) : a_(a), b_(b) {}

  std::vector<Edit> run() {
    diff(0, a_.size(), 0, b_.size());
    return std::move(out_);
  }

 private:
  void keep(std::size_t x, std::size_t y) {
    out_.push_back({EditKind::Keep, static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y)});
  }

  void diff(std::size_t a0, std::size_t a1, std::size_t b0, std::size_t b1) {
    std::size_t prefix = 0;
    while (a0 + prefix < a1 && b0 + prefix < b1 && a_[a0 + prefix] == b_[b0 + prefix]) ++prefix;
    for (std::size_t i = 0; i < prefix; ++i) keep(a0 + i, b0 + i);
    a0 += prefix;
    b0 += prefix;
    std::size_t suffix = 0;
    while (a1 - suffix > a0 && b1 - suffix > b0 && a_[a1 - suffix - 1] == b_[b1 - suffix - 1]) ++suffix;
    a1 -= suffix;
    b1 -= suffix;

    if (a0 == a1) {
      for (auto y = b0; y < b1; ++y) out_.push_back({EditKind::Insert, static_cast<std::uint32_t>(a0), static_cast<std::uint32_t>(y)});
    } else if (b0 == b1) {
      for (auto x = a0; x < a1; ++x) out_.push_back({EditKind::Delete, static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(b0)});
    } else {
      bisect(a0, a1, b0, b1);
    }
    for (std::size_t i = 0; i < suffix; ++i) keep(a1 + i, b1 + i);
  }

  // Finds the middle snake and recurses on both halves.
  void bisect(std::size_t a0, std::size_t a1, std::size_t b0, std::size_t b1) {
    const long n = static_cast<long>(a1 - a0);
    const long m = static_cast<long>(b1 - b0);
    const long max_d = (n + m + 1) / 2;
    const long offset = max_d;
    const long length = 2 * max_d + 2;
    std::vector<long> v1(length, -1), v2(length, -1);
    v1[offset + 1] = 0;
    v2[offset + 1] = 0;
    const long delta = n - m;
    const bool front = (delta % 2) != 0;
    long k1start = 0, k1end = 0, k2start = 0, k2end = 0;
    auto A = [&](long i) { return a_[a0 + static_cast<std::size_t>(i)]; };
    auto B = [&](long i) { return b_[b0 + static_cast<std::size_t>(i)]; };

    for (long d = 0; d < max_d; ++d) {
      for (long k1 = -d + k1start; k1 <= d - k1end; k1 += 2) {
        const long k1_offset = offset + k1;
        long x1 = (k1 == -d || (k1 != d && v1[k1_offset - 1] < v1[k1_offset + 1]))
                      ? v1[k1_offset + 1]
                      : v1[k1_offset - 1] + 1;
        long y1 = x1 - k1;
        while (x1 < n && y1 < m && A(x1) == B(y1)) {
          ++x1;
          ++y1;
        }
        v1[k1_offset] = x1;
        if (x1 > n) {
          k1end += 2;
        } else if (y1 > m) {
          k1start += 2;
        } else if (front) {
          const long k2_offset = offset + delta - k1;
          if (k2_offset >= 0 && k2_offset < length && v2[k2_offset] != -1) {
            const long x2 = n - v2[k2_offset];
            if (x1 >= x2) return split(a0, a1, b0, b1, x1, y1);
          }
        }
      }
      for (long k2 = -d + k2start; k2 <= d - k2end; k2 += 2) {
        const long k2_offset = offset + k2;
        long x2 = (k2 == -d || (k2 != d && v2[k2_offset - 1] < v2[k2_offset + 1]))
                      ? v2[k2_offset + 1]
                      : v2[k2_offset - 1] + 1;
        long y2 = x2 - k2;
        while (x2 < n && y2 < m && A(n - x2 - 1) == B(m - y2 - 1)) {
          ++x2;
          ++y2;
        }
        v2[k2_offset] = x2;
        if (x2 > n) {
          k2end += 2;
        } else if (y2 > m) {
          k2start += 2;
        } else if (!front) {
          const long k1_offset = offset + delta - k2;
          if (k1_offset >= 0 && k1_offset < length && v1[k1_offset] != -1) {
            const long x1 = v1[k1_offset];
            const long y1 = offset + x1 - k1_offset;
            if (x1 >= n - x2) return split(a0, a1, b0, b1, x1, y1);
          }
        }
      }
    }
    // No common element at all.
    for (auto x = a0; x < a1; ++x) out_.push_back({EditKind::Delete, static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(b0)});
    for (auto y = b0; y < b1; ++y) out_.push_back({EditKind::Insert, static_cast<std::uint32_t>(a1), static_cast<std::uint32_t>(y)});
  }

  void split(std::size_t a0, std::size_t a1, std::size_t b0, std::size_t b1, long x, long y) {
    diff(a0, a0 + static_cast<std::size_t>(x), b0, b0 + static_cast<std::size_t>(y));
    diff(a0 + static_cast<std::size_t>(x), a1, b0 + static_cast<std::size_t>(y), b1);
  }

  const std::vector<std::uint32_t>& a_;
  const std::vector<std::uint32_t>& b_;
  std::vector<Edit> out_;
};

}  // namespace

std::vector<Edit> diff_sequences(std::span<const std::string_view> a,
                                 std::span<const std::string_view> b) {
  // Intern lines so the inner loops compare integers.
  std::unordered_map<std::string_view, std::uint32_t> ids;
  auto intern = [&](std::span<const std::string_view> seq) {
    std::vector<std::uint32_t> out;
    out.reserve(seq.size());
    for (auto line : seq) out.push_back(ids.emplace(line, static_cast<std::uint32_t>(ids.size())).first->second);
    return out;
  };
  const auto ia = intern(a);
  const auto ib = intern(b);
  auto edits = Differ(ia, ib).run();

  // Deletions first within each changed run.
  for (std::size_t i = 0; i < edits.size();) {
    if (edits[i].kind == EditKind::Keep) {
      ++i;
      continue;
    }
    auto j = i;
    while (j < edits.size() && edits[j].kind != EditKind::Keep) ++j;
    std::stable_partition(edits.begin() + static_cast<long>(i), edits.begin() + static_cast<long>(j),
                          [](const Edit& e) { return e.kind == EditKind::Delete; });
    i = j;
  }
  return edits;
}

}  // namespace scs
