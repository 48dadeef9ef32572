#include "libmig/merge/diff.hpp"

#include <unordered_map>

#include <fmt/format.h>

#include "libmig/common/text.hpp"
#include "libmig/error.hpp"

namespace libmig::merge {

namespace {

enum class Op : char { Equal, Delete, Insert };

class Myers {
 public:
  Myers(const std::vector<int>& a, const std::vector<int>& b) : a_(a), b_(b) {
    auto max = (a.size() + b.size() + 1) / 2 + 1;
    vf_.resize(2 * max + 3);
    vb_.resize(2 * max + 3);
    offset_ = static_cast<long>(max) + 1;
  }

  std::vector<Op> run() {
    solve(0, static_cast<long>(a_.size()), 0, static_cast<long>(b_.size()));
    return std::move(ops_);
  }

 private:
  const std::vector<int>& a_;
  const std::vector<int>& b_;
  std::vector<long> vf_, vb_;
  long offset_;
  std::vector<Op> ops_;

  long& vf(long k) { return vf_[static_cast<std::size_t>(k + offset_)]; }
  long& vb(long k) { return vb_[static_cast<std::size_t>(k + offset_)]; }

  void emit(Op op, long n) {
    for (long i = 0; i < n; ++i) ops_.push_back(op);
  }

  void solve(long a0, long a1, long b0, long b1) {
    long prefix = 0;
    while (a0 + prefix < a1 && b0 + prefix < b1 && a_[a0 + prefix] == b_[b0 + prefix]) ++prefix;
    emit(Op::Equal, prefix);
    a0 += prefix;
    b0 += prefix;
    long suffix = 0;
    while (a1 - suffix > a0 && b1 - suffix > b0 && a_[a1 - suffix - 1] == b_[b1 - suffix - 1]) ++suffix;
    a1 -= suffix;
    b1 -= suffix;

    if (a0 == a1) {
      emit(Op::Insert, b1 - b0);
    } else if (b0 == b1) {
      emit(Op::Delete, a1 - a0);
    } else {
      auto [x0, y0, x1, y1] = middle_snake(a0, a1, b0, b1);
      solve(a0, a0 + x0, b0, b0 + y0);
      emit(Op::Equal, x1 - x0);
      solve(a0 + x1, a1, b0 + y1, b1);
    }
    emit(Op::Equal, suffix);
  }

  // Returns the middle snake in coordinates local to (a0, b0).
  std::tuple<long, long, long, long> middle_snake(long a0, long a1, long b0, long b1) {
    long n = a1 - a0, m = b1 - b0;
    long delta = n - m;
    bool odd = (delta & 1) != 0;
    long max = (n + m + 1) / 2;
    vf(1) = 0;
    vb(1) = 0;
    for (long d = 0; d <= max; ++d) {
      for (long k = -d; k <= d; k += 2) {
        long x = (k == -d || (k != d && vf(k - 1) < vf(k + 1))) ? vf(k + 1) : vf(k - 1) + 1;
        long y = x - k;
        long sx = x, sy = y;
        while (x < n && y < m && a_[a0 + x] == b_[b0 + y]) ++x, ++y;
        vf(k) = x;
        long c = delta - k;
        if (odd && c >= -(d - 1) && c <= d - 1 && vf(k) + vb(c) >= n) return {sx, sy, x, y};
      }
      for (long k = -d; k <= d; k += 2) {
        long x = (k == -d || (k != d && vb(k - 1) < vb(k + 1))) ? vb(k + 1) : vb(k - 1) + 1;
        long y = x - k;
        long sx = x, sy = y;
        while (x < n && y < m && a_[a1 - 1 - x] == b_[b1 - 1 - y]) ++x, ++y;
        vb(k) = x;
        long c = delta - k;
        if (!odd && c >= -d && c <= d && vb(k) + vf(c) >= n) return {n - x, m - y, n - sx, m - sy};
      }
    }
    throw Error(ErrorKind::InsertOutOfRange, "diff did not converge");
  }
};

}  // namespace

std::vector<DiffHunk> diff_lines(const std::vector<std::string>& original,
                                 const std::vector<std::string>& migrated) {
  std::unordered_map<std::string_view, int> ids;
  auto intern = [&](const std::vector<std::string>& lines) {
    std::vector<int> out;
    out.reserve(lines.size());
    for (const auto& l : lines) out.push_back(ids.emplace(l, static_cast<int>(ids.size())).first->second);
    return out;
  };
  auto a = intern(original);
  auto b = intern(migrated);
  auto ops = Myers(a, b).run();

  std::vector<DiffHunk> hunks;
  std::size_t i = 0, j = 0;
  bool open = false;
  for (auto op : ops) {
    if (op == Op::Equal) {
      open = false;
      ++i, ++j;
      continue;
    }
    if (!open) {
      hunks.push_back(DiffHunk{static_cast<int>(i) + 1, {}, static_cast<int>(j) + 1, {}});
      open = true;
    }
    if (op == Op::Delete) hunks.back().old_lines.push_back(original[i++]);
    else hunks.back().new_lines.push_back(migrated[j++]);
  }
  return hunks;
}

std::vector<DiffHunk> diff_files(std::string_view original, std::string_view migrated) {
  return diff_lines(text::split_lines(original), text::split_lines(migrated));
}

std::string apply_hunks(std::string_view original, const std::vector<DiffHunk>& hunks) {
  auto lines = text::split_lines(original);
  std::string out;
  std::size_t i = 0;
  for (const auto& h : hunks) {
    auto start = static_cast<std::size_t>(h.old_start - 1);
    if (h.old_start < 1 || start < i || start + h.old_lines.size() > lines.size())
      throw Error(ErrorKind::InsertOutOfRange, fmt::format("hunk at line {} out of range", h.old_start));
    for (; i < start; ++i) out += lines[i];
    for (const auto& l : h.old_lines)
      if (lines[i++] != l)
        throw Error(ErrorKind::InsertOutOfRange, fmt::format("hunk at line {} does not match", h.old_start));
    for (const auto& l : h.new_lines) out += l;
  }
  for (; i < lines.size(); ++i) out += lines[i];
  return out;
}

std::size_t changed_lines(const std::vector<DiffHunk>& hunks) {
  std::size_t n = 0;
  for (const auto& h : hunks) n += h.old_lines.size() + h.new_lines.size();
  return n;
}

std::string unified_diff(std::string_view original, std::string_view migrated, std::string_view from_name,
                         std::string_view to_name, int context) {
  auto a = text::split_lines(original);
  auto b = text::split_lines(migrated);
  auto hunks = diff_lines(a, b);
  if (hunks.empty()) return {};
  auto line_out = [](std::string& out, char tag, const std::string& l) {
    out += tag;
    out += l;
    if (!l.ends_with('\n')) out += "\n\\ No newline at end of file\n";
  };
  std::string out = fmt::format("--- {}\n+++ {}\n", from_name, to_name);
  auto ctx = static_cast<std::size_t>(context);
  for (std::size_t h = 0; h < hunks.size();) {
    // Group hunks whose context windows touch.
    std::size_t g = h;
    while (g + 1 < hunks.size() &&
           static_cast<std::size_t>(hunks[g + 1].old_start - 1) <=
               hunks[g].old_start - 1 + hunks[g].old_lines.size() + 2 * ctx)
      ++g;
    auto first_old = static_cast<std::size_t>(hunks[h].old_start - 1);
    auto lead = std::min(ctx, first_old);
    auto begin_old = first_old - lead;
    auto begin_new = static_cast<std::size_t>(hunks[h].new_start - 1) - lead;
    auto last_end = hunks[g].old_start - 1 + hunks[g].old_lines.size();
    auto end_old = std::min(a.size(), last_end + ctx);
    auto new_len = (end_old - begin_old);
    for (std::size_t k = h; k <= g; ++k) new_len = new_len - hunks[k].old_lines.size() + hunks[k].new_lines.size();
    auto range = [](std::size_t start, std::size_t len) {
      return len == 0 ? fmt::format("{},0", start) : fmt::format("{},{}", start + 1, len);
    };
    out += fmt::format("@@ -{} +{} @@\n", range(begin_old, end_old - begin_old), range(begin_new, new_len));
    std::size_t i = begin_old;
    for (std::size_t k = h; k <= g; ++k) {
      for (; i < static_cast<std::size_t>(hunks[k].old_start - 1); ++i) line_out(out, ' ', a[i]);
      for (const auto& l : hunks[k].old_lines) line_out(out, '-', l), ++i;
      for (const auto& l : hunks[k].new_lines) line_out(out, '+', l);
    }
    for (; i < end_old; ++i) line_out(out, ' ', a[i]);
    h = g + 1;
  }
  return out;
}

}  // namespace libmig::merge
