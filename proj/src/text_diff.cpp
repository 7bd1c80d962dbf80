#include "modat/text_diff.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

namespace modat {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

enum class Op { Keep, Del, Add };

struct Edit {
    Op op;
    std::size_t a;  // line index in before (Keep/Del)
    std::size_t b;  // line index in after (Keep/Add)
};

std::vector<Edit> diff_lines(const std::vector<std::string_view>& a, const std::vector<std::string_view>& b) {
    std::size_t pre = 0;
    while (pre < a.size() && pre < b.size() && a[pre] == b[pre]) ++pre;
    std::size_t suf = 0;
    while (suf < a.size() - pre && suf < b.size() - pre && a[a.size() - 1 - suf] == b[b.size() - 1 - suf]) ++suf;

    std::size_t n = a.size() - pre - suf, m = b.size() - pre - suf;
    std::vector<std::vector<std::uint32_t>> lcs(n + 1, std::vector<std::uint32_t>(m + 1, 0));
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = m; j-- > 0;) {
            lcs[i][j] = a[pre + i] == b[pre + j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);
        }
    }

    std::vector<Edit> edits;
    for (std::size_t i = 0; i < pre; ++i) edits.push_back({Op::Keep, i, i});
    std::size_t i = 0, j = 0;
    while (i < n || j < m) {
        if (i < n && j < m && a[pre + i] == b[pre + j]) {
            edits.push_back({Op::Keep, pre + i++, pre + j++});
        } else if (i < n && (j == m || lcs[i + 1][j] >= lcs[i][j + 1])) {
            edits.push_back({Op::Del, pre + i++, pre + j});
        } else {
            edits.push_back({Op::Add, pre + i, pre + j++});
        }
    }
    for (std::size_t k = 0; k < suf; ++k) edits.push_back({Op::Keep, pre + n + k, pre + m + k});
    return edits;
}

}  // namespace

std::string unified_diff(std::string_view before, std::string_view after, std::string_view beforeName,
                         std::string_view afterName) {
    auto a = split_lines(before);
    auto b = split_lines(after);
    auto edits = diff_lines(a, b);
    if (std::all_of(edits.begin(), edits.end(), [](const Edit& e) { return e.op == Op::Keep; })) return "";

    constexpr std::size_t kContext = 3;
    std::ostringstream os;
    os << "--- " << beforeName << "\n+++ " << afterName << '\n';
    std::size_t k = 0;
    while (k < edits.size()) {
        if (edits[k].op == Op::Keep) {
            ++k;
            continue;
        }
        std::size_t start = k >= kContext ? k - kContext : 0;
        std::size_t end = k;
        // Extend the hunk while changes are separated by at most 2*context kept lines.
        while (end < edits.size()) {
            if (edits[end].op != Op::Keep) {
                ++end;
                continue;
            }
            std::size_t run = end;
            while (run < edits.size() && edits[run].op == Op::Keep) ++run;
            if (run == edits.size() || run - end > 2 * kContext) {
                end = std::min(run, end + kContext);
                break;
            }
            end = run;
        }
        std::size_t aStart = edits[start].a, bStart = edits[start].b, aLen = 0, bLen = 0;
        for (std::size_t x = start; x < end; ++x) {
            if (edits[x].op != Op::Add) ++aLen;
            if (edits[x].op != Op::Del) ++bLen;
        }
        os << "@@ -" << (aLen ? aStart + 1 : aStart) << ',' << aLen << " +" << (bLen ? bStart + 1 : bStart) << ','
           << bLen << " @@\n";
        for (std::size_t x = start; x < end; ++x) {
            switch (edits[x].op) {
                case Op::Keep: os << ' ' << a[edits[x].a] << '\n'; break;
                case Op::Del: os << '-' << a[edits[x].a] << '\n'; break;
                case Op::Add: os << '+' << b[edits[x].b] << '\n'; break;
            }
        }
        k = end;
    }
    return os.str();
}

}  // namespace modat
