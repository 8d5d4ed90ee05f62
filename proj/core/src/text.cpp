#include "mmgenre/text.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <regex>
#include <sstream>
#include <unordered_set>

#include "mmgenre/errors.hpp"

namespace mmgenre {

std::uint64_t term_key(const std::string& term) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : term) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string strip_subtitle_markup(const std::string& srt_text) {
    static const std::regex timestamp_re(
        R"(^\s*\d{2}:\d{2}:\d{2},\d{3}\s*-->\s*\d{2}:\d{2}:\d{2},\d{3}.*$)");
    static const std::regex cue_number_re(R"(^\s*\d+\s*$)");
    static const std::regex tag_re(R"(<[^>]*>)");

    std::istringstream in(srt_text);
    std::string line;
    std::string out;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (std::regex_match(line, cue_number_re) || std::regex_match(line, timestamp_re))
            continue;
        line = std::regex_replace(line, tag_re, "");
        // trim
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos)
            continue;
        const auto last = line.find_last_not_of(" \t");
        if (!out.empty())
            out.push_back(' ');
        out.append(line, first, last - first + 1);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Porter stemmer (1980), classic formulation.

namespace {

struct Porter {
    std::string b;
    int k = 0;  // last valid index
    int j = 0;  // suffix boundary

    bool cons(int i) const {
        switch (b[i]) {
            case 'a': case 'e': case 'i': case 'o': case 'u':
                return false;
            case 'y':
                return (i == 0) ? true : !cons(i - 1);
            default:
                return true;
        }
    }

    // Number of consonant-vowel sequences in b[0..j].
    int m() const {
        int n = 0;
        int i = 0;
        while (true) {
            if (i > j) return n;
            if (!cons(i)) break;
            ++i;
        }
        ++i;
        while (true) {
            while (true) {
                if (i > j) return n;
                if (cons(i)) break;
                ++i;
            }
            ++i;
            ++n;
            while (true) {
                if (i > j) return n;
                if (!cons(i)) break;
                ++i;
            }
            ++i;
        }
    }

    bool vowel_in_stem() const {
        for (int i = 0; i <= j; ++i)
            if (!cons(i)) return true;
        return false;
    }

    bool double_c(int i) const {
        if (i < 1) return false;
        if (b[i] != b[i - 1]) return false;
        return cons(i);
    }

    // consonant-vowel-consonant at i, final consonant not w, x or y.
    bool cvc(int i) const {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
        const char c = b[i];
        return c != 'w' && c != 'x' && c != 'y';
    }

    bool ends(const char* s) {
        const int len = static_cast<int>(std::strlen(s));
        if (len > k + 1) return false;
        if (b.compare(k - len + 1, len, s) != 0) return false;
        j = k - len;
        return true;
    }

    void set_to(const char* s) {
        const int len = static_cast<int>(std::strlen(s));
        b.replace(j + 1, b.size() - j - 1, s);
        k = j + len;
        b.resize(k + 1);
    }

    void r(const char* s) {
        if (m() > 0) set_to(s);
    }

    void step1ab() {
        if (b[k] == 's') {
            if (ends("sses")) k -= 2;
            else if (ends("ies")) set_to("i");
            else if (b[k - 1] != 's') --k;
        }
        if (ends("eed")) {
            if (m() > 0) --k;
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            k = j;
            b.resize(k + 1);
            if (ends("at")) set_to("ate");
            else if (ends("bl")) set_to("ble");
            else if (ends("iz")) set_to("ize");
            else if (double_c(k)) {
                --k;
                const char c = b[k];
                if (c == 'l' || c == 's' || c == 'z') ++k;
                b.resize(k + 1);
            } else if (m() == 1 && cvc(k)) {
                set_to("e");
            }
        }
        b.resize(k + 1);
    }

    void step1c() {
        if (ends("y") && vowel_in_stem())
            b[k] = 'i';
    }

    void step2() {
        switch (b[k - 1]) {
            case 'a':
                if (ends("ational")) { r("ate"); break; }
                if (ends("tional")) { r("tion"); break; }
                break;
            case 'c':
                if (ends("enci")) { r("ence"); break; }
                if (ends("anci")) { r("ance"); break; }
                break;
            case 'e':
                if (ends("izer")) { r("ize"); break; }
                break;
            case 'l':
                if (ends("bli")) { r("ble"); break; }
                if (ends("alli")) { r("al"); break; }
                if (ends("entli")) { r("ent"); break; }
                if (ends("eli")) { r("e"); break; }
                if (ends("ousli")) { r("ous"); break; }
                break;
            case 'o':
                if (ends("ization")) { r("ize"); break; }
                if (ends("ation")) { r("ate"); break; }
                if (ends("ator")) { r("ate"); break; }
                break;
            case 's':
                if (ends("alism")) { r("al"); break; }
                if (ends("iveness")) { r("ive"); break; }
                if (ends("fulness")) { r("ful"); break; }
                if (ends("ousness")) { r("ous"); break; }
                break;
            case 't':
                if (ends("aliti")) { r("al"); break; }
                if (ends("iviti")) { r("ive"); break; }
                if (ends("biliti")) { r("ble"); break; }
                break;
            case 'g':
                if (ends("logi")) { r("log"); break; }
                break;
        }
    }

    void step3() {
        switch (b[k]) {
            case 'e':
                if (ends("icate")) { r("ic"); break; }
                if (ends("ative")) { r(""); break; }
                if (ends("alize")) { r("al"); break; }
                break;
            case 'i':
                if (ends("iciti")) { r("ic"); break; }
                break;
            case 'l':
                if (ends("ical")) { r("ic"); break; }
                if (ends("ful")) { r(""); break; }
                break;
            case 's':
                if (ends("ness")) { r(""); break; }
                break;
        }
    }

    void step4() {
        switch (b[k - 1]) {
            case 'a': if (ends("al")) break; return;
            case 'c': if (ends("ance")) break; if (ends("ence")) break; return;
            case 'e': if (ends("er")) break; return;
            case 'i': if (ends("ic")) break; return;
            case 'l': if (ends("able")) break; if (ends("ible")) break; return;
            case 'n':
                if (ends("ant")) break;
                if (ends("ement")) break;
                if (ends("ment")) break;
                if (ends("ent")) break;
                return;
            case 'o':
                if (ends("ion") && j >= 0 && (b[j] == 's' || b[j] == 't')) break;
                if (ends("ou")) break;
                return;
            case 's': if (ends("ism")) break; return;
            case 't': if (ends("ate")) break; if (ends("iti")) break; return;
            case 'u': if (ends("ous")) break; return;
            case 'v': if (ends("ive")) break; return;
            case 'z': if (ends("ize")) break; return;
            default: return;
        }
        if (m() > 1) {
            k = j;
            b.resize(k + 1);
        }
    }

    void step5() {
        j = k;
        if (b[k] == 'e') {
            const int a = m();
            if (a > 1 || (a == 1 && !cvc(k - 1))) {
                --k;
                b.resize(k + 1);
            }
        }
        j = k;
        if (b[k] == 'l' && double_c(k) && m() > 1) {
            --k;
            b.resize(k + 1);
        }
    }
};

} // namespace

std::string porter_stem(const std::string& word) {
    if (word.size() <= 2)
        return word;
    Porter p;
    p.b = word;
    p.k = static_cast<int>(word.size()) - 1;
    p.step1ab();
    if (p.k > 0) {
        p.step1c();
        p.step2();
        p.step3();
        p.step4();
        p.step5();
    }
    return p.b;
}

TokenSequence preprocess(const std::string& text) {
    TokenSequence seq;
    std::string cur;
    auto flush = [&] {
        if (cur.empty())
            return;
        const bool alphabetic =
            std::all_of(cur.begin(), cur.end(), [](unsigned char c) { return std::isalpha(c); });
        seq.tokens.push_back(alphabetic ? porter_stem(cur) : cur);
        cur.clear();
    };
    for (const unsigned char c : text) {
        if (std::isalnum(c))
            cur.push_back(static_cast<char>(std::tolower(c)));
        else
            flush();
    }
    flush();
    return seq;
}

std::string join_ngram(const std::vector<std::string>& tokens, std::size_t start, std::size_t n) {
    std::string out = tokens[start];
    for (std::size_t i = 1; i < n; ++i) {
        out.push_back('\x1f');
        out += tokens[start + i];
    }
    return out;
}

TfidfModel tfidf_fit(const std::vector<TokenSequence>& corpus, std::size_t n) {
    if (corpus.empty())
        throw DataError("tfidf_fit on empty corpus");
    if (n < 1 || n > 4)
        throw ConfigError("tfidf n-gram order must be in [1,4]");

    TfidfModel model;
    model.n = n;
    model.doc_count = corpus.size();

    for (const auto& doc : corpus) {
        if (doc.tokens.size() < n)
            continue;
        // df counts each n-gram once per document
        std::unordered_set<std::size_t> seen_here;
        for (std::size_t i = 0; i + n <= doc.tokens.size(); ++i) {
            const std::string gram = join_ngram(doc.tokens, i, n);
            auto [it, inserted] = model.vocabulary.emplace(gram, model.terms.size());
            if (inserted) {
                model.terms.push_back(gram);
                model.df.push_back(0);
            }
            const std::size_t idx = it->second;
            if (seen_here.insert(idx).second)
                ++model.df[idx];
        }
    }
    return model;
}

SparseVector tfidf_transform(const TokenSequence& doc, const TfidfModel& model) {
    if (model.vocabulary.empty())
        throw DataError("tfidf_transform with empty vocabulary");

    std::unordered_map<std::size_t, double> tf;
    if (doc.tokens.size() >= model.n) {
        for (std::size_t i = 0; i + model.n <= doc.tokens.size(); ++i) {
            const auto it = model.vocabulary.find(join_ngram(doc.tokens, i, model.n));
            if (it != model.vocabulary.end())
                tf[it->second] += 1.0;
        }
    }

    // Deterministic output ordering by vocabulary index.
    std::vector<std::size_t> indices;
    indices.reserve(tf.size());
    for (const auto& [idx, _] : tf)
        indices.push_back(idx);
    std::sort(indices.begin(), indices.end());

    SparseVector out;
    out.reserve(indices.size());
    double norm_sq = 0.0;
    for (const std::size_t idx : indices) {
        const double idf = std::log((1.0 + static_cast<double>(model.doc_count)) /
                                    (1.0 + static_cast<double>(model.df[idx]))) + 1.0;
        const double w = tf[idx] * idf;
        out.emplace_back(term_key(model.terms[idx]), w);
        norm_sq += w * w;
    }
    if (norm_sq > 0.0) {
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (auto& [_, w] : out)
            w *= inv;
    }
    return out;
}

} // namespace mmgenre
