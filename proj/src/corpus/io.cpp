#include "mtparse/corpus/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mtparse/error.hpp"

namespace mtparse::corpus {

using nlohmann::json;

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find('\t', start);
        cols.push_back(line.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return cols;
}

bool parse_int(const std::string& s, int& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

struct ConlluBlock {
    std::string id;
    long first_line = 0;
    std::vector<std::string> forms;
    std::vector<std::string> heads;
    std::vector<std::string> labels;
    std::vector<char> luw_begin;  // 1 = B, 0 = I, -1 = unspecified
};

Sentence finish_block(ConlluBlock& b, std::size_t ordinal, bool check) {
    Sentence s;
    s.id = b.id.empty() ? "s" + std::to_string(ordinal + 1) : b.id;
    s.suw = std::move(b.forms);
    const int n = s.size();

    bool any_luw = false;
    for (char c : b.luw_begin) any_luw = any_luw || c >= 0;
    if (any_luw) {
        for (int i = 0; i < n; ++i) {
            if (b.luw_begin[i] != 0 || i == 0) {
                s.luw_spans.push_back({i, i + 1});
            } else {
                s.luw_spans.back().end = i + 1;
            }
        }
    } else {
        s.luw_spans = trivial_luw_spans(n);
    }

    int unannotated = 0;
    for (const auto& h : b.heads) unannotated += h == "_";
    if (unannotated != 0 && unannotated != n) {
        throw DataError("sentence " + s.id + ": HEAD partly unannotated", b.first_line);
    }
    if (unannotated == 0 && n > 0) {
        std::vector<int> heads(n);
        for (int i = 0; i < n; ++i) {
            if (!parse_int(b.heads[i], heads[i])) {
                throw DataError("sentence " + s.id + ": bad HEAD '" + b.heads[i] + "'", b.first_line);
            }
        }
        s.heads = std::move(heads);
        s.dep_labels = std::move(b.labels);
    }
    if (!check) return s;
    try {
        validate(s);
    } catch (const ValidationError& e) {
        throw ValidationError(e.what(), b.first_line);
    }
    return s;
}

}  // namespace

std::vector<Sentence> parse_conllu(std::istream& in, bool validate_trees) {
    std::vector<Sentence> out;
    ConlluBlock block;
    bool open = false;
    std::string line;
    long lineno = 0;

    auto flush = [&] {
        if (open && !block.forms.empty()) out.push_back(finish_block(block, out.size(), validate_trees));
        block = ConlluBlock{};
        open = false;
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush();
            continue;
        }
        if (!open) {
            open = true;
            block.first_line = lineno;
        }
        if (line[0] == '#') {
            constexpr std::string_view key = "# sent_id = ";
            if (line.compare(0, key.size(), key) == 0) block.id = line.substr(key.size());
            continue;
        }
        auto cols = split_tabs(line);
        if (cols.size() != 10) {
            throw DataError("expected 10 tab-separated columns, found " + std::to_string(cols.size()), lineno);
        }
        const std::string& id = cols[0];
        if (id.find('-') != std::string::npos || id.find('.') != std::string::npos) continue;
        int index = 0;
        if (!parse_int(id, index)) throw DataError("bad token ID '" + id + "'", lineno);
        if (index != static_cast<int>(block.forms.size()) + 1) {
            throw DataError("token IDs must be consecutive from 1", lineno);
        }
        if (cols[6] != "_") {
            int h = 0;
            if (!parse_int(cols[6], h)) throw DataError("bad HEAD '" + cols[6] + "'", lineno);
        }
        block.forms.push_back(cols[1]);
        block.heads.push_back(cols[6]);
        block.labels.push_back(cols[7]);
        char luw = -1;
        std::istringstream misc(cols[9]);
        std::string item;
        while (std::getline(misc, item, '|')) {
            if (item == "LUWBILabel=B") luw = 1;
            if (item == "LUWBILabel=I") luw = 0;
        }
        block.luw_begin.push_back(luw);
    }
    flush();
    return out;
}

std::vector<Sentence> read_conllu(const std::filesystem::path& path, bool validate_trees) {
    auto in = open_in(path);
    return parse_conllu(in, validate_trees);
}

void write_conllu(std::ostream& out, const std::vector<Sentence>& corpus, const std::string& header_comment) {
    if (!header_comment.empty()) out << "# " << header_comment << "\n";
    for (const auto& s : corpus) {
        out << "# sent_id = " << s.id << "\n";
        std::vector<char> luw_begin(s.size(), 0);
        for (const auto& sp : s.luw_spans) luw_begin[sp.begin] = 1;
        for (int i = 0; i < s.size(); ++i) {
            out << (i + 1) << '\t' << s.suw[i] << "\t_\t_\t_\t_\t";
            if (s.heads) {
                out << (*s.heads)[i] << '\t' << (*s.dep_labels)[i];
            } else {
                out << "_\t_";
            }
            out << "\t_\tLUWBILabel=" << (luw_begin[i] ? 'B' : 'I') << "\n";
        }
        out << "\n";
    }
}

void write_conllu(const std::filesystem::path& path, const std::vector<Sentence>& corpus,
                  const std::string& header_comment) {
    auto out = open_out(path);
    write_conllu(out, corpus, header_comment);
}

namespace {

Span span_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
        throw DataError("span must be a [begin, end] integer pair");
    }
    return {j[0].get<int>(), j[1].get<int>()};
}

json span_to_json(const Span& s) { return json::array({s.begin, s.end}); }

Sentence sentence_from_json(const json& j) {
    Sentence s;
    s.id = j.at("sentence_id").get<std::string>();
    s.suw = j.at("suw").get<std::vector<std::string>>();
    if (j.contains("luw_spans")) {
        for (const auto& sp : j.at("luw_spans")) s.luw_spans.push_back(span_from_json(sp));
    } else {
        s.luw_spans = trivial_luw_spans(s.size());
    }
    if (j.contains("frames")) {
        std::vector<PredicateFrame> frames;
        for (const auto& jf : j.at("frames")) {
            PredicateFrame f;
            f.predicate = span_from_json(jf.at("predicate"));
            for (const auto& ja : jf.at("arguments")) {
                f.arguments.push_back({ja.at("label").get<std::string>(), span_from_json(ja.at("span"))});
            }
            frames.push_back(std::move(f));
        }
        s.frames = std::move(frames);
    }
    if (j.contains("dp") && !j.at("dp").is_null()) {
        s.heads = j.at("dp").at("heads").get<std::vector<int>>();
        s.dep_labels = j.at("dp").at("labels").get<std::vector<std::string>>();
    }
    return s;
}

json sentence_to_json(const Sentence& s) {
    json j;
    j["sentence_id"] = s.id;
    j["suw"] = s.suw;
    json spans = json::array();
    for (const auto& sp : s.luw_spans) spans.push_back(span_to_json(sp));
    j["luw_spans"] = std::move(spans);
    if (s.frames) {
        json frames = json::array();
        for (const auto& f : *s.frames) {
            json args = json::array();
            for (const auto& a : f.arguments) args.push_back({{"label", a.label}, {"span", span_to_json(a.span)}});
            frames.push_back({{"predicate", span_to_json(f.predicate)}, {"arguments", std::move(args)}});
        }
        j["frames"] = std::move(frames);
    }
    if (s.heads) j["dp"] = {{"heads", *s.heads}, {"labels", *s.dep_labels}};
    return j;
}

}  // namespace

std::vector<Sentence> parse_srl_jsonl(std::istream& in, const std::vector<std::string>& roles) {
    std::vector<Sentence> out;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Sentence s;
        try {
            s = sentence_from_json(json::parse(line));
        } catch (const json::exception& e) {
            throw DataError(std::string("malformed SRL record: ") + e.what(), lineno);
        } catch (const DataError& e) {
            throw DataError(e.what(), lineno);
        }
        try {
            validate(s, roles);
        } catch (const ValidationError& e) {
            throw ValidationError(e.what(), lineno);
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<Sentence> read_srl_jsonl(const std::filesystem::path& path, const std::vector<std::string>& roles) {
    auto in = open_in(path);
    return parse_srl_jsonl(in, roles);
}

void write_srl_jsonl(std::ostream& out, const std::vector<Sentence>& corpus) {
    for (const auto& s : corpus) out << sentence_to_json(s).dump() << "\n";
}

void write_srl_jsonl(const std::filesystem::path& path, const std::vector<Sentence>& corpus) {
    auto out = open_out(path);
    write_srl_jsonl(out, corpus);
}

std::vector<Sentence> read_any(const std::filesystem::path& path) {
    const auto name = path.filename().string();
    if (name.find(".conllu") != std::string::npos || name.find(".conll") != std::string::npos) {
        return read_conllu(path);
    }
    return read_srl_jsonl(path);
}

}  // namespace mtparse::corpus
