#include "ppscan/annotated.hpp"

#include <fstream>
#include <istream>

#include <nlohmann/json.hpp>

#include "ppscan/errors.hpp"

namespace ppscan::classify {

std::size_t CategorySet::count() const {
    std::size_t n = 0;
    for (bool b : bits) n += b ? 1 : 0;
    return n;
}

std::vector<Category> CategorySet::to_list() const {
    std::vector<Category> out;
    for (Category c : kAllCategories)
        if (has(c)) out.push_back(c);
    return out;
}

std::string CategorySet::signature() const {
    std::string s(kNumCategories, '0');
    for (std::size_t i = 0; i < kNumCategories; ++i)
        if (bits[i]) s[i] = '1';
    return s;
}

std::vector<AnnotatedSegment> parse_annotated_jsonl(std::istream& in) {
    std::vector<AnnotatedSegment> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        bool blank = true;
        for (char ch : line)
            if (ch != ' ' && ch != '\t') {
                blank = false;
                break;
            }
        if (blank) continue;

        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw MalformedAnnotation(line_no, std::string("not valid JSON: ") + e.what());
        }
        if (!doc.is_object()) throw MalformedAnnotation(line_no, "expected a JSON object");
        if (!doc.contains("text") || !doc["text"].is_string())
            throw MalformedAnnotation(line_no, "missing string field \"text\"");
        if (!doc.contains("labels") || !doc["labels"].is_array())
            throw MalformedAnnotation(line_no, "missing array field \"labels\"");

        AnnotatedSegment seg;
        seg.text = doc["text"].get<std::string>();
        for (const auto& label : doc["labels"]) {
            if (!label.is_string())
                throw MalformedAnnotation(line_no, "labels must be category names");
            auto c = category_from_name(label.get<std::string>());
            if (!c)
                throw MalformedAnnotation(line_no,
                                          "unknown category: " + label.get<std::string>());
            seg.gold.add(*c);
        }
        out.push_back(std::move(seg));
    }
    return out;
}

std::vector<AnnotatedSegment> read_annotated_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open annotated data: " + path.string());
    return parse_annotated_jsonl(in);
}

void write_annotated_jsonl(const std::filesystem::path& path,
                           const std::vector<AnnotatedSegment>& segments) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write annotated data: " + path.string());
    for (const auto& seg : segments) {
        nlohmann::ordered_json doc;
        doc["text"] = seg.text;
        nlohmann::ordered_json labels = nlohmann::ordered_json::array();
        for (Category c : seg.gold.to_list()) labels.push_back(category_name(c));
        doc["labels"] = std::move(labels);
        out << doc.dump() << "\n";
    }
    if (!out) throw Error("failed writing annotated data: " + path.string());
}

}  // namespace ppscan::classify
