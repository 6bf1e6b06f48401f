#include "idrr/predictions.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

#include "idrr/errors.hpp"

namespace idrr {

std::string predictions_to_jsonl(const std::vector<PredictionRecord>& records, const SenseHierarchy& hierarchy) {
    std::string out;
    for (const auto& rec : records) {
        nlohmann::ordered_json j;
        j["id"] = rec.id;
        for (std::size_t l = 0; l < rec.dist.size(); ++l) {
            j["dist" + std::to_string(l + 1)] = rec.dist[l].values;
        }
        for (std::size_t l = 0; l < rec.label.size(); ++l) {
            j["label" + std::to_string(l + 1)] = hierarchy.name(kLevels[l], rec.label[l]);
        }
        out += j.dump() + "\n";
    }
    return out;
}

std::vector<PredictionRecord> predictions_from_jsonl(std::string_view text, const SenseHierarchy& hierarchy) {
    std::vector<PredictionRecord> out;
    std::istringstream is{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            PredictionRecord rec;
            rec.id = j.at("id");
            for (std::size_t l = 0; l < 3; ++l) {
                const std::string key = std::to_string(l + 1);
                if (j.contains("dist" + key)) {
                    rec.dist.push_back(LabelDistribution{kLevels[l], j.at("dist" + key).get<std::vector<double>>()});
                }
                if (j.contains("label" + key)) {
                    rec.label.push_back(hierarchy.index_of(kLevels[l], j.at("label" + key).get<std::string>()));
                }
            }
            out.push_back(std::move(rec));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("predictions line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace idrr
