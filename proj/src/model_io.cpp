#include "smartbayes/model_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace smartbayes {

namespace {

using nlohmann::json;

std::string real_str(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double real_val(const json& j) {
    if (!j.is_string()) throw std::runtime_error("expected a real encoded as a string");
    const std::string s = j.get<std::string>();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) throw std::runtime_error("bad real value: " + s);
    return v;
}

json reals(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(real_str(v[i]));
    return arr;
}

json reals(const std::vector<double>& v) {
    json arr = json::array();
    for (double x : v) arr.push_back(real_str(x));
    return arr;
}

Eigen::VectorXd real_vector(const json& arr) {
    Eigen::VectorXd v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = real_val(arr[i]);
    return v;
}

json logistic_to_json(const LogisticModel& m) {
    return json{{"intercept", real_str(m.intercept)},
                {"coefficients", reals(m.coefficients)},
                {"converged", m.converged},
                {"iterations", m.iterations},
                {"dropped_columns", m.dropped_columns}};
}

LogisticModel logistic_from_json(const json& j) {
    LogisticModel m;
    m.intercept = real_val(j.at("intercept"));
    m.coefficients = real_vector(j.at("coefficients"));
    m.converged = j.at("converged").get<bool>();
    m.iterations = j.at("iterations").get<int>();
    m.dropped_columns = j.at("dropped_columns").get<std::vector<int>>();
    return m;
}

json nb_to_json(const NaiveBayesModel& m) {
    json feats = json::array();
    for (const auto& f : m.features)
        feats.push_back(json{{"mu0", real_str(f.mu0)},
                             {"mu1", real_str(f.mu1)},
                             {"sigma2_0", real_str(f.sigma2_0)},
                             {"sigma2_1", real_str(f.sigma2_1)}});
    return json{{"log_prior_odds", real_str(m.log_prior_odds)}, {"features", feats}};
}

NaiveBayesModel nb_from_json(const json& j) {
    NaiveBayesModel m;
    m.log_prior_odds = real_val(j.at("log_prior_odds"));
    for (const auto& f : j.at("features"))
        m.features.push_back({real_val(f.at("mu0")), real_val(f.at("mu1")),
                              real_val(f.at("sigma2_0")), real_val(f.at("sigma2_1"))});
    return m;
}

json prior_odds_to_json(const PriorOdds& p) {
    return json{{"r_hat", real_str(p.r_hat)}, {"n1", p.n1}, {"n0", p.n0}};
}

PriorOdds prior_odds_from_json(const json& j) {
    return PriorOdds{real_val(j.at("r_hat")), j.at("n1").get<std::size_t>(),
                     j.at("n0").get<std::size_t>()};
}

json ratio_model_to_json(const MarginalRatioModel& m) {
    json j{{"feature_index", m.feature_index},
           {"prior_odds", prior_odds_to_json(m.prior_odds)},
           {"degraded", m.degraded}};
    switch (m.kind) {
        case RatioKind::Spline: {
            const auto& f = *m.spline_fit;
            j["kind"] = "spline";
            j["spline"] = json{{"degree", f.basis.degree},
                               {"knots", reals(f.basis.knots)},
                               {"x_min", real_str(f.basis.x_min)},
                               {"x_max", real_str(f.basis.x_max)},
                               {"coefficients", reals(f.coefficients)},
                               {"lambda", real_str(f.lambda)},
                               {"edf", real_str(f.edf)},
                               {"deviance", real_str(f.deviance)},
                               {"converged", f.converged},
                               {"iterations", f.iterations}};
            break;
        }
        case RatioKind::Gaussian:
            j["kind"] = "gaussian";
            j["gaussian"] = json{{"mu0", real_str(m.gaussian->mu0)},
                                 {"mu1", real_str(m.gaussian->mu1)},
                                 {"sigma2", real_str(m.gaussian->sigma2)}};
            break;
        case RatioKind::Constant:
            j["kind"] = "constant";
            break;
    }
    return j;
}

MarginalRatioModel ratio_model_from_json(const json& j) {
    MarginalRatioModel m;
    m.feature_index = j.at("feature_index").get<int>();
    m.prior_odds = prior_odds_from_json(j.at("prior_odds"));
    m.degraded = j.at("degraded").get<bool>();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "spline") {
        m.kind = RatioKind::Spline;
        const json& s = j.at("spline");
        PenalizedSplineFit f;
        f.basis.degree = s.at("degree").get<int>();
        for (const auto& k : s.at("knots")) f.basis.knots.push_back(real_val(k));
        f.basis.x_min = real_val(s.at("x_min"));
        f.basis.x_max = real_val(s.at("x_max"));
        f.coefficients = real_vector(s.at("coefficients"));
        f.lambda = real_val(s.at("lambda"));
        f.edf = real_val(s.at("edf"));
        f.deviance = real_val(s.at("deviance"));
        f.converged = s.at("converged").get<bool>();
        f.iterations = s.at("iterations").get<int>();
        m.spline_fit = std::move(f);
    } else if (kind == "gaussian") {
        m.kind = RatioKind::Gaussian;
        const json& g = j.at("gaussian");
        m.gaussian = GaussianRatioParams{real_val(g.at("mu0")), real_val(g.at("mu1")),
                                         real_val(g.at("sigma2"))};
    } else if (kind == "constant") {
        m.kind = RatioKind::Constant;
    } else {
        throw std::runtime_error("unknown ratio model kind: " + kind);
    }
    return m;
}

json sb_to_json(const SmartBayesModel& m) {
    json ratios = json::array();
    for (const auto& r : m.ratio_models) ratios.push_back(ratio_model_to_json(r));
    json doc{{"frozen", m.frozen},
             {"degraded_features", m.degraded_features},
             {"ratio_models", ratios},
             {"logistic", logistic_to_json(m.logistic)}};
    if (!m.ratio_models.empty())  // shared by all per-feature blocks
        doc["prior_odds"] = prior_odds_to_json(m.ratio_models.front().prior_odds);
    return doc;
}

SmartBayesModel sb_from_json(const json& j) {
    SmartBayesModel m;
    m.frozen = j.at("frozen").get<bool>();
    m.degraded_features = j.at("degraded_features").get<int>();
    for (const auto& r : j.at("ratio_models")) m.ratio_models.push_back(ratio_model_from_json(r));
    m.logistic = logistic_from_json(j.at("logistic"));
    return m;
}

}  // namespace

std::string ModelFile::kind() const {
    if (std::holds_alternative<LogisticModel>(model)) return "lr";
    if (std::holds_alternative<NaiveBayesModel>(model)) return "nb";
    return "sb";
}

void save_model(const ModelFile& file, const std::string& path) {
    json doc{{"schema_version", ModelFile::kSchemaVersion},
             {"kind", file.kind()},
             {"feature_names", file.feature_names}};
    if (const auto* lr = std::get_if<LogisticModel>(&file.model))
        doc["model"] = logistic_to_json(*lr);
    else if (const auto* nb = std::get_if<NaiveBayesModel>(&file.model))
        doc["model"] = nb_to_json(*nb);
    else
        doc["model"] = sb_to_json(std::get<SmartBayesModel>(file.model));

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << doc.dump(2) << "\n";
    if (!out) throw std::runtime_error("failed writing model file: " + path);
}

ModelFile load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed model file: ") + e.what());
    }
    try {
        const int version = doc.at("schema_version").get<int>();
        if (version != ModelFile::kSchemaVersion)
            throw std::runtime_error("unsupported model schema version " + std::to_string(version));
        ModelFile file;
        file.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
        const std::string kind = doc.at("kind").get<std::string>();
        if (kind == "lr")
            file.model = logistic_from_json(doc.at("model"));
        else if (kind == "nb")
            file.model = nb_from_json(doc.at("model"));
        else if (kind == "sb")
            file.model = sb_from_json(doc.at("model"));
        else
            throw std::runtime_error("unknown model kind: " + kind);
        return file;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed model file: ") + e.what());
    }
}

}  // namespace smartbayes
